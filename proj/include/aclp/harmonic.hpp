#pragma once

// Weight-2 rational harmonic cocycles on the quotient graph: functions on
// oriented edge classes that negate under reversal (hence vanish on
// self-reversed classes) and whose slot sums vanish at every vertex. Hecke
// operators act through norm-ell class representatives; simultaneous
// eigenvectors are extracted exactly over Q.

#include <utility>
#include <vector>

#include "aclp/bttree.hpp"
#include "aclp/linalg.hpp"

namespace aclp {

class CocycleSpace {
 public:
  // only weight 2 is implemented; other weights are reported as unsupported
  explicit CocycleSpace(const QuotientGraph& G, int weight = 2);

  const QuotientGraph& graph() const { return *G_; }
  long dim() const { return static_cast<long>(basis_.size()); }
  // rows are basis cocycles, indexed by unoriented edge class
  const MatQ& basis() const { return basis_; }

  // cocycle values on oriented classes, from coordinates in the basis
  VecQ values_oriented(const VecQ& coeff) const;

  // left coset representatives of the even-valuation unit group acting on
  // primitive order elements of norm ell p^(2a); exactly ell + 1 of them
  std::vector<Quat> hecke_reps(long ell) const;

  // matrix of T_ell in the cocycle basis (ell coprime to p and the
  // discriminant); rows map basis vectors to their images
  MatQ hecke_matrix(long ell) const;
  // matrix of the involution induced by an odd-norm element
  MatQ involution_matrix(const Quat& y) const;

  // simultaneous eigenvector for the prescribed (ell, a_ell) pairs, as
  // exact values per unoriented class; integral, content one, first nonzero
  // entry positive. Requires the joint eigenspace to be one-dimensional.
  VecZ eigencocycle(const std::vector<std::pair<long, long>>& eigs) const;

 private:
  const QuotientGraph* G_;
  MatQ basis_;

  // express a values-vector in the basis; certifies membership
  VecQ in_basis(const VecQ& values) const;
};

}  // namespace aclp
