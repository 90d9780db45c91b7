#pragma once

// Definite rational quaternion algebras B = (a, b | Q): i^2 = a, j^2 = b,
// ij = -ji = k. Orders and Eichler orders as canonical rational lattices,
// local orientations at ramified and split level primes, mod-p^N splittings
// O -> M_2(Z/p^N), and exact short-vector enumeration by reduced norm.

#include <array>
#include <utility>
#include <vector>

#include "aclp/linalg.hpp"
#include "aclp/util.hpp"

namespace aclp {

struct QuatAlg {
  long a = -1, b = -1;
  bool operator==(const QuatAlg&) const = default;
};

struct Quat {
  Rat t, x, y, z;
  bool operator==(const Quat&) const = default;
};

Quat qadd(const Quat& u, const Quat& v);
Quat qsub(const Quat& u, const Quat& v);
Quat qscale(const Rat& c, const Quat& u);
Quat qmul(const QuatAlg& A, const Quat& u, const Quat& v);
Quat qconj(const Quat& u);
Rat qtrd(const Quat& u);
Rat qnrd(const QuatAlg& A, const Quat& u);
inline Quat qone() { return Quat{1, 0, 0, 0}; }

// Hilbert symbol (a, b)_ell in {+1, -1}; ell = 0 encodes the real place.
int hilbert_symbol(Int a, Int b, long ell);
// Finite primes where (a, b | Q) ramifies, increasing. Checks the parity
// of the full ramification set (with infinity) as a self-test.
std::vector<long> quat_ramified(long a, long b);
// Definite algebra with prescribed finite ramification (odd-sized set of
// distinct primes). Deterministic small search.
QuatAlg definite_algebra(const std::vector<long>& nminus);

// Rank-4 lattice in B with canonical basis: integer row HNF over a common
// denominator, normalized so gcd(content, den) = 1.
struct QLattice {
  QuatAlg alg;
  MatZ rows;  // 4x4, row HNF, full rank
  Int den = 1;

  static QLattice from_quats(const QuatAlg& A, const std::vector<Quat>& gens);
  std::vector<Quat> basis() const;
  Quat element(const VecZ& c) const;    // c . rows / den
  VecQ coords_q(const Quat& q) const;   // exact rational coordinates
  bool contains(const Quat& q) const;
  Int index_in(const QLattice& sup) const;  // [sup : this]
  bool operator==(const QLattice&) const = default;
};

// Multiplicatively closed lattice containing 1.
struct Order {
  QLattice L;
  Int reduced_disc() const;
  bool contains(const Quat& q) const { return L.contains(q); }
  const QuatAlg& alg() const { return L.alg; }
};

// Smallest order whose lattice contains the generators; fails if the
// generated ring is not integral (lattice keeps growing).
Order order_closure(const QuatAlg& A, std::vector<Quat> gens);
Order maximal_order(const QuatAlg& A);
// Intersection of the maximal order with the right order of a rank-one left
// ideal at each ell | nplus (squarefree, coprime to the discriminant).
Order eichler_order(const Order& omax, long nplus);

// All lattice elements of the given reduced norm, up to sign (first nonzero
// coordinate in the lattice basis is positive). Exact Fincke-Pohst.
std::vector<Quat> lattice_by_norm(const QLattice& L, const Int& target);
// Same over the Z-span of independent vectors (rank may be below 4, e.g. a
// trace-zero sublattice).
std::vector<Quat> span_by_norm(const QuatAlg& A, const std::vector<Quat>& basis,
                               const Int& target);

// ---------------------------------------------------------------------------
// Orientation at ell | N^-: the quotient of O/ell by the radical of the
// trace pairing is F_{ell^2}; elements are written against the canonical
// basis (1, s) with s^2 = r for the least positive nonresidue r (ell odd),
// or against (1, w) with w^2 + w + 1 = 0 (ell = 2). The choice between the
// two conjugate quotient maps is pinned by a deterministic normalization.
class OrientationRam {
 public:
  OrientationRam(const Order& O, long ell);
  long ell() const { return ell_; }
  long nonresidue() const { return r_; }
  // image (alpha, beta): u mapsto alpha + beta * s
  std::pair<long, long> image(const Quat& u) const;
  // multiplication in the residue field, for tests and root comparisons
  std::pair<long, long> fmul(std::pair<long, long> a, std::pair<long, long> b) const;
  // canonical square root of n (a nonresidue mod ell) as (0, beta) form
  std::pair<long, long> sqrt_of(long n) const;

 private:
  long ell_, r_;
  Order O_;
  MatZ solve_;  // 4x4, invertible mod ell: columns 1, s-preimage, radical
};

// Orientation at ell | N^+: ring homomorphism E -> F_ell (the lex-least of
// the exactly two).
class OrientationSplit {
 public:
  OrientationSplit(const Order& E, long ell);
  long ell() const { return ell_; }
  long image(const Quat& u) const;
  const std::vector<long>& basis_images() const { return phi_; }
  const std::vector<long>& other_basis_images() const { return phi_other_; }

 private:
  long ell_;
  Order E_;
  std::vector<long> phi_, phi_other_;
};

// ---------------------------------------------------------------------------
// Splitting iota: O tensor Z_p -> M_2(Z/p^N), for p coprime to disc(O).
// Matrices are stored row-major (m00, m01, m10, m11) with entries mod p^N.
class SplittingMap {
 public:
  SplittingMap(const Order& O, long p, long N);
  long p() const { return p_; }
  long N() const { return N_; }
  const Int& modulus() const { return pN_; }
  // u must have p-integral coordinates in the order basis
  std::array<Int, 4> image(const Quat& u) const;

 private:
  const Order O_;
  long p_, N_;
  Int pN_;
  std::array<std::array<Int, 4>, 4> img_;  // image of each basis vector
};

}  // namespace aclp
