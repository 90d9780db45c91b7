#pragma once

// Oriented optimal embeddings of the p-integral quadratic order O_K[1/p],
// p ramified in K, into the p-arithmetic quaternion order behind a quotient
// graph. Every class fixes one edge of the tree; the attached norm-one
// torus acts on P^1(Q_p) with conjugate fixed points z, zbar off the
// rational line, and functions on the torus quotient are integrated
// against an edge measure through the boundary chart
//   eta(alpha) = (alpha z - zbar)/(alpha - 1).
//
// Classes are taken under conjugation by units of even norm valuation, so
// they come in two parity orbits of equal size; the class group modulo the
// ramified prime above p translates each orbit simply transitively.

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "aclp/bttree.hpp"
#include "aclp/measure.hpp"
#include "aclp/quadfield.hpp"
#include "aclp/quaternion.hpp"

namespace aclp {

// One class, pinned by the image u of sqrt(D): trd(u) = 0 and u^2 = D
// exactly, with scale the least k putting p^k u in the Z-order.
struct Embedding {
  Quat u;
  long scale = 0;
  VertexM ve, vo;     // fixed-edge endpoints, even / odd determinant valuation
  long slot_ev = -1;  // slot at ve whose child is vo
  long slot_ov = -1;  // slot at vo whose child is ve
  long rep_e = -1, rep_o = -1;  // quotient classes of ve, vo
  Quat glue_e, glue_o;          // carry ve, vo onto those representatives
};

// Covering ball of P^1(Q_p) seeded below the fixed edge. The points of the
// ball are (M00 t + M01 : M10 t + M11) for t in Z_p; (sx : sy) is the
// sample, mu the measure of the ball.
struct DomainBall {
  Mat2 M{Int(1), Int(0), Int(0), Int(1)};
  Int sx = 0, sy = 1;
  Int mu = 0;
  long edge = -1;
};

class EmbeddingSystem {
 public:
  // Enumerates every class over the graph's order. Each prime ramified in
  // the algebra must be inert in K and each prime of the split level must
  // split (hypothesis error otherwise); the field prime must match the
  // tree prime.
  EmbeddingSystem(const QuotientGraph& G, const FieldData& K);

  const QuotientGraph& graph() const { return *G_; }
  const FieldData& field() const { return K_; }
  const AnticycQuotient& delta() const { return delta_; }
  // 2 exactly when the prime-ideal class above p has odd order: some odd
  // power of the ideal is then principal and its generator is a norm-one
  // unit of O_K[1/p] acting as -1 on the torus; 1 otherwise
  long kernel_order() const { return kernel_; }

  // enumerated classes at the fixed orientation, 2 * delta().size() /
  // kernel_order() of them, plus one appended diagnostic entry when the
  // coset orbit already exhausts them (see other_orbit_rep)
  const std::vector<Embedding>& classes() const { return classes_; }
  // one coset orbit as indices into classes(), ordered against the labels:
  // system()[i] is the translate of system()[0] by the inverse of coset i
  const std::vector<long>& system() const { return sys_; }
  // index of a diagnostic class outside the system orbit: a second-orbit
  // member when one exists, otherwise the conjugate of the base class
  // (negated root, fixed points swapped)
  long other_orbit_rep() const { return other_; }

  // fixed points (z, conj z) on P^1 at the context precision; z is the
  // choice with eigenvalue +f p^scale w against the distinguished root w
  std::pair<Padic, Padic> fixed_points(const Embedding& e) const;

  // index of the translate of a class by the ideal class of the form
  long delta_action(long cls, const Form& sigma) const;

  // conjugacy of two sqrt(D) images under units of even norm valuation
  bool same_class(const Quat& u1, const Quat& u2) const;

  // class data rebuilt from g^(-1) u g; g must be an invertible element of
  // even norm valuation
  Embedding conjugated(const Embedding& e, const Quat& g) const;

  // scalar multiple (c2, c1, c0) of the quadratic form c2 x^2 + c1 x + c0
  // vanishing at the fixed points. The weight-k factor of an integrand is
  // this form to the power (k - 2)/2, identically one at weight two.
  std::array<Padic, 3> twist_form(const Embedding& e) const;

  // depth-m covering of P^1 by the balls hanging off the fixed edge: every
  // slot at ve and, when the kernel has order 2, every slot at vo except
  // the two slots along the edge itself. The union is all of P^1 and
  // covers the torus quotient kernel_order() times over.
  void domain_cover(const EdgeMeasure& mu, const Embedding& e, long m,
                    const std::function<void(const DomainBall&)>& visit) const;

  // exact seed-level mass of that covering; harmonicity telescopes it to
  // zero, which is the central value of the attached partial L-series
  Int domain_edge_sum(const EdgeMeasure& mu, const Embedding& e) const;

 private:
  const QuotientGraph* G_;
  FieldData K_;
  AnticycQuotient delta_;
  long kernel_ = 1;
  std::vector<Embedding> classes_;
  std::vector<long> sys_;
  long other_ = -1;

  Embedding build(const Quat& u) const;
};

// boundary chart inverse: eta^(-1)(x : y) = (x - zbar y)/(x - z y), exactly
// one at (1 : 0)
Padic eta_inverse(const std::pair<Padic, Padic>& zz, const Int& x, const Int& y);
Padic eta_forward(const std::pair<Padic, Padic>& zz, const Padic& alpha);

// integral over the torus quotient of phi(eta^(-1)(a)) d mu(a): the seeded
// covering sum divided by the kernel order, with the plain covering-level
// certificate of the edge integrals
Integral integrate_on_torus(const EdgeMeasure& mu, const EmbeddingSystem& sys,
                            const Embedding& e,
                            const std::function<Padic(const Padic&)>& phi, long m);

// integral of log(eta^(-1))^n, n >= 1, on the given branch, with the
// per-ball distance certificate of the line integrals; n = 1 is the
// s-derivative kernel of the attached L-series
Integral log_moment_on_torus(const EdgeMeasure& mu, const EmbeddingSystem& sys,
                             const Embedding& e, long n, long m, const LogBranch& br);

}  // namespace aclp
