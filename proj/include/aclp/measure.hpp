#pragma once

// The boundary measure attached to a weight-2 harmonic cocycle, together
// with additive and multiplicative Riemann integration over coverings of
// P^1(Q_p) by the end-balls of tree edges at a chosen level.
//
// A covering ball is reached by a descending slot word from the base
// vertex. Backtracking rules force every word into the shape
// (polar step)^k (affine digits s_1 ... s_j), so a ball is either
//   U = p^(-k) (b + p^j Z_p)          with b = s_1 + s_2 p + ... (j >= 1),
// or the polar ball { v(t) <= -k } plus the point at infinity (j = 0).
// Sample centers truncate the Teichmuller digit expansion, kept as exact
// projective pairs so the point at infinity needs no special handling.

#include <functional>
#include <vector>

#include "aclp/bttree.hpp"
#include "aclp/padic.hpp"

namespace aclp {

struct CoverBall {
  long k = 0;      // leading polar steps
  long j = 0;      // affine digits; k + j = covering level
  Int b;           // 0 <= b < p^j, unit mod p when k > 0
  Int sx, sy;      // sample center as a projective pair (x : y)
  Int mu;          // measure of the ball
  long edge = -1;  // oriented class of the edge behind the ball
};

class EdgeMeasure {
 public:
  // values indexed by unoriented edge class; must be a harmonic cocycle
  EdgeMeasure(const QuotientGraph& G, VecZ values);

  const QuotientGraph& graph() const { return *G_; }
  const BTContext& ctx() const { return G_->ctx(); }
  // measure of the end-ball behind an oriented edge class
  const Int& mu_oriented(long e) const { return oriented_[e]; }

  // deterministic depth-first enumeration of the level-m covering
  void cover(long m, const std::function<void(const CoverBall&)>& visit) const;

 private:
  const QuotientGraph* G_;
  VecZ vals_;
  std::vector<Int> oriented_;
};

// A Riemann sum or product together with the covering truncation bound:
// the result differs from the limit by an error of doubled valuation at
// least err2v. Interval precision of the samples is carried in value.
struct Integral {
  Padic value;
  long err2v = 0;
  // value widened so the ball absorbs the truncation error
  Padic certified() const;
};

// integrand sampled at ball centers; called concurrently by the parallel
// kernels, so it must be pure
using Integrand = std::function<Padic(const CoverBall&)>;

// additive: sum of f(center) mu(U); err2v is the generic bound 2m
Integral integrate_serial(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m);
Integral integrate(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m);

// multiplicative: product of f(center)^mu(U); samples must be nonzero
Integral mult_integrate_serial(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f,
                               long m);
Integral mult_integrate(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m);

// Certificate primitive shared by the line integrals: for points a, s in
// the ball { (M00 t + M01 : M10 t + M11), t in Z_p }, a rigorous lower
// bound on 2v of ((a - z2)(s - z1)) / ((a - z1)(s - z2)) - 1. Computed by
// pulling z1, z2 back through M, where distances to Z_p have constant
// w-coordinate.
long line_ball_cert(const Mat2& M, const Padic& z1, const Padic& z2);

// doubled valuation kept by log(1 + delta) given 2v(delta) >= E2v; only
// p = 2 can lose digits
long log_tail_2v(long p, long E2v);

// integral of log((a - z2)/(a - z1)) d mu(a) over P^1(Q_p) on the given
// branch; z1, z2 must lie outside Q_p in a quadratic extension. The
// certificate is sharpened ball by ball from the distance of the ball to
// z1 and z2.
Integral coleman_line_integral_serial(const EdgeMeasure& mu, const Padic& z1, const Padic& z2,
                                      long m, const LogBranch& br);
Integral coleman_line_integral(const EdgeMeasure& mu, const Padic& z1, const Padic& z2, long m,
                               const LogBranch& br);

// multiplicative counterpart: product over balls of ((a - z2)/(a - z1))^mu
Integral mult_line_integral_serial(const EdgeMeasure& mu, const Padic& z1, const Padic& z2,
                                   long m);
Integral mult_line_integral(const EdgeMeasure& mu, const Padic& z1, const Padic& z2, long m);

}  // namespace aclp
