#pragma once

// Ball arithmetic over Q_p and over the quadratic extensions Q_p(w), w^2 = d.
//
// A value x = a + b*w is a pair of coordinate balls. Each coordinate keeps
// (valuation v, unit u, absolute precision prec): the coordinate is known
// modulo p^prec, and nonzero coordinates satisfy 0 < u < p^(prec-v) with
// p not dividing u. Operations propagate precision pessimistically, so every
// digit the library reports is correct; lost cancellation shows up as a
// wider ball, never as a wrong digit.
//
// Valuations on the extension live in (1/2)Z, so the API hands out doubled
// valuations ("2v", plain long) throughout. w is the distinguished square
// root of d; conjugation is b -> -b.

#include <optional>
#include <string>

#include "aclp/util.hpp"

namespace aclp {

enum class Ext : int { none = 0, ramified = 1, unramified = 2 };

// Field descriptor. Legal shapes:
//   ext none:       Q_p, d ignored (0).
//   ext ramified:   v_p(d) = 1 (any p), or p = 2 with odd d = 3 (mod 4).
//   ext unramified: d a unit nonresidue mod p (odd p), or d = 5 (mod 8).
struct FieldTag {
  long p = 0;
  Ext ext = Ext::none;
  long d = 0;

  static FieldTag base(long p);
  // Classifies Q_p(sqrt(d)) for squarefree d; rejects split or degenerate d.
  static FieldTag quadratic(long p, long d);

  bool base_only() const { return ext == Ext::none; }
  long ram_index() const { return ext == Ext::ramified ? 2 : 1; }
  long twov_w() const;       // 2 * v(w)
  Int residue_size() const;  // p, or p^2 for the unramified extension
  std::string describe() const;
  bool operator==(const FieldTag&) const = default;
};

// Absolute precision sentinel for exact values.
inline constexpr long kPrecInf = 1L << 40;
inline long clamp_prec(long n) { return n >= kPrecInf ? kPrecInf : n; }

struct Coord {
  bool zero = true;
  long v = 0;
  Int u = 0;
  long prec = kPrecInf;
};

class Padic {
 public:
  Padic() = default;

  static Padic zero(const FieldTag& F);                    // exact 0
  static Padic zero_ball(const FieldTag& F, long twoprec);
  static Padic from_int(const FieldTag& F, const Int& n, long prec);
  static Padic from_rat(const FieldTag& F, const Rat& x, long prec);
  static Padic from_coords(const FieldTag& F, Coord a, Coord b);
  // Base-field value p^v * u captured at absolute precision prec.
  static Padic from_val_unit(const FieldTag& F, long v, const Int& u, long prec);
  static Padic gen(const FieldTag& F, long prec);          // w
  static Padic one(const FieldTag& F);                     // exact 1

  const FieldTag& field() const { return F_; }
  const Coord& ca() const { return a_; }
  const Coord& cb() const { return b_; }

  bool is_zero_ball() const { return a_.zero && b_.zero; }
  bool base_coord_only() const;  // w-coordinate indistinguishable from 0
  long twoprec() const;          // 2 * absolute precision of the ball
  // Exact doubled valuation when the ball determines it.
  std::optional<long> twoval() const;
  long twoval_known() const;     // throws ErrKind::precision when ambiguous
  long lower_2v() const;         // rigorous lower bound for 2v

  Padic operator-() const;
  Padic operator+(const Padic& y) const;
  Padic operator-(const Padic& y) const;
  Padic operator*(const Padic& y) const;
  Padic operator/(const Padic& y) const;
  Padic inv() const;
  Padic conj() const;
  Padic norm() const;   // x * conj(x), w-coordinate exactly zero
  Padic trace() const;
  Padic mul_int(const Int& k) const;
  Padic div_int(const Int& k) const;
  Padic mul_rat(const Rat& k) const;
  Padic pow(const Int& e) const;          // e >= 0
  Padic truncated(long twoprec) const;    // widen the ball, never sharpen

  // 2v(x - y) >= twotol, i.e. the balls agree to that many half-digits.
  bool agrees(const Padic& y, long twotol) const;

  // Unit root of unity congruent to x; base-coordinate units only.
  Padic teichmuller() const;
  // Logarithm on the branch log(p) = 0; any x with known valuation.
  Padic log0() const;
  // Exponential; requires 2v * (p - 1) > 2.
  Padic exp_p() const;
  // Square root of a base-coordinate value of even valuation. Deterministic
  // sign: unit = 1 (mod 4) at p = 2, unit mod p in [1, (p-1)/2] otherwise.
  Padic sqrt_base() const;

  std::string str() const;
  std::string serialize() const;
  static Padic deserialize(const std::string& line);

 private:
  FieldTag F_;
  Coord a_, b_;
};

// Logarithm branch: a choice of log(p). operator() extends log0 to all of
// K^x accordingly.
struct LogBranch {
  Padic logp;
  static LogBranch iwasawa(const FieldTag& F);
  // The branch killing q: log(q) = 0 for q = p^v * u, v >= 1.
  static LogBranch from_period(const Padic& q);
  Padic operator()(const Padic& x) const;
};

// Teichmuller lift of a mod p, computed mod p^n (0 stays 0).
Int teichmuller_int(const Int& a, long p, long n);

// Canonical representatives of residue balls: the point whose first m digits
// agree with a's Teichmuller digit expansion, computed mod p^n. Positions
// i >= m are zero digits. Table is built once per (p, n).
class TeichCenters {
 public:
  TeichCenters(long p, long n);
  // Center of { x : x = a (mod p^m) }, m <= n.
  Int center(const Int& a, long m) const;
  long p() const { return p_; }
  long n() const { return n_; }

 private:
  long p_, n_;
  Int pn_;
  std::vector<Int> tau_;  // tau_[r] = teichmuller lift of r mod p^n
};

}  // namespace aclp
