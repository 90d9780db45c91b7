#include "aclp/padic.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace aclp {

namespace {

constexpr const char* kMod = "padic";

Int ppow(long p, long k) {
  require(k >= 0 && k < (1L << 26), kMod, "power out of sane range");
  return pow_int(p, k);
}

// prec addition with the exact sentinel absorbing.
long padd(long a, long b) {
  if (a >= kPrecInf || b >= kPrecInf) return kPrecInf;
  long s = a + b;
  return clamp_prec(s);
}

long ceil_half(long t) { return (t % 2 == 0) ? t / 2 : (t + 1) / 2; }

Coord czero(long prec) {
  Coord c;
  c.zero = true;
  c.v = 0;
  c.u = 0;
  c.prec = clamp_prec(prec);
  return c;
}

// Value p^v * raw, known modulo p^prec. raw may be any integer.
Coord cmake(long p, long v, const Int& raw, long prec) {
  prec = clamp_prec(prec);
  if (prec >= kPrecInf) {
    if (raw == 0) return czero(kPrecInf);
    long dv = val_p(raw, p);
    Coord c;
    c.zero = false;
    c.v = v + dv;
    c.u = raw / ppow(p, dv);
    c.prec = kPrecInf;
    return c;
  }
  if (v >= prec) return czero(prec);
  Int r = mod_pos(raw, ppow(p, prec - v));
  if (r == 0) return czero(prec);
  long dv = val_p(r, p);
  Coord c;
  c.zero = false;
  c.v = v + dv;
  c.u = r / ppow(p, dv);
  c.prec = prec;
  return c;
}

Coord ctrunc(const Coord& c, long p, long nprec) {
  long n = std::min(clamp_prec(nprec), c.prec);
  if (c.zero) return czero(n);
  if (n >= kPrecInf) return c;
  if (c.v >= n) return czero(n);
  Coord r = c;
  r.prec = n;
  r.u = mod_pos(c.u, ppow(p, n - c.v));
  return r;  // unit mod p^k stays a unit for k >= 1
}

Coord cneg(const Coord& c, long p) {
  if (c.zero) return c;
  Coord r = c;
  r.u = (c.prec >= kPrecInf) ? Int(-c.u) : Int(ppow(p, c.prec - c.v) - c.u);
  return r;
}

Coord cadd(const Coord& x, const Coord& y, long p) {
  if (x.zero && y.zero) return czero(std::min(x.prec, y.prec));
  if (x.zero) return ctrunc(y, p, x.prec);
  if (y.zero) return ctrunc(x, p, y.prec);
  long n = std::min(x.prec, y.prec);
  long v0 = std::min(x.v, y.v);
  Int raw = x.u * ppow(p, x.v - v0) + y.u * ppow(p, y.v - v0);
  return cmake(p, v0, raw, n);
}

Coord cmul(const Coord& x, const Coord& y, long p) {
  if (x.zero && y.zero) return czero(padd(x.prec, y.prec));
  if (x.zero) return czero(padd(x.prec, y.v));
  if (y.zero) return czero(padd(y.prec, x.v));
  long v = x.v + y.v;
  long n = std::min(padd(x.prec, y.v), padd(y.prec, x.v));
  Int u = x.u * y.u;
  if (n < kPrecInf) u = mod_pos(u, ppow(p, n - v));
  Coord r;
  r.zero = false;
  r.v = v;
  r.u = u;
  r.prec = n;
  return r;
}

Coord cmul_rat(const Coord& c, const Rat& q, long p) {
  if (q == 0) return czero(kPrecInf);
  Int num = q.get_num(), den = q.get_den();
  long vq = val_p(num, p) - val_p(den, p);
  num /= ppow(p, val_p(num, p));
  den /= ppow(p, val_p(den, p));
  if (c.zero) return czero(padd(c.prec, vq));
  Coord r;
  r.zero = false;
  r.v = c.v + vq;
  r.prec = padd(c.prec, vq);
  if (r.prec >= kPrecInf) {
    Int t = c.u * num;
    require(mpz_divisible_p(t.get_mpz_t(), den.get_mpz_t()) != 0, kMod,
            "exact coordinate not divisible; truncate before dividing");
    r.u = t / den;
  } else {
    Int m = ppow(p, r.prec - r.v);
    r.u = mod_pos(c.u * num * inv_mod(den, m), m);
  }
  return r;
}

Coord cinv(const Coord& c, long p) {
  if (c.zero) fail(ErrKind::precision, kMod, "inverse of a value indistinguishable from zero");
  Coord r;
  r.zero = false;
  r.v = -c.v;
  if (c.prec >= kPrecInf) {
    require(c.u == 1 || c.u == -1, kMod, "inverse of exact value needs a precision cap");
    r.u = c.u;
    r.prec = kPrecInf;
    return r;
  }
  r.prec = c.prec - 2 * c.v;
  r.u = inv_mod(c.u, ppow(p, c.prec - c.v));
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// FieldTag

FieldTag FieldTag::base(long p) {
  require(p >= 2 && is_prime(p), kMod, "base: p must be prime");
  return FieldTag{p, Ext::none, 0};
}

FieldTag FieldTag::quadratic(long p, long d) {
  require(p >= 2 && is_prime(p), kMod, "quadratic: p must be prime");
  require(d != 0 && d != 1 && is_squarefree(d), kMod, "quadratic: d must be squarefree, not 0/1");
  long vd = val_p(Int(d), p);
  require(vd <= 1, kMod, "quadratic: d not squarefree at p");
  if (vd == 1) return FieldTag{p, Ext::ramified, d};
  if (p == 2) {
    long r = ((d % 8) + 8) % 8;
    if (r == 3 || r == 7) return FieldTag{p, Ext::ramified, d};
    if (r == 5) return FieldTag{p, Ext::unramified, d};
    fail(ErrKind::hypothesis, kMod, "quadratic: d = 1 mod 8 is split at 2");
  }
  int chi = kronecker(d, p);
  if (chi == -1) return FieldTag{p, Ext::unramified, d};
  fail(ErrKind::hypothesis, kMod, "quadratic: d is a square mod p, extension splits");
}

long FieldTag::twov_w() const {
  if (ext == Ext::none) return 0;
  return val_p(Int(d), p) == 1 ? 1 : 0;
}

Int FieldTag::residue_size() const {
  return ext == Ext::unramified ? Int(p) * p : Int(p);
}

std::string FieldTag::describe() const {
  std::ostringstream os;
  os << "Q" << p;
  if (ext != Ext::none) os << "(w), w^2=" << d << (ext == Ext::ramified ? " (ramified)" : " (unramified)");
  return os.str();
}

// ---------------------------------------------------------------------------
// Construction

Padic Padic::zero(const FieldTag& F) {
  Padic x;
  x.F_ = F;
  return x;
}

Padic Padic::zero_ball(const FieldTag& F, long twoprec) {
  Padic x;
  x.F_ = F;
  x.a_ = czero(ceil_half(twoprec));
  x.b_ = F.base_only() ? czero(kPrecInf) : czero(ceil_half(twoprec - F.twov_w()));
  return x;
}

Padic Padic::from_int(const FieldTag& F, const Int& n, long prec) {
  Padic x;
  x.F_ = F;
  x.a_ = cmake(F.p, 0, n, prec);
  return x;
}

Padic Padic::from_rat(const FieldTag& F, const Rat& x, long prec) {
  Padic r;
  r.F_ = F;
  r.a_ = cmul_rat(cmake(F.p, 0, 1, prec), x, F.p);
  return r;
}

Padic Padic::from_coords(const FieldTag& F, Coord a, Coord b) {
  require(F.base_only() ? (b.zero && b.prec >= kPrecInf) : true, kMod,
          "from_coords: base field has no w-coordinate");
  Padic x;
  x.F_ = F;
  x.a_ = std::move(a);
  x.b_ = std::move(b);
  return x;
}

Padic Padic::from_val_unit(const FieldTag& F, long v, const Int& u, long prec) {
  Padic x;
  x.F_ = F;
  x.a_ = cmake(F.p, v, u, prec);
  return x;
}

Padic Padic::gen(const FieldTag& F, long prec) {
  require(!F.base_only(), kMod, "gen: base field has no w");
  Padic x;
  x.F_ = F;
  x.b_ = cmake(F.p, 0, 1, prec);
  return x;
}

Padic Padic::one(const FieldTag& F) { return from_int(F, 1, kPrecInf); }

bool Padic::base_coord_only() const { return b_.zero; }

// ---------------------------------------------------------------------------
// Precision and valuation

long Padic::twoprec() const {
  long pa = clamp_prec(2 * std::min(a_.prec, kPrecInf / 2));
  if (F_.base_only()) return pa;
  long pb = padd(clamp_prec(2 * std::min(b_.prec, kPrecInf / 2)), F_.twov_w());
  return std::min(pa, pb);
}

std::optional<long> Padic::twoval() const {
  long tw = F_.twov_w();
  bool za = a_.zero, zb = b_.zero || F_.base_only();
  long A = 2 * std::min(za ? a_.prec : a_.v, kPrecInf / 2);
  long B = 2 * std::min((b_.zero ? b_.prec : b_.v), kPrecInf / 2) + tw;
  if (za && zb) return std::nullopt;
  if (za) return (B < A) ? std::optional<long>(B) : std::nullopt;
  if (zb) return (A < B) ? std::optional<long>(A) : std::nullopt;
  if (A != B) return std::min(A, B);
  if (F_.ext == Ext::unramified) return A;  // residues independent, min exact
  // ramified with unit w (p = 2, d = 3 mod 4): ties resolve through the norm
  Padic N = norm();
  if (N.a_.zero) return std::nullopt;
  return N.a_.v;  // 2 v_K(x) = v_p(norm)
}

long Padic::twoval_known() const {
  auto t = twoval();
  if (!t) fail(ErrKind::precision, kMod, "valuation not determined at current precision");
  return *t;
}

long Padic::lower_2v() const {
  long tw = F_.twov_w();
  long A = 2 * std::min(a_.zero ? a_.prec : a_.v, kPrecInf / 2);
  if (F_.base_only()) return A;
  long B = 2 * std::min(b_.zero ? b_.prec : b_.v, kPrecInf / 2) + tw;
  return std::min(A, B);
}

Padic Padic::truncated(long twoprec) const {
  Padic x = *this;
  x.a_ = ctrunc(a_, F_.p, ceil_half(twoprec));
  if (!F_.base_only()) x.b_ = ctrunc(b_, F_.p, ceil_half(twoprec - F_.twov_w()));
  return x;
}

bool Padic::agrees(const Padic& y, long twotol) const {
  return (*this - y).lower_2v() >= twotol;
}

// ---------------------------------------------------------------------------
// Ring operations

Padic Padic::operator-() const {
  Padic x = *this;
  x.a_ = cneg(a_, F_.p);
  x.b_ = cneg(b_, F_.p);
  return x;
}

Padic Padic::operator+(const Padic& y) const {
  require(F_ == y.F_, kMod, "field mismatch in +");
  Padic r;
  r.F_ = F_;
  r.a_ = cadd(a_, y.a_, F_.p);
  r.b_ = F_.base_only() ? czero(kPrecInf) : cadd(b_, y.b_, F_.p);
  return r;
}

Padic Padic::operator-(const Padic& y) const { return *this + (-y); }

Padic Padic::operator*(const Padic& y) const {
  require(F_ == y.F_, kMod, "field mismatch in *");
  long p = F_.p;
  Padic r;
  r.F_ = F_;
  if (F_.base_only()) {
    r.a_ = cmul(a_, y.a_, p);
    return r;
  }
  Rat d(F_.d);
  r.a_ = cadd(cmul(a_, y.a_, p), cmul_rat(cmul(b_, y.b_, p), d, p), p);
  r.b_ = cadd(cmul(a_, y.b_, p), cmul(b_, y.a_, p), p);
  return r;
}

Padic Padic::conj() const {
  Padic x = *this;
  x.b_ = cneg(b_, F_.p);
  return x;
}

Padic Padic::norm() const {
  long p = F_.p;
  Padic r;
  r.F_ = F_;
  if (F_.base_only()) {
    r.a_ = cmul(a_, a_, p);
    return r;
  }
  r.a_ = cadd(cmul(a_, a_, p), cmul_rat(cmul(b_, b_, p), Rat(-F_.d), p), p);
  r.b_ = czero(kPrecInf);
  return r;
}

Padic Padic::trace() const {
  Padic r;
  r.F_ = F_;
  r.a_ = cmul_rat(a_, Rat(2), F_.p);
  r.b_ = czero(kPrecInf);
  return r;
}

Padic Padic::inv() const {
  long p = F_.p;
  if (F_.base_only() || (b_.zero && b_.prec >= kPrecInf)) {
    Padic r;
    r.F_ = F_;
    r.a_ = cinv(a_, p);
    r.b_ = b_;
    return r;
  }
  Padic N = norm();
  if (N.a_.zero) fail(ErrKind::precision, kMod, "inverse: norm indistinguishable from zero");
  Coord ni = cinv(N.a_, p);
  Padic r;
  r.F_ = F_;
  r.a_ = cmul(a_, ni, p);
  r.b_ = cmul(cneg(b_, p), ni, p);
  return r;
}

Padic Padic::operator/(const Padic& y) const { return *this * y.inv(); }

Padic Padic::mul_rat(const Rat& k) const {
  Padic r = *this;
  r.a_ = cmul_rat(a_, k, F_.p);
  r.b_ = cmul_rat(b_, k, F_.p);
  return r;
}

Padic Padic::mul_int(const Int& k) const { return mul_rat(Rat(k)); }
Padic Padic::div_int(const Int& k) const {
  require(k != 0, kMod, "division by zero integer");
  return mul_rat(Rat(1) / Rat(k));
}

Padic Padic::pow(const Int& e) const {
  require(e >= 0, kMod, "pow: nonnegative exponents only");
  Padic acc = one(F_), base = *this;
  Int k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) acc = acc * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Analytic functions

Int teichmuller_int(const Int& a, long p, long n) {
  Int m = pow_int(p, n);
  Int x = mod_pos(a, m);
  if (mod_pos(x, Int(p)) == 0) return 0;
  for (long i = 0; i < n + 64; ++i) {
    Int y = pow_mod(x, Int(p), m);
    if (y == x) return x;
    x = y;
  }
  fail(ErrKind::invariant, kMod, "teichmuller_int did not stabilize");
}

Padic Padic::teichmuller() const {
  long t = twoval_known();
  require(t == 0, kMod, "teichmuller: unit expected");
  require(twoprec() < kPrecInf, kMod, "teichmuller: cap precision first");
  if (F_.ext != Ext::unramified) {
    // Residue field is F_p; the lift lives in the base coordinate.
    long n = std::min(a_.prec, ceil_half(twoprec()) + 4);
    Int rep;
    if (F_.ext == Ext::ramified && F_.twov_w() == 0) {
      // p = 2, w a unit with residue 1: residue of x is a + b mod 2.
      rep = mod_pos((a_.zero ? Int(0) : a_.u) + (b_.zero ? Int(0) : b_.u), Int(2));
      n = ceil_half(twoprec());
    } else {
      rep = a_.u;
    }
    Padic r;
    r.F_ = F_;
    r.a_ = cmake(F_.p, 0, teichmuller_int(rep, F_.p, n), n);
    r.b_ = czero(kPrecInf);
    return r;
  }
  // Unramified: iterate x -> x^q; contracts one digit per round.
  Int q = F_.residue_size();
  long rounds = twoprec() / 2 + 8;
  Padic x = *this;
  for (long i = 0; i < rounds; ++i) x = x.pow(q);
  require(x.agrees(x.pow(q), x.twoprec() - 2), kMod, "teichmuller iteration unstable");
  return x;
}

namespace {

// Lower bound for min over m >= N of m*tv2 - 2*v_p(m) (doubled valuations).
long tail_min_2val(long tv2, long N, long p) {
  require(tv2 >= 1 && N >= 1, kMod, "tail bound needs positive valuation");
  long best = LONG_MAX;
  Int pk = 1;
  for (long k = 0; k < 128; ++k) {
    // values with v_p(m) = k start at p^k
    Int lo = pk < N ? Int(N) : pk;
    if (lo > (LONG_MAX / (tv2 + 1)) / 4) break;
    long cand = lo.get_si() * tv2 - 2 * k;
    if (cand < best) best = cand;
    // once p^k alone clears every earlier candidate, later k only grow
    if (pk >= N && cand > best + 4 && pk.get_si() * (p - 1) * tv2 > 4) break;
    pk *= p;
  }
  return best;
}

// log(1 + t) for 2v(t) >= 1.
Padic log1p_series(const Padic& t) {
  const FieldTag& F = t.field();
  if (t.is_zero_ball()) return Padic::zero_ball(F, t.twoprec());
  long tvl = t.lower_2v();
  if (tvl < 1) fail(ErrKind::precision, kMod, "log: argument not a principal unit to working precision");
  long T2 = t.twoprec();
  Padic sum = t, tpow = t;
  for (long n = 2;; ++n) {
    if (tail_min_2val(tvl, n, F.p) >= T2 + 1) break;
    tpow = tpow * t;
    Padic term = tpow.div_int(Int(n));
    sum = (n % 2 == 0) ? sum - term : sum + term;
    require(n < 500000, kMod, "log series did not converge");
  }
  return sum;
}

// log on the branch log(p) = 0 of a unit (2v = 0).
Padic log0_unit(const Padic& y) {
  const FieldTag& F = y.field();
  Int qm1 = F.residue_size() - 1;
  Padic z = y.pow(qm1);
  Padic s = log1p_series(z - Padic::one(F));
  return s.div_int(qm1);
}

}  // namespace

Padic Padic::log0() const { return LogBranch::iwasawa(F_)(*this); }

LogBranch LogBranch::iwasawa(const FieldTag& F) { return LogBranch{Padic::zero(F)}; }

LogBranch LogBranch::from_period(const Padic& q) {
  require(q.base_coord_only(), kMod, "log branch: period must lie in the base field");
  long t = q.twoval_known();
  require(t >= 2 && t % 2 == 0, kMod, "log branch: period must have positive integer valuation");
  long v = t / 2;
  Padic y = q.mul_rat(Rat(1) / Rat(pow_int(q.field().p, v)));
  Padic lp = log0_unit(y).mul_rat(Rat(-1) / Rat(v));
  return LogBranch{lp};
}

Padic LogBranch::operator()(const Padic& x) const {
  const FieldTag& F = x.field();
  long p = F.p;
  long t = x.twoval_known();
  long T2 = x.twoprec();
  require(T2 < kPrecInf, kMod, "log: cap the precision of the argument first");
  // Coerce the branch constant into the field of x when it lives downstairs.
  Padic lp = logp;
  if (!(lp.field() == F)) {
    require(lp.field().base_only() && lp.field().p == p, kMod, "log branch: field mismatch");
    lp = Padic::from_coords(F, lp.ca(), Coord{});
  }
  // x = pi^eps * p^k * y with y a unit; log(x) = k log(p) + eps log(pi) + log0(y)
  long eps = ((t % 2) + 2) % 2;
  require(eps == 0 || F.ext == Ext::ramified, kMod, "odd valuation outside a ramified extension");
  Padic xs = x;
  Padic logpi = Padic::zero(F);
  if (eps) {
    long capn = ceil_half(T2) + 8;
    if (F.twov_w() == 1) {
      // pi = w, pi^2 = d = p * d'
      Padic dd = Padic::from_int(F, Int(F.d) / p, capn);
      logpi = (lp + log0_unit(dd)).div_int(2);
      xs = x / Padic::gen(F, capn);
    } else {
      // p = 2, w a unit: pi = 1 + w, pi^2 = 2 * ((1 + d)/2 + w)
      Padic pi = Padic::one(F) + Padic::gen(F, capn);
      Padic u = (pi * pi).mul_rat(Rat(1, 2));
      logpi = (lp + log0_unit(u)).div_int(2);
      xs = x / pi;
    }
  }
  long k = (t - eps) / 2;
  Padic y = (k == 0) ? xs : xs.mul_rat(Rat(1) / Rat(pow_int(p, k)));
  Padic out = log0_unit(y);
  if (eps) out = out + logpi;
  if (k != 0) out = out + lp.mul_int(Int(k));
  return out;
}

Padic Padic::exp_p() const {
  const FieldTag& F = F_;
  long p = F.p;
  long tv = lower_2v();
  if (tv * (p - 1) <= 2) fail(ErrKind::hypothesis, kMod, "exp: argument outside the convergence disk");
  long T2 = twoprec();
  // 2v(x^m / m!) >= m*(tv - 2/(p-1)) + 2/(p-1); solve for the cutoff.
  long num = (T2 + 1) * (p - 1) - 2;
  long den = tv * (p - 1) - 2;
  long mstar = num / den + 2;
  Padic sum = one(F) + *this;
  Padic term = *this;
  for (long m = 2; m <= mstar; ++m) {
    term = (term * *this).div_int(Int(m));
    sum = sum + term;
  }
  return sum;
}

Padic Padic::sqrt_base() const {
  require(b_.zero && b_.prec >= kPrecInf, kMod, "sqrt: base-coordinate values only");
  long p = F_.p;
  if (a_.zero) {
    if (a_.prec >= kPrecInf) return *this;  // exact 0
    fail(ErrKind::precision, kMod, "sqrt of a value indistinguishable from zero");
  }
  if (a_.v % 2 != 0) fail(ErrKind::hypothesis, kMod, "sqrt: odd valuation is not a square");
  long k = a_.v / 2;
  if (a_.prec >= kPrecInf) {
    require(a_.u > 0 && is_perfect_square(a_.u), kMod, "sqrt: exact value needs a precision cap");
    Padic r;
    r.F_ = F_;
    r.a_ = cmake(p, k, isqrt(a_.u), kPrecInf);
    return r;
  }
  long m = a_.prec - a_.v;
  Int r;
  long rprec;
  if (p == 2) {
    if (mod_pos(a_.u, Int(8)) != 1) fail(ErrKind::hypothesis, kMod, "sqrt: unit not 1 mod 8");
    require(m > 3, kMod, "sqrt: not enough digits");
    r = sqrt_mod_2k(a_.u, m);
    rprec = k + m - 1;
  } else {
    if (mpz_legendre(Int(mod_pos(a_.u, Int(p))).get_mpz_t(), Int(p).get_mpz_t()) != 1)
      fail(ErrKind::hypothesis, kMod, "sqrt: unit is a nonresidue");
    r = sqrt_mod_pk_odd(a_.u, p, m);
    if (mod_pos(r, Int(p)) > p / 2) r = ppow(p, m) - r;
    rprec = k + m;
  }
  Padic out;
  out.F_ = F_;
  out.a_ = cmake(p, k, r, rprec);
  return out;
}

// ---------------------------------------------------------------------------
// Rendering and serialization

namespace {

std::string coord_str(const Coord& c, long p) {
  std::ostringstream os;
  if (c.zero) {
    if (c.prec >= kPrecInf) return "0";
    os << "O(" << p << "^" << c.prec << ")";
    return os.str();
  }
  if (c.prec >= kPrecInf) {
    if (c.v != 0) os << p << "^" << c.v << "*";
    os << c.u;
    return os.str();
  }
  os << p << "^" << c.v << "*[";
  Int u = c.u;
  long k = c.prec - c.v;
  for (long i = 0; i < k && i < 16; ++i) {
    if (i) os << " ";
    os << mod_pos(u, Int(p));
    u /= p;
  }
  if (k > 16) os << " ..";
  os << "] + O(" << p << "^" << c.prec << ")";
  return os.str();
}

void coord_ser(std::ostream& os, const Coord& c, long p) {
  if (c.zero) {
    os << "z ";
    if (c.prec >= kPrecInf)
      os << "inf";
    else
      os << c.prec;
    return;
  }
  if (c.prec >= kPrecInf) {
    os << "e " << c.v << " " << c.u;
    return;
  }
  os << "n " << c.v << " " << c.prec;
  Int u = c.u;
  for (long i = 0; i < c.prec - c.v; ++i) {
    os << " " << mod_pos(u, Int(p));
    u /= p;
  }
}

Coord coord_de(std::istream& is, long p) {
  std::string kind;
  is >> kind;
  if (kind == "z") {
    std::string tok;
    is >> tok;
    return czero(tok == "inf" ? kPrecInf : std::stol(tok));
  }
  if (kind == "e") {
    long v;
    std::string u;
    is >> v >> u;
    return cmake(p, v, Int(u), kPrecInf);
  }
  require(kind == "n", kMod, "deserialize: bad coordinate tag");
  long v, prec;
  is >> v >> prec;
  Int u = 0, pw = 1;
  for (long i = 0; i < prec - v; ++i) {
    long dig;
    is >> dig;
    u += pw * dig;
    pw *= p;
  }
  return cmake(p, v, u, prec);
}

}  // namespace

std::string Padic::str() const {
  if (F_.base_only()) return coord_str(a_, F_.p);
  return "(" + coord_str(a_, F_.p) + ") + (" + coord_str(b_, F_.p) + ")*w";
}

std::string Padic::serialize() const {
  std::ostringstream os;
  os << "P " << F_.p << " " << static_cast<int>(F_.ext) << " " << F_.d << " ";
  coord_ser(os, a_, F_.p);
  os << " ";
  coord_ser(os, b_, F_.p);
  return os.str();
}

Padic Padic::deserialize(const std::string& line) {
  std::istringstream is(line);
  std::string tag;
  long p, d;
  int e;
  is >> tag >> p >> e >> d;
  require(tag == "P" && is.good(), kMod, "deserialize: bad header");
  Padic x;
  x.F_ = FieldTag{p, static_cast<Ext>(e), d};
  x.a_ = coord_de(is, p);
  x.b_ = coord_de(is, p);
  return x;
}

// ---------------------------------------------------------------------------
// Teichmuller ball centers

TeichCenters::TeichCenters(long p, long n) : p_(p), n_(n), pn_(pow_int(p, n)) {
  tau_.reserve(static_cast<size_t>(p));
  for (long r = 0; r < p; ++r) tau_.push_back(teichmuller_int(Int(r), p, n));
}

Int TeichCenters::center(const Int& a, long m) const {
  require(m >= 0 && m <= n_, kMod, "teich center: level exceeds table precision");
  Int c = 0, pw = 1, cur = mod_pos(a, pn_);
  for (long i = 0; i < m; ++i) {
    long r = Int(mod_pos(cur, Int(p_))).get_si();
    c += pw * tau_[static_cast<size_t>(r)];
    cur = mod_pos(cur - tau_[static_cast<size_t>(r)], pn_) / p_;
    pw *= p_;
  }
  return mod_pos(c, pn_);
}

}  // namespace aclp
