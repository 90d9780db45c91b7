#include "aclp/measure.hpp"

#include <algorithm>
#include <exception>

#ifdef ACLP_HAVE_OPENMP
#include <omp.h>
#endif

namespace aclp {

namespace {

constexpr const char* kMod = "measure";
constexpr long kMargin = 8;
constexpr long kNoErr = kPrecInf;

struct WalkState {
  long rep = 0;
  Quat glue{1, 0, 0, 0};
  long k = 0;
  long j = 0;
  Int b = 0;
  long depth = 0;
};

Mat2 chart_matrix(long p, const WalkState& st) {
  return Mat2{pow_int(Int(p), st.j), st.b, Int(0), pow_int(Int(p), st.k)};
}

// slots available for descending: the root sees all p + 1 directions, an
// affine position excludes the polar backtrack slot p, a polar position
// excludes the affine backtrack slot 0
void slot_range(long p, const WalkState& st, long& lo, long& hi) {
  lo = (st.depth > 0 && st.j == 0) ? 1 : 0;
  hi = (st.depth > 0 && st.j > 0) ? p - 1 : p;
}

void fill_sample(const TeichCenters& tc, CoverBall& B) {
  if (B.j > 0) {
    B.sx = tc.center(B.b, B.j);
    B.sy = pow_int(Int(tc.p()), B.k);
  } else {
    B.sx = 1;
    B.sy = 0;
  }
}

void walk_below(const EdgeMeasure& mu, const TeichCenters& tc, const WalkState& st, long m,
                const std::function<void(const CoverBall&)>& visit) {
  const QuotientGraph& G = mu.graph();
  long p = mu.ctx().p();
  long lo, hi;
  slot_range(p, st, lo, hi);
  Mat2 T = chart_matrix(p, st);
  for (long s = lo; s <= hi; ++s) {
    auto ts = G.step(st.rep, st.glue, T, s);
    WalkState ch = st;
    ch.rep = ts.child_rep;
    ch.glue = ts.child_glue;
    ch.depth += 1;
    if (s == p) {
      ch.k += 1;
    } else {
      ch.b += Int(s) * pow_int(Int(p), ch.j);
      ch.j += 1;
    }
    if (ch.depth == m) {
      CoverBall B;
      B.k = ch.k;
      B.j = ch.j;
      B.b = ch.b;
      fill_sample(tc, B);
      B.mu = mu.mu_oriented(ts.edge);
      B.edge = ts.edge;
      visit(B);
    } else {
      walk_below(mu, tc, ch, m, visit);
    }
  }
}

std::vector<WalkState> states_at(const EdgeMeasure& mu, long d0) {
  std::vector<WalkState> out;
  const QuotientGraph& G = mu.graph();
  long p = mu.ctx().p();
  std::function<void(const WalkState&)> go = [&](const WalkState& st) {
    if (st.depth == d0) {
      out.push_back(st);
      return;
    }
    long lo, hi;
    slot_range(p, st, lo, hi);
    Mat2 T = chart_matrix(p, st);
    for (long s = lo; s <= hi; ++s) {
      auto ts = G.step(st.rep, st.glue, T, s);
      WalkState ch = st;
      ch.rep = ts.child_rep;
      ch.glue = ts.child_glue;
      ch.depth += 1;
      if (s == p) {
        ch.k += 1;
      } else {
        ch.b += Int(s) * pow_int(Int(p), ch.j);
        ch.j += 1;
      }
      go(ch);
    }
  };
  go(WalkState{});
  return out;
}

void check_level(const EdgeMeasure& mu, long m) {
  if (m < 1) fail(ErrKind::bad_input, kMod, "covering level must be positive");
  if (m + kMargin >= mu.ctx().prec())
    fail(ErrKind::precision, kMod, "covering level exceeds the context precision");
}

// accumulates one covering ball into (acc, err2v)
using TermFn = std::function<void(const CoverBall&, Padic&, long&)>;

Integral drive(const EdgeMeasure& mu, const Padic& init, long m, bool multiplicative,
               bool parallel, const TermFn& term) {
  check_level(mu, m);
  long p = mu.ctx().p();
  TeichCenters tc(p, m + 1);

  long d0 = std::min<long>(m - 1, p == 2 ? 6 : 4);
  if (!parallel || d0 < 1) {
    Padic acc = init;
    long err = kNoErr;
    walk_below(mu, tc, WalkState{}, m, [&](const CoverBall& B) { term(B, acc, err); });
    return Integral{acc, err};
  }

  auto pre = states_at(mu, d0);
  std::vector<Padic> pacc(pre.size(), init);
  std::vector<long> perr(pre.size(), kNoErr);
  std::vector<std::exception_ptr> thrown(pre.size());
#ifdef ACLP_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long i = 0; i < static_cast<long>(pre.size()); ++i) {
    try {
      walk_below(mu, tc, pre[i], m, [&](const CoverBall& B) { term(B, pacc[i], perr[i]); });
    } catch (...) {
      thrown[i] = std::current_exception();
    }
  }
  // errors surface in the fixed prefix order, matching the serial walk
  for (const auto& e : thrown)
    if (e) std::rethrow_exception(e);
  Padic acc = init;
  long err = kNoErr;
  for (size_t i = 0; i < pre.size(); ++i) {
    acc = multiplicative ? acc * pacc[i] : acc + pacc[i];
    err = std::min(err, perr[i]);
  }
  return Integral{acc, err};
}

// negative exponents invert first; exact bases are cut to the working
// precision of the context, since an exact inverse has no finite digit form
Padic ppow(const Padic& x, const Int& e, long cap2) {
  if (e >= 0) return x.pow(e);
  Padic base = x.twoprec() > cap2 ? x.truncated(cap2) : x;
  return base.inv().pow(-e);
}

// upper bound on 2v(t - z) over t in Z_p: the w-coordinate of the
// difference is the constant w-coordinate of z, and a point of negative
// valuation keeps its own distance
long sup_dist_2v(const Padic& z) {
  if (z.cb().zero)
    fail(ErrKind::precision, kMod, "endpoint is indistinguishable from a rational point");
  long bound = 2 * z.cb().v + z.field().twov_w();
  auto v = z.twoval();
  if (v && *v < 0) bound = std::min(bound, *v);
  return bound;
}

// z pulled back through the ball chart, M^(-1) acting by Mobius
Padic chart_pullback(const Mat2& M, const Padic& z) {
  const FieldTag& F = z.field();
  Padic num = z.mul_int(M[3]) - Padic::from_int(F, M[1], kPrecInf);
  Padic den = Padic::from_int(F, M[0], kPrecInf) - z.mul_int(M[2]);
  return num / den;
}

Mat2 cover_ball_matrix(const CoverBall& B, long p) {
  if (B.j > 0) return Mat2{pow_int(Int(p), B.j), B.b, Int(0), pow_int(Int(p), B.k)};
  return Mat2{Int(0), Int(1), pow_int(Int(p), B.k), Int(0)};
}

struct LinePrep {
  FieldTag F;
  Padic z1, z2;
  bool trivial = false;  // equal endpoints
};

LinePrep line_prep(const Padic& z1, const Padic& z2) {
  LinePrep L;
  L.F = z1.field();
  if (!(z2.field() == L.F)) fail(ErrKind::bad_input, kMod, "endpoints in different fields");
  if (L.F.base_only()) fail(ErrKind::bad_input, kMod, "endpoints must lie in an extension");
  if (z1.base_coord_only() || z2.base_coord_only())
    fail(ErrKind::bad_input, kMod, "endpoint is indistinguishable from a rational point");
  L.z1 = z1;
  L.z2 = z2;
  L.trivial = (z2 - z1).is_zero_ball();
  return L;
}

Integral line_integral_impl(const EdgeMeasure& mu, const Padic& z1, const Padic& z2, long m,
                            const LogBranch* br, bool parallel) {
  LinePrep L = line_prep(z1, z2);
  bool multiplicative = (br == nullptr);
  Padic init = multiplicative ? Padic::one(L.F) : Padic::zero(L.F);
  if (L.trivial) return Integral{init, kNoErr};

  long p = mu.ctx().p();
  long cap2 = 2 * mu.ctx().prec();
  TermFn term = [&, L, p, cap2](const CoverBall& B, Padic& acc, long& err) {
    long E = line_ball_cert(cover_ball_matrix(B, p), L.z1, L.z2);
    err = std::min(err, multiplicative ? std::max(0L, E) : log_tail_2v(p, E));
    // the sample of a polar ball is the point at infinity, where the
    // ratio is exactly one and contributes nothing
    if (B.mu == 0 || B.j == 0) return;
    Padic x = Padic::from_int(L.F, B.sx, kPrecInf);
    Padic y = Padic::from_int(L.F, B.sy, kPrecInf);
    Padic ratio = (x - L.z2 * y) / (x - L.z1 * y);
    if (multiplicative)
      acc = acc * ppow(ratio, B.mu, cap2);
    else
      acc = acc + (*br)(ratio).mul_int(B.mu);
  };
  return drive(mu, init, m, multiplicative, parallel, term);
}

// resample a non-invertible value at refined centers within the same ball
Padic sampled_unit(const Integrand& f, const TeichCenters& tc, const CoverBall& B, long p) {
  Padic v = f(B);
  if (v.twoval().has_value()) return v;
  if (B.j > 0 && B.j + 1 <= tc.n()) {
    for (long t = 0; t < p; ++t) {
      CoverBall R = B;
      R.j = B.j + 1;
      R.b = B.b + Int(t) * pow_int(Int(p), B.j);
      fill_sample(tc, R);
      v = f(R);
      if (v.twoval().has_value()) return v;
    }
  }
  fail(ErrKind::bad_input, kMod, "sample value is not invertible");
}

Integral sum_impl(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m,
                  bool multiplicative, bool parallel) {
  Padic init = multiplicative ? Padic::one(F) : Padic::zero(F);
  long p = mu.ctx().p();
  long cap2 = 2 * mu.ctx().prec();
  TeichCenters tc(p, m + 1);
  TermFn term = [&, p, cap2](const CoverBall& B, Padic& acc, long& err) {
    err = std::min(err, 2 * m);
    if (B.mu == 0) return;
    if (multiplicative)
      acc = acc * ppow(sampled_unit(f, tc, B, p), B.mu, cap2);
    else
      acc = acc + f(B).mul_int(B.mu);
  };
  return drive(mu, init, m, multiplicative, parallel, term);
}

}  // namespace

EdgeMeasure::EdgeMeasure(const QuotientGraph& G, VecZ values) : G_(&G), vals_(std::move(values)) {
  if (static_cast<long>(vals_.size()) != G.unoriented_count())
    fail(ErrKind::bad_input, kMod, "value count does not match the edge classes");
  oriented_.resize(G.edges().size());
  for (size_t e = 0; e < G.edges().size(); ++e) {
    const auto& E = G.edges()[e];
    oriented_[e] = E.self_reversed ? Int(0) : Int(E.sign) * vals_[E.unoriented];
  }
  for (const auto& V : G.vertices()) {
    Int s = 0;
    for (const auto& sl : V.slots) s += oriented_[sl.edge];
    if (s != 0) fail(ErrKind::bad_input, kMod, "values are not harmonic");
  }
}

void EdgeMeasure::cover(long m, const std::function<void(const CoverBall&)>& visit) const {
  check_level(*this, m);
  TeichCenters tc(ctx().p(), m);
  walk_below(*this, tc, WalkState{}, m, visit);
}

Padic Integral::certified() const {
  return value.truncated(std::min(value.twoprec(), err2v));
}

long line_ball_cert(const Mat2& M, const Padic& z1, const Padic& z2) {
  Padic t1 = chart_pullback(M, z1);
  Padic t2 = chart_pullback(M, z2);
  return (t2 - t1).lower_2v() - sup_dist_2v(t1) - sup_dist_2v(t2);
}

long log_tail_2v(long p, long E2v) {
  if (E2v <= 0) return 0;
  if (p == 2 && E2v < 3) return std::max(0L, 2 * E2v - 2);
  return E2v;
}

Integral integrate_serial(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m) {
  return sum_impl(mu, F, f, m, false, false);
}

Integral integrate(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m) {
  return sum_impl(mu, F, f, m, false, true);
}

Integral mult_integrate_serial(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f,
                               long m) {
  return sum_impl(mu, F, f, m, true, false);
}

Integral mult_integrate(const EdgeMeasure& mu, const FieldTag& F, const Integrand& f, long m) {
  return sum_impl(mu, F, f, m, true, true);
}

Integral coleman_line_integral_serial(const EdgeMeasure& mu, const Padic& z1, const Padic& z2,
                                      long m, const LogBranch& br) {
  return line_integral_impl(mu, z1, z2, m, &br, false);
}

Integral coleman_line_integral(const EdgeMeasure& mu, const Padic& z1, const Padic& z2, long m,
                               const LogBranch& br) {
  return line_integral_impl(mu, z1, z2, m, &br, true);
}

Integral mult_line_integral_serial(const EdgeMeasure& mu, const Padic& z1, const Padic& z2,
                                   long m) {
  return line_integral_impl(mu, z1, z2, m, nullptr, false);
}

Integral mult_line_integral(const EdgeMeasure& mu, const Padic& z1, const Padic& z2, long m) {
  return line_integral_impl(mu, z1, z2, m, nullptr, true);
}

}  // namespace aclp
