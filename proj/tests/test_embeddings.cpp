#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "aclp/embeddings.hpp"
#include "aclp/harmonic.hpp"
#include "aclp/measure.hpp"
#include "aclp/quaternion.hpp"

using namespace aclp;

namespace {

// discriminant 7 algebra; p = 2 with Q(sqrt(-8)): one coset, kernel 2.
struct SetupA {
  BTContext ctx;
  QuotientGraph G;
  EdgeMeasure mu;
  FieldData K;
  EmbeddingSystem sys;
  explicit SetupA(long prec = 48)
      : ctx(maximal_order(QuatAlg{-1, -7}), 2, prec),
        G(ctx),
        mu(G, CocycleSpace(G).eigencocycle({})),
        K(FieldData::make(-8, 2)),
        sys(G, K) {}
};

// same algebra at p = 3 with Q(sqrt(-120)): Klein class group, the prime
// class has order two, so two cosets and trivial kernel
struct SetupB {
  BTContext ctx;
  QuotientGraph G;
  EdgeMeasure mu;
  FieldData K;
  EmbeddingSystem sys;
  explicit SetupB(long prec = 48)
      : ctx(maximal_order(QuatAlg{-1, -7}), 3, prec),
        G(ctx),
        mu(G, CocycleSpace(G).eigencocycle({})),
        K(FieldData::make(-120, 3)),
        sys(G, K) {}
};

ErrKind kind_of(const std::function<void()>& run) {
  try {
    run();
  } catch (const Error& e) {
    return e.kind;
  }
  return ErrKind::invariant;
}

// membership of an integer projective point in the ball {M (t : 1)}
bool in_ball(const Mat2& M, const Int& x, const Int& y, long p) {
  Int xp = M[3] * x - M[1] * y;
  Int yp = M[0] * y - M[2] * x;
  if (yp == 0) return false;
  if (xp == 0) return true;
  return val_p(xp, p) >= val_p(yp, p);
}

std::vector<DomainBall> domain(const EmbeddingSystem& sys, const EdgeMeasure& mu,
                               const Embedding& e, long m) {
  std::vector<DomainBall> out;
  sys.domain_cover(mu, e, m, [&](const DomainBall& B) { out.push_back(B); });
  return out;
}

long cert2(const Integral& I) { return std::min(I.err2v, I.value.twoprec()); }

Quat qneg(const Quat& u) { return qscale(Rat(-1), u); }

}  // namespace

TEST_CASE("class counts, orbits and scales") {
  SetupA A;
  CHECK(A.sys.kernel_order() == 2);
  CHECK(A.sys.delta().size() == 1);
  // one enumerated class (the odd unit halves the count) plus the appended
  // conjugate diagnostic
  REQUIRE(A.sys.classes().size() == 2);
  CHECK(A.sys.system() == std::vector<long>{0});
  CHECK(A.sys.other_orbit_rep() == 1);
  CHECK(A.sys.classes()[1].u == qneg(A.sys.classes()[0].u));
  CHECK(!A.sys.same_class(A.sys.classes()[0].u, A.sys.classes()[1].u));

  SetupB B;
  CHECK(B.sys.kernel_order() == 1);
  CHECK(B.sys.delta().size() == 2);
  REQUIRE(B.sys.classes().size() == 4);
  REQUIRE(B.sys.system().size() == 2);
  CHECK(B.sys.system()[0] == 0);

  // the two enumerated orbits are disjoint and conjugation-closed
  std::set<long> in_sys(B.sys.system().begin(), B.sys.system().end());
  CHECK(in_sys.size() == 2);
  CHECK(in_sys.count(B.sys.other_orbit_rep()) == 0);
  for (long i : B.sys.system())
    for (size_t c = 0; c < B.sys.classes().size(); ++c) {
      bool same = B.sys.same_class(B.sys.classes()[i].u, B.sys.classes()[c].u);
      CHECK(same == (static_cast<long>(c) == i));
    }
}

TEST_CASE("images of sqrt(D) are exact trace-zero square roots") {
  SetupA A;
  SetupB B;
  auto check_u = [](const EmbeddingSystem& sys, const QuatAlg& alg) {
    for (const auto& e : sys.classes()) {
      CHECK(qtrd(e.u) == 0);
      Quat sq = qmul(alg, e.u, e.u);
      CHECK(sq.t == Rat(sys.field().D));
      CHECK(sq.x == 0);
      CHECK(sq.y == 0);
      CHECK(sq.z == 0);
      CHECK(e.scale >= 0);
    }
  };
  check_u(A.sys, A.ctx.order().alg());
  check_u(B.sys, B.ctx.order().alg());

  // the opposite sign of the root reverses the orientation at the inert
  // prime, and conjugation by unit-norm elements there is inner on the
  // residue field, so the negated root meets no enumerated class
  const Quat& u0 = B.sys.classes()[0].u;
  CHECK(!B.sys.same_class(u0, qneg(u0)));
  for (size_t c = 0; c < B.sys.classes().size(); ++c)
    CHECK(!B.sys.same_class(qneg(u0), B.sys.classes()[c].u));
  const Quat& a0 = A.sys.classes()[0].u;
  CHECK(!A.sys.same_class(a0, qneg(a0)));
}

TEST_CASE("fixed edges are genuine adjacent vertex pairs") {
  SetupA A;
  SetupB B;
  auto check_edge = [](const EmbeddingSystem& sys, const BTContext& ctx) {
    long p = ctx.p();
    for (const auto& e : sys.classes()) {
      CHECK(e.ve.det_val() % 2 == 0);
      CHECK(e.vo.det_val() % 2 == 1);
      CHECK(ctx.neighbor(e.ve, e.slot_ev) == e.vo);
      CHECK(ctx.neighbor(e.vo, e.slot_ov) == e.ve);
      CHECK(e.slot_ev >= 0);
      CHECK(e.slot_ev <= p);
      REQUIRE(e.rep_e >= 0);
      REQUIRE(e.rep_e < static_cast<long>(sys.graph().vertices().size()));
      REQUIRE(e.rep_o >= 0);
      REQUIRE(e.rep_o < static_cast<long>(sys.graph().vertices().size()));
    }
  };
  check_edge(A.sys, A.ctx);
  check_edge(B.sys, B.ctx);
}

TEST_CASE("fixed points solve the attached quadratic and avoid the rational line") {
  SetupA A;
  SetupB B;
  auto check_fp = [](const EmbeddingSystem& sys) {
    for (const auto& e : sys.classes()) {
      auto [z, zb] = sys.fixed_points(e);
      CHECK(!z.cb().zero);
      CHECK(z.conj().serialize() == zb.serialize());
      auto q = sys.twist_form(e);
      CHECK((q[0] * z * z + q[1] * z + q[2]).is_zero_ball());
      CHECK((q[0] * zb * zb + q[1] * zb + q[2]).is_zero_ball());
    }
  };
  check_fp(A.sys);
  check_fp(B.sys);
}

TEST_CASE("boundary chart: norm one, round trip, sign under the root") {
  SetupA A;
  const Embedding& e = A.sys.classes()[0];
  auto zz = A.sys.fixed_points(e);
  const FieldTag& F = zz.first.field();

  for (long x = -3; x <= 3; ++x)
    for (long y : {1L, 2L, 3L}) {
      Padic v = eta_inverse(zz, Int(x), Int(y));
      // rational points map into the norm-one torus
      Padic n = v * v.conj();
      CHECK(n.agrees(Padic::one(F), n.twoprec()));
      Padic back = eta_forward(zz, v);
      Padic want = Padic::from_rat(F, Rat(x) / Rat(y), 48);
      CHECK(back.agrees(want, std::min(back.twoprec(), want.twoprec())));
    }
  CHECK(eta_inverse(zz, Int(1), Int(0)).serialize() == Padic::one(F).serialize());

  // the image of sqrt(D) acts on the boundary as negation in the chart
  Quat w = qscale(Rat(pow_int(A.K.p, e.scale)), e.u);
  Mat2 M = A.ctx.image_mod(w);
  for (long x = -2; x <= 2; ++x) {
    Int y = 1;
    Padic lhs = eta_inverse(zz, M[0] * x + M[1] * y, M[2] * x + M[3] * y);
    Padic rhs = Padic::zero(F) - eta_inverse(zz, Int(x), y);
    CHECK(lhs.agrees(rhs, std::min(lhs.twoprec(), rhs.twoprec())));
  }
}

TEST_CASE("coset translation fixes the prime class and respects the group law") {
  SetupB B;
  const auto& D = B.sys.delta();
  Form id = principal_form(-120);
  Form pf = prime_form(-120, 3);
  // translation acts through the class group modulo the square of the prime
  // above p; that prime's own class has even order here, so it survives the
  // quotient and swaps the two coset orbits without fixed points
  std::set<long> in_sys(B.sys.system().begin(), B.sys.system().end());
  for (long c = 0; c < 4; ++c) {
    CHECK(B.sys.delta_action(c, id) == c);
    long pc = B.sys.delta_action(c, pf);
    CHECK(pc != c);
    CHECK(B.sys.delta_action(pc, pf) == c);
    CHECK(in_sys.count(pc) != in_sys.count(c));
  }

  // a form outside the prime-class subgroup moves every class, with order two
  Form tau{Int(2), Int(0), Int(15)};
  for (long c = 0; c < 4; ++c) {
    long tc = B.sys.delta_action(c, tau);
    CHECK(tc != c);
    CHECK(B.sys.delta_action(tc, tau) == c);
  }

  // composition of translations is translation by the composed form
  for (const Form& f : {pf, tau})
    for (const Form& g : {pf, tau})
      CHECK(B.sys.delta_action(B.sys.delta_action(0, f), g) ==
            B.sys.delta_action(0, compose(f, g)));

  // the recorded system realizes the labels: acting by coset i on entry i
  // returns to the base class
  for (size_t i = 0; i < D.size(); ++i)
    CHECK(B.sys.delta_action(B.sys.system()[i], D.reps()[i]) == B.sys.system()[0]);

  SetupA A;
  CHECK(A.sys.delta_action(0, principal_form(-8)) == 0);
  CHECK(A.sys.delta_action(1, prime_form(-8, 2)) == 1);
}

TEST_CASE("conjugation by even-valuation units preserves the class") {
  SetupA A;
  std::vector<Quat> pool;
  for (const auto& V : A.G.vertices())
    for (const auto& q : V.stab) pool.push_back(q);
  Quat y = A.ctx.odd_element();
  pool.push_back(qmul(A.ctx.order().alg(), y, y));
  REQUIRE(pool.size() >= 3);

  const Embedding& e = A.sys.classes()[0];
  for (const auto& g : pool) {
    if (qnrd(A.ctx.order().alg(), g) == 0) continue;
    Embedding ec = A.sys.conjugated(e, g);
    CHECK(A.sys.same_class(ec.u, e.u));
    CHECK(ec.ve.det_val() % 2 == 0);
  }
}

TEST_CASE("domain coverings partition the boundary once") {
  SetupA A;
  SetupB B;

  auto check_cover = [](const EmbeddingSystem& sys, const EdgeMeasure& mu, long cls,
                        long m) {
    const Embedding& e = sys.classes()[cls];
    long p = sys.graph().ctx().p();
    long seeds = sys.kernel_order() == 2 ? 2 * p : p + 1;
    auto cov = domain(sys, mu, e, m);
    Int total = 0;
    long count = 0;
    for (const auto& B : cov) {
      REQUIRE(B.edge >= 0);
      REQUIRE(B.edge < static_cast<long>(sys.graph().edges().size()));
      CHECK(B.mu == mu.mu_oriented(B.edge));
      CHECK(in_ball(B.M, B.sx, B.sy, p));
      total += B.mu;
      count += 1;
    }
    CHECK(count == seeds * pow_int(p, m - 1));
    CHECK(total == 0);
    CHECK(sys.domain_edge_sum(mu, e) == 0);

    // each rational sample of the plain root covering lies in exactly one
    // domain ball, so the union is the whole boundary without overlap
    mu.cover(m + 1, [&](const CoverBall& R) {
      long hits = 0;
      for (const auto& B : cov)
        if (in_ball(B.M, R.sx, R.sy, p)) hits += 1;
      CHECK(hits == 1);
    });

    // and the domain samples are pairwise separated
    for (size_t i = 0; i < cov.size(); ++i)
      for (size_t j = 0; j < cov.size(); ++j)
        CHECK(in_ball(cov[i].M, cov[j].sx, cov[j].sy, p) == (i == j));
  };

  check_cover(A.sys, A.mu, 0, 3);
  check_cover(A.sys, A.mu, 1, 2);
  check_cover(B.sys, B.mu, 0, 2);
  check_cover(B.sys, B.mu, B.sys.other_orbit_rep(), 2);
}

TEST_CASE("constant functions integrate to zero on the torus") {
  SetupA A;
  const FieldTag& F = A.K.tag;
  auto I = integrate_on_torus(A.mu, A.sys, A.sys.classes()[0],
                              [&](const Padic&) { return Padic::one(F); }, 3);
  CHECK(I.value.is_zero_ball());
  CHECK(I.err2v == 6 - 2);  // kernel division costs two halved digits at p = 2

  SetupB B;
  const FieldTag& FB = B.K.tag;
  auto J = integrate_on_torus(B.mu, B.sys, B.sys.classes()[0],
                              [&](const Padic&) { return Padic::one(FB); }, 3);
  CHECK(J.value.is_zero_ball());
  CHECK(J.err2v == 6);
}

TEST_CASE("first logarithmic moment matches the line integral across the edge") {
  SetupA A;
  LogBranch brA = LogBranch::iwasawa(A.K.tag);
  for (long cls : {0L, 1L}) {
    const Embedding& e = A.sys.classes()[cls];
    auto zz = A.sys.fixed_points(e);
    auto col = coleman_line_integral(A.mu, zz.first, zz.second, 8, brA);
    auto mom = log_moment_on_torus(A.mu, A.sys, e, 1, 8, brA);
    long tol = std::min(cert2(col), cert2(mom));
    CHECK(tol > 8);
    CHECK(col.value.agrees(mom.value.mul_int(Int(A.sys.kernel_order())), tol));
  }

  SetupB B;
  LogBranch brB = LogBranch::iwasawa(B.K.tag);
  for (long cls : {B.sys.system()[1], B.sys.other_orbit_rep()}) {
    const Embedding& e = B.sys.classes()[cls];
    auto zz = B.sys.fixed_points(e);
    auto col = coleman_line_integral(B.mu, zz.first, zz.second, 6, brB);
    auto mom = log_moment_on_torus(B.mu, B.sys, e, 1, 6, brB);
    long tol = std::min(cert2(col), cert2(mom));
    CHECK(tol > 8);
    CHECK(col.value.agrees(mom.value, tol));
  }
}

TEST_CASE("higher moments refine consistently") {
  SetupA A;
  LogBranch br = LogBranch::iwasawa(A.K.tag);
  const Embedding& e = A.sys.classes()[0];
  for (long n : {1L, 2L, 3L}) {
    auto lo = log_moment_on_torus(A.mu, A.sys, e, n, 6, br);
    auto hi = log_moment_on_torus(A.mu, A.sys, e, n, 9, br);
    CHECK(hi.err2v >= lo.err2v);
    CHECK(hi.value.agrees(lo.value, cert2(lo)));
  }
}

TEST_CASE("incompatible inputs are rejected with the right kinds") {
  SetupA A;

  // 7 ramifies in Q(sqrt(-56)) and splits in Q(sqrt(-40)); the algebra
  // needs it inert
  CHECK(kind_of([&] { EmbeddingSystem s(A.G, FieldData::make(-56, 2)); }) ==
        ErrKind::hypothesis);
  CHECK(kind_of([&] { EmbeddingSystem s(A.G, FieldData::make(-40, 2)); }) ==
        ErrKind::hypothesis);
  CHECK(kind_of([&] { EmbeddingSystem s(A.G, FieldData::make(-120, 3)); }) ==
        ErrKind::bad_input);

  const Embedding& e = A.sys.classes()[0];
  CHECK(kind_of([&] { A.sys.domain_cover(A.mu, e, 0, [](const DomainBall&) {}); }) ==
        ErrKind::bad_input);
  CHECK(kind_of([&] { A.sys.domain_cover(A.mu, e, 60, [](const DomainBall&) {}); }) ==
        ErrKind::precision);
  CHECK(kind_of([&] { A.sys.delta_action(0, principal_form(-120)); }) ==
        ErrKind::invariant);

  // odd-valuation conjugators are outside the acting group
  CHECK(kind_of([&] { A.sys.conjugated(e, A.ctx.odd_element()); }) ==
        ErrKind::invariant);
}
