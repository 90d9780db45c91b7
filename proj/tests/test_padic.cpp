#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aclp/padic.hpp"

using namespace aclp;

namespace {

std::vector<long> digits_of(const Coord& c, long p, long k) {
  std::vector<long> out;
  Int u = c.u;
  for (long i = 0; i < k; ++i) {
    out.push_back(Int(mod_pos(u, Int(p))).get_si());
    u /= p;
  }
  return out;
}

}  // namespace

TEST_CASE("field classification") {
  CHECK(FieldTag::quadratic(3, -30).ext == Ext::ramified);
  CHECK(FieldTag::quadratic(3, -30).twov_w() == 1);
  CHECK(FieldTag::quadratic(2, -2).ext == Ext::ramified);
  CHECK(FieldTag::quadratic(2, -2).twov_w() == 1);
  CHECK(FieldTag::quadratic(2, -1).ext == Ext::ramified);   // -1 = 7 mod 8
  CHECK(FieldTag::quadratic(2, -1).twov_w() == 0);
  CHECK(FieldTag::quadratic(2, 5).ext == Ext::unramified);
  CHECK(FieldTag::quadratic(5, 2).ext == Ext::unramified);
  CHECK(FieldTag::quadratic(5, 2).residue_size() == 25);
  CHECK_THROWS_AS(FieldTag::quadratic(5, -1), Error);  // square mod 5
  CHECK_THROWS_AS(FieldTag::quadratic(2, -7), Error);  // 1 mod 8, split
  CHECK_THROWS_AS(FieldTag::quadratic(3, 12), Error);  // not squarefree
}

TEST_CASE("digit expansions match hand-computed values") {
  FieldTag F5 = FieldTag::base(5);
  // 1/3 in Z_5: 2, 3, 1, 3, 1, 3, ...
  Padic x = Padic::from_rat(F5, Rat(1, 3), 6);
  CHECK(!x.ca().zero);
  CHECK(x.ca().v == 0);
  CHECK(digits_of(x.ca(), 5, 6) == std::vector<long>{2, 3, 1, 3, 1, 3});

  FieldTag F3 = FieldTag::base(3);
  Padic m1 = Padic::from_int(F3, -1, 5);
  CHECK(digits_of(m1.ca(), 3, 5) == std::vector<long>{2, 2, 2, 2, 2});

  // normalization: 6 * 3^2 = 2 * 3^3
  Padic y = Padic::from_val_unit(F3, 2, 6, 9);
  CHECK(y.ca().v == 3);
  CHECK(y.ca().u == 2);
  CHECK(y.twoval_known() == 6);
}

TEST_CASE("geometric series inverse") {
  FieldTag F7 = FieldTag::base(7);
  Padic x = Padic::from_int(F7, 1 - 7, 12);
  Int s = 0;
  for (long i = 0; i < 12; ++i) s += pow_int(7, i);
  CHECK(x.inv().agrees(Padic::from_int(F7, s, 12), 2 * 12));
}

TEST_CASE("precision propagation follows the interval rules") {
  FieldTag F3 = FieldTag::base(3);
  Padic a = Padic::from_int(F3, 4, 5);
  Padic b = Padic::from_val_unit(F3, 2, 1, 6);
  CHECK((a + b).twoprec() == 2 * 5);
  CHECK((a * b).twoprec() == 2 * 6);  // min(5 + 2, 6 + 0)
  CHECK(b.inv().twoprec() == 2 * 2);  // 6 - 2*2
  CHECK(b.inv().twoval_known() == -4);

  // cancellation widens the relative knowledge but keeps absolute precision
  Padic c = Padic::from_int(F3, 13, 6) - Padic::from_int(F3, 13 + 81, 6);
  CHECK(c.twoval_known() == 2 * 4);
  CHECK(c.twoprec() == 2 * 6);

  Padic z = a - a;
  CHECK(z.is_zero_ball());
  CHECK(z.twoprec() == 2 * 5);
  CHECK_THROWS_AS(z.inv(), Error);
  CHECK_THROWS_AS(z.twoval_known(), Error);
}

TEST_CASE("ramified quadratic arithmetic, odd p") {
  FieldTag F = FieldTag::quadratic(3, -30);
  Padic w = Padic::gen(F, 8);
  CHECK(w.twoval_known() == 1);
  Padic w2 = w * w;
  CHECK(w2.twoval_known() == 2);  // uniformizer squared has valuation 1
  CHECK(w2.agrees(Padic::from_int(F, -30, 8), 2 * 8));

  Padic x = Padic::from_int(F, 1, 10) + Padic::gen(F, 10);
  Padic n = x.norm();
  CHECK(n.base_coord_only());
  CHECK(n.agrees(Padic::from_int(F, 31, 10), 2 * 9));  // 1 - d = 31
  CHECK((x * x.conj()).agrees(n, 2 * 9));
  CHECK((x * x.inv()).agrees(Padic::one(F), 2 * 8));
  CHECK(w.inv().twoval_known() == -1);
  CHECK(x.trace().agrees(Padic::from_int(F, 2, 10), 2 * 9));
}

TEST_CASE("ramified quadratic arithmetic, p = 2, even radicand") {
  FieldTag F = FieldTag::quadratic(2, -2);
  Padic w = Padic::gen(F, 20);
  CHECK(w.twoval_known() == 1);
  CHECK((w * w).agrees(Padic::from_int(F, -2, 20), 2 * 20));
  Padic x = Padic::from_int(F, 3, 20) + w;
  CHECK(x.norm().agrees(Padic::from_int(F, 11, 20), 2 * 18));  // 9 + 2
  CHECK((x * x.inv()).agrees(Padic::one(F), 2 * 16));
}

TEST_CASE("ramified quadratic with unit generator, p = 2") {
  FieldTag F = FieldTag::quadratic(2, -5);  // -5 = 3 mod 8
  CHECK(F.ext == Ext::ramified);
  CHECK(F.twov_w() == 0);
  Padic pi = Padic::one(F) + Padic::gen(F, 20);
  // N(1 + w) = 1 + 5 = 6, so v(pi) = 1/2: valuation ties resolve via norms
  CHECK(pi.twoval_known() == 1);
  CHECK((pi * pi).twoval_known() == 2);
  Padic u = (pi * pi).mul_rat(Rat(1, 2));
  CHECK(u.twoval_known() == 0);
  CHECK((pi * pi.inv()).agrees(Padic::one(F), 2 * 12));
}

TEST_CASE("unramified quadratic") {
  FieldTag F = FieldTag::quadratic(5, 2);
  Padic w = Padic::gen(F, 12);
  CHECK(w.twoval_known() == 0);
  Padic x = Padic::from_int(F, 2, 12) + w;  // residue (2, 1) != 0
  CHECK(x.twoval_known() == 0);
  Padic y = Padic::from_int(F, 10, 12) + w.mul_int(5);
  CHECK(y.twoval_known() == 2);  // both coordinates gain a factor of 5
  CHECK((x * x.inv()).agrees(Padic::one(F), 2 * 11));

  Padic t = x.teichmuller();
  CHECK(t.pow(Int(24)).agrees(Padic::one(F), t.twoprec() - 2));
  CHECK((t - x).lower_2v() >= 1);  // same residue
}

TEST_CASE("teichmuller lifts in the base field") {
  // tau(2) mod 25 = 7: the fourth root of unity congruent to 2 mod 5
  CHECK(teichmuller_int(2, 5, 2) == 7);
  CHECK(teichmuller_int(1, 7, 15) == 1);
  Int t2 = teichmuller_int(2, 7, 15);
  CHECK(pow_mod(t2, Int(6), pow_int(7, 15)) == 1);
  CHECK(mod_pos(t2, Int(7)) == 2);
  CHECK(teichmuller_int(6, 7, 9) == pow_int(7, 9) - 1);  // tau(-1) = -1

  FieldTag F7 = FieldTag::base(7);
  Padic x = Padic::from_int(F7, 3, 14);
  Padic t = x.teichmuller();
  CHECK(t.pow(Int(6)).agrees(Padic::one(F7), 2 * 13));
  CHECK(t.log0().lower_2v() >= 2 * 12);  // log kills roots of unity
}

TEST_CASE("exp against exact rational partial sums") {
  FieldTag F3 = FieldTag::base(3);
  long prec = 20;
  Padic e3 = Padic::from_int(F3, 3, prec).exp_p();
  Rat sum = 0, term = 1;
  for (long n = 1; n <= 45; ++n) {
    sum += term;
    term *= Rat(3, n);
  }
  CHECK(e3.agrees(Padic::from_rat(F3, sum, prec), 2 * 18));

  // additivity
  Padic a = Padic::from_int(F3, 6, prec), b = Padic::from_int(F3, 9 * 2, prec);
  CHECK((a + b).exp_p().agrees(a.exp_p() * b.exp_p(), 2 * 16));

  // convergence disk is sharp at p = 2: v = 1 is out, v = 2 is in
  FieldTag F2 = FieldTag::base(2);
  CHECK_THROWS_AS(Padic::from_int(F2, 2, prec).exp_p(), Error);
  Padic e4 = Padic::from_int(F2, 4, prec).exp_p();
  Rat s2 = 0, t2 = 1;
  for (long n = 1; n <= 60; ++n) {
    s2 += t2;
    t2 *= Rat(4, n);
  }
  CHECK(e4.agrees(Padic::from_rat(F2, s2, prec), 2 * 15));
}

TEST_CASE("log against exact rational partial sums") {
  FieldTag F3 = FieldTag::base(3);
  long prec = 20;
  Padic l4 = Padic::from_int(F3, 4, prec).log0();
  Rat sum = 0;
  for (long n = 1; n <= 45; ++n) sum += Rat((n % 2) ? 1 : -1, n) * Rat(pow_int(3, n));
  CHECK(l4.agrees(Padic::from_rat(F3, sum, prec), 2 * 17));
}

TEST_CASE("log functional equations") {
  FieldTag F3 = FieldTag::base(3);
  long prec = 18;
  Padic x = Padic::from_int(F3, 5, prec), y = Padic::from_int(F3, 7, prec);
  CHECK((x * y).log0().agrees(x.log0() + y.log0(), 2 * 15));

  // roundtrips on the domain where both converge
  Padic z = Padic::from_val_unit(F3, 2, 5, prec);
  CHECK(z.exp_p().log0().agrees(z, 2 * 14));
  Padic u = Padic::from_int(F3, 1 + 9 * 4, prec);
  CHECK(u.log0().exp_p().agrees(u, 2 * 14));

  // Iwasawa branch: log(p * u) = log(u)
  Padic pu = Padic::from_val_unit(F3, 1, 5, prec);
  CHECK(pu.log0().agrees(Padic::from_int(F3, 5, prec).log0(), 2 * 14));

  // Tate-style branch kills its period
  Padic q = Padic::from_val_unit(F3, 4, 2, prec);
  LogBranch lb = LogBranch::from_period(q);
  CHECK(lb(q).lower_2v() >= 2 * 12);
  // and log(q^2 * u) = log(u) on that branch
  Padic arg = q * q * Padic::from_int(F3, 7, prec);
  CHECK(lb(arg).agrees(lb(Padic::from_int(F3, 7, prec)), 2 * 12));
}

TEST_CASE("log through ramified decomposition") {
  FieldTag F = FieldTag::quadratic(3, -30);
  long prec = 16;
  Padic w = Padic::gen(F, prec);
  // 2 log(w) = log(w^2) = log(-30) on any branch
  Padic lhs = w.log0().mul_int(2);
  Padic rhs = Padic::from_int(F, -30, prec).log0();
  CHECK(lhs.agrees(rhs, 2 * 12));

  FieldTag G = FieldTag::quadratic(2, -2);
  Padic wg = Padic::gen(G, 24);
  Padic l = (wg * Padic::from_int(G, 3, 24)).log0();
  CHECK(l.agrees(wg.log0() + Padic::from_int(G, 3, 24).log0(), 2 * 14));
}

TEST_CASE("square roots") {
  FieldTag F5 = FieldTag::base(5);
  Padic r = Padic::from_int(F5, 6, 20).sqrt_base();
  CHECK((r * r).agrees(Padic::from_int(F5, 6, 20), 2 * 19));
  CHECK(mod_pos(r.ca().u, Int(5)) <= 2);  // deterministic sign

  Padic r2 = Padic::from_val_unit(F5, 2, 6, 20).sqrt_base();
  CHECK(r2.twoval_known() == 2);

  CHECK_THROWS_AS(Padic::from_val_unit(F5, 1, 6, 20).sqrt_base(), Error);
  CHECK_THROWS_AS(Padic::from_int(F5, 2, 20).sqrt_base(), Error);  // nonresidue

  FieldTag F2 = FieldTag::base(2);
  Padic s = Padic::from_int(F2, 17, 20).sqrt_base();
  CHECK((s * s).agrees(Padic::from_int(F2, 17, 20), 2 * 18));
  CHECK(mod_pos(s.ca().u, Int(4)) == 1);
  CHECK(s.twoprec() == 2 * 19);  // one digit lost at 2
  CHECK_THROWS_AS(Padic::from_int(F2, 3, 20).sqrt_base(), Error);
}

TEST_CASE("teichmuller ball centers") {
  TeichCenters tc(3, 12);
  // ball 2 mod 3 has center tau(2) = -1
  CHECK(tc.center(5, 1) == pow_int(3, 12) - 1);
  CHECK(tc.center(0, 4) == 0);

  Rng rng(424242);
  for (int i = 0; i < 50; ++i) {
    Int a = rng.below(pow_int(3, 12));
    long m = 1 + rng.below(8L);
    Int c = tc.center(a, m);
    CHECK(mod_pos(c - a, pow_int(3, m)) == 0);   // stays in the ball
    CHECK(tc.center(c, m) == c);                 // idempotent
  }

  TeichCenters t2(2, 16);
  for (int i = 0; i < 20; ++i) {
    Int a = Rng(i).below(pow_int(2, 16));
    CHECK(t2.center(a, 7) == mod_pos(a, pow_int(2, 7)));  // binary digits are their own lifts
  }
}

TEST_CASE("serialization roundtrip") {
  FieldTag F = FieldTag::quadratic(3, -30);
  std::vector<Padic> xs = {
      Padic::from_int(F, 1234, 9) + Padic::gen(F, 9).mul_int(77),
      Padic::zero_ball(F, 13),
      Padic::zero(F),
      Padic::one(F),
      Padic::gen(F, 7).inv(),
      Padic::from_rat(FieldTag::base(2), Rat(3, 7), 25),
  };
  for (const auto& x : xs) {
    std::string line = x.serialize();
    Padic y = Padic::deserialize(line);
    CHECK(y.serialize() == line);
    CHECK((x - y).lower_2v() >= x.twoprec());
  }
}

TEST_CASE("interval soundness under refinement") {
  FieldTag F = FieldTag::quadratic(3, -30);
  Rng rng(99991);
  for (int trial = 0; trial < 60; ++trial) {
    long lo = 8, hi = 18;
    auto mk = [&](long prec, const Int& ia, const Int& ib, long shift) {
      return Padic::from_int(F, ia, prec) +
             Padic::gen(F, prec).mul_int(ib).mul_rat(Rat(1, pow_int(3, shift)));
    };
    Int ia = rng.below(pow_int(3, 10)), ib = rng.below(pow_int(3, 10));
    long shift = rng.below(3L);
    Int ic = rng.below(pow_int(3, 10)) + 1;
    Padic coarse = mk(lo, ia, ib, shift), fine = mk(hi, ia, ib, shift);
    Padic cc = Padic::from_int(F, ic, lo), cf = Padic::from_int(F, ic, hi);

    Padic rc = (coarse * cc + coarse).norm();
    Padic rf = (fine * cf + fine).norm();
    CHECK(rc.agrees(rf, rc.twoprec()));  // finer result lies inside the coarse ball
    if (!rc.is_zero_ball() && !rf.is_zero_ball()) {
      CHECK(rf.twoprec() >= rc.twoprec());
    }
  }
}

TEST_CASE("mixed exact and capped values") {
  FieldTag F3 = FieldTag::base(3);
  Padic one = Padic::one(F3);
  CHECK(one.twoprec() >= kPrecInf);
  Padic x = Padic::from_int(F3, 7, 10);
  CHECK((one * x).twoprec() == 2 * 10);
  CHECK((one + x).twoprec() == 2 * 10);
  CHECK(x.pow(Int(5)).agrees(Padic::from_int(F3, Int(16807), 10), 2 * 10));
  CHECK(x.mul_rat(Rat(3, 7)).twoval_known() == 2);
  CHECK(x.mul_rat(Rat(3, 7)).mul_rat(Rat(7, 3)).agrees(x, 2 * 10));
}
