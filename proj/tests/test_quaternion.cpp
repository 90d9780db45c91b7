#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "aclp/quaternion.hpp"

using namespace aclp;

namespace {

Quat qi() { return Quat{0, 1, 0, 0}; }
Quat qj() { return Quat{0, 0, 1, 0}; }
Quat qk() { return Quat{0, 0, 0, 1}; }

// Jacobi: number of ways to write n as an ordered sum of four squares
Int r4(long n) {
  Int s = 0;
  for (long d = 1; d <= n; ++d)
    if (n % d == 0 && d % 4 != 0) s += d;
  return 8 * s;
}

std::array<Int, 4> mul2(const std::array<Int, 4>& x, const std::array<Int, 4>& y, const Int& m) {
  return {mod_pos(x[0] * y[0] + x[1] * y[2], m), mod_pos(x[0] * y[1] + x[1] * y[3], m),
          mod_pos(x[2] * y[0] + x[3] * y[2], m), mod_pos(x[2] * y[1] + x[3] * y[3], m)};
}

}  // namespace

TEST_CASE("structure constants and norm forms") {
  QuatAlg A{-2, -13};
  CHECK(qmul(A, qi(), qj()) == qk());
  CHECK(qmul(A, qj(), qi()) == qscale(-1, qk()));
  CHECK(qmul(A, qi(), qi()) == Quat{-2, 0, 0, 0});
  CHECK(qmul(A, qj(), qj()) == Quat{-13, 0, 0, 0});
  CHECK(qmul(A, qk(), qk()) == Quat{-26, 0, 0, 0});  // k^2 = -ab
  CHECK(qmul(A, qi(), qk()) == qscale(-2, qj()));
  CHECK(qmul(A, qk(), qi()) == qscale(2, qj()));

  Quat u{Rat(1, 2), 3, Rat(-2, 5), 1}, v{2, Rat(1, 3), 0, -4}, w{-1, 1, 1, 1};
  CHECK(qmul(A, qmul(A, u, v), w) == qmul(A, u, qmul(A, v, w)));
  CHECK(qnrd(A, qmul(A, u, v)) == qnrd(A, u) * qnrd(A, v));
  CHECK(qmul(A, u, qconj(u)) == Quat{qnrd(A, u), 0, 0, 0});
  CHECK(qconj(qmul(A, u, v)) == qmul(A, qconj(v), qconj(u)));
  CHECK(qtrd(u) == 2 * u.t);
}

TEST_CASE("hilbert symbols") {
  CHECK(hilbert_symbol(-1, -1, 2) == -1);
  CHECK(hilbert_symbol(-1, -1, 3) == 1);
  CHECK(hilbert_symbol(-1, -1, 0) == -1);
  CHECK(hilbert_symbol(-1, -7, 7) == -1);
  CHECK(hilbert_symbol(-1, -7, 2) == 1);
  CHECK(hilbert_symbol(-2, -13, 13) == -1);
  CHECK(hilbert_symbol(2, 3, 2) == -1);  // 2x^2 + 3y^2 = z^2 has no 2-adic point
  CHECK(hilbert_symbol(5, 3, 5) == -1);  // 3 is not a square mod 5
  CHECK(hilbert_symbol(5, 11, 5) == 1);  // 11 = 1 mod 5

  // product over all places is trivial; quat_ramified checks this internally
  for (long a = -12; a <= 12; ++a)
    for (long b = -12; b <= a; ++b) {
      if (a == 0 || b == 0) continue;
      CHECK_NOTHROW(quat_ramified(a, b));
    }
}

TEST_CASE("ramification sets and algebra search") {
  CHECK(quat_ramified(-1, -1) == std::vector<long>{2});
  CHECK(quat_ramified(-1, -2) == std::vector<long>{2});
  CHECK(quat_ramified(-1, -3) == std::vector<long>{3});
  CHECK(quat_ramified(-1, -7) == std::vector<long>{7});
  CHECK(quat_ramified(-2, -13) == std::vector<long>{13});

  std::vector<std::vector<long>> wants = {{2}, {3}, {7}, {13}, {2, 3, 5}};
  for (const auto& want : wants) {
    QuatAlg A = definite_algebra(want);
    CHECK(quat_ramified(A.a, A.b) == want);
    QuatAlg B = definite_algebra(want);
    CHECK(A == B);
  }
  CHECK_THROWS_AS(definite_algebra({3, 5}), Error);  // even count with infinity
  CHECK_THROWS_AS(definite_algebra({6}), Error);
}

TEST_CASE("lattice canonicalization and coordinates") {
  QuatAlg A{-1, -1};
  Quat rho = qscale(Rat(1, 2), Quat{1, 1, 1, 1});
  QLattice L1 = QLattice::from_quats(A, {qone(), qi(), qj(), rho});
  QLattice L2 = QLattice::from_quats(
      A, {rho, qj(), qone(), qi(), qadd(qone(), qi()), qadd(rho, qj())});
  CHECK(L1 == L2);

  VecZ c = {2, -1, 3, 5};
  Quat x = L1.element(c);
  CHECK(L1.contains(x));
  VecQ back = L1.coords_q(x);
  for (int j = 0; j < 4; ++j) CHECK(back[j] == Rat(c[j]));
  CHECK_FALSE(L1.contains(qscale(Rat(1, 3), qi())));

  QLattice lip = QLattice::from_quats(A, {qone(), qi(), qj(), qk()});
  CHECK(lip.index_in(L1) == 2);
}

TEST_CASE("order closure and discriminants") {
  QuatAlg A{-1, -1};
  Order lip = order_closure(A, {qi(), qj()});  // products supply k
  CHECK(lip.reduced_disc() == 4);
  CHECK(lip.contains(qk()));

  Quat rho = qscale(Rat(1, 2), Quat{1, 1, 1, 1});
  Order hur = order_closure(A, {qi(), qj(), rho});
  CHECK(hur.reduced_disc() == 2);
  CHECK(lip.L.index_in(hur.L) == 2);

  // (1+i)/3 is not integral: closure must reject
  CHECK_THROWS_AS(order_closure(A, {qi(), qj(), qk(), qscale(Rat(1, 3), qadd(qone(), qi()))}),
                  Error);

  CHECK(maximal_order(QuatAlg{-1, -1}).reduced_disc() == 2);
  CHECK(maximal_order(QuatAlg{-1, -3}).reduced_disc() == 3);
  CHECK(maximal_order(QuatAlg{-1, -7}).reduced_disc() == 7);
  CHECK(maximal_order(QuatAlg{-2, -13}).reduced_disc() == 13);
}

TEST_CASE("short vectors: four-square counts and unit groups") {
  QuatAlg A{-1, -1};
  Order lip = order_closure(A, {qi(), qj()});
  for (long n = 1; n <= 15; ++n) {
    auto sols = lattice_by_norm(lip.L, n);
    CHECK(Int(2) * Int(sols.size()) == r4(n));  // up to sign
    for (const auto& s : sols) CHECK(qnrd(A, s) == n);
  }
  Order hur = maximal_order(A);
  CHECK(lattice_by_norm(hur.L, 1).size() == 12);  // 24 units up to sign
  CHECK(lattice_by_norm(hur.L, 0).empty());
}

TEST_CASE("trace-zero span enumeration") {
  Order O = maximal_order(QuatAlg{-2, -13});
  auto b = O.L.basis();
  MatZ tr(1, VecZ(4));
  for (int j = 0; j < 4; ++j) {
    Rat t = qtrd(b[j]);
    REQUIRE(t.get_den() == 1);
    tr[0][j] = t.get_num();
  }
  MatZ K = row_hnf(kernel_int(tr));
  REQUIRE(K.size() == 3);
  std::vector<Quat> tb;
  for (const auto& row : K) {
    Quat s{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j) s = qadd(s, qscale(Rat(row[j]), b[j]));
    tb.push_back(s);
  }
  for (long n : {2L, 13L, 15L, 26L}) {
    auto sols = span_by_norm(O.alg(), tb, n);
    for (const auto& s : sols) {
      CHECK(qtrd(s) == 0);
      CHECK(qnrd(O.alg(), s) == n);
    }
    // dual route: filter the full lattice enumeration by trace
    auto full = lattice_by_norm(O.L, n);
    size_t cnt = 0;
    for (const auto& s : full)
      if (qtrd(s) == 0) ++cnt;
    CHECK(sols.size() == cnt);
  }
}

TEST_CASE("eichler orders") {
  Order O = maximal_order(QuatAlg{-1, -1});
  Order E3 = eichler_order(O, 3);
  CHECK(E3.reduced_disc() == 6);
  CHECK(E3.L.index_in(O.L) == 3);

  Order O7 = maximal_order(QuatAlg{-1, -7});
  Order E6 = eichler_order(O7, 6);
  CHECK(E6.reduced_disc() == 42);
  CHECK(E6.L.index_in(O7.L) == 6);

  CHECK_THROWS_AS(eichler_order(O, 4), Error);  // level must be squarefree
  CHECK_THROWS_AS(eichler_order(O, 2), Error);  // level must avoid the discriminant
  CHECK(eichler_order(O, 1).L == O.L);
}

TEST_CASE("orientation at a ramified prime") {
  Order O = maximal_order(QuatAlg{-1, -7});
  OrientationRam ori(O, 7);
  CHECK(ori.image(qone()) == std::pair<long, long>{1, 0});
  CHECK(kronecker(ori.nonresidue(), 7) == -1);
  // s^2 = r in the residue field
  CHECK(ori.fmul({0, 1}, {0, 1}) == std::pair<long, long>{ori.nonresidue(), 0});

  auto b = O.L.basis();
  for (const auto& u : b)
    for (const auto& v : b) {
      auto lhs = ori.image(qmul(O.alg(), u, v));
      CHECK(lhs == ori.fmul(ori.image(u), ori.image(v)));
    }
  // reduced characteristic polynomial passes to the quotient
  for (const auto& u : b) {
    auto iu = ori.image(u);
    long tau = mod_pos(qtrd(u).get_num(), 7).get_si();
    long nu = mod_pos(qnrd(O.alg(), u).get_num(), 7).get_si();
    auto sq = ori.fmul(iu, iu);
    long c0 = ((sq.first - tau * iu.first + nu) % 7 + 7) % 7;
    long c1 = ((sq.second - tau * iu.second) % 7 + 7) % 7;
    CHECK(c0 == 0);
    CHECK(c1 == 0);
  }
  // canonical square roots of nonresidues
  auto s3 = ori.sqrt_of(3);  // 3 is a nonresidue mod 7
  CHECK(ori.fmul(s3, s3) == std::pair<long, long>{3, 0});

  OrientationRam again(O, 7);
  for (const auto& u : b) CHECK(again.image(u) == ori.image(u));

  // residue field of size 4 at the even prime
  Order H = maximal_order(QuatAlg{-1, -1});
  OrientationRam o2(H, 2);
  CHECK(o2.image(qone()) == std::pair<long, long>{1, 0});
  CHECK(o2.fmul({0, 1}, {0, 1}) == std::pair<long, long>{1, 1});  // w^2 = w + 1
  auto hb = H.L.basis();
  for (const auto& u : hb)
    for (const auto& v : hb)
      CHECK(o2.image(qmul(H.alg(), u, v)) == o2.fmul(o2.image(u), o2.image(v)));
}

TEST_CASE("orientation at a split level prime") {
  Order O = maximal_order(QuatAlg{-1, -1});
  Order E3 = eichler_order(O, 3);
  OrientationSplit ori(E3, 3);
  CHECK(ori.image(qone()) == 1);
  CHECK(ori.basis_images() != ori.other_basis_images());
  CHECK(ori.basis_images() < ori.other_basis_images());

  auto b = E3.L.basis();
  for (const auto& u : b)
    for (const auto& v : b)
      CHECK(ori.image(qmul(E3.alg(), u, v)) == ori.image(u) * ori.image(v) % 3);

  // at a ramified prime the quotient is a field with no map to F_ell
  CHECK_THROWS_AS(OrientationSplit(E3, 2), Error);
}

TEST_CASE("splitting maps") {
  Order O = maximal_order(QuatAlg{-1, -7});
  std::vector<std::pair<long, long>> prec = {{2, 16}, {3, 10}, {5, 6}};
  for (auto [p, N] : prec) {
    SplittingMap io(O, p, N);
    Int m = io.modulus();
    CHECK(m == pow_int(p, N));
    Quat u = O.L.element({1, 2, 3, 4}), v = O.L.element({0, 1, 1, 2});
    auto iu = io.image(u), iv = io.image(v);
    CHECK(io.image(qmul(O.alg(), u, v)) == mul2(iu, iv, m));
    CHECK(mod_pos(iu[0] + iu[3], m) == mod_pos(qtrd(u).get_num(), m));
    CHECK(mod_pos(iu[0] * iu[3] - iu[1] * iu[2], m) == mod_pos(qnrd(O.alg(), u).get_num(), m));
  }
  CHECK_THROWS_AS(SplittingMap(O, 7, 4), Error);  // p divides the discriminant

  // splitting an Eichler order away from its level
  Order E6 = eichler_order(O, 6);
  SplittingMap io(E6, 5, 8);
  Quat u = E6.L.element({2, 1, 0, 1}), v = E6.L.element({1, 1, 1, 1});
  CHECK(io.image(qmul(E6.alg(), u, v)) == mul2(io.image(u), io.image(v), io.modulus()));
}
