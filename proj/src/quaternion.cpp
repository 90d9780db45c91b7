#include "aclp/quaternion.hpp"

#include <algorithm>
#include <functional>

namespace aclp {

namespace {

constexpr const char* kMod = "quaternion";

VecQ qvec(const Quat& q) { return {q.t, q.x, q.y, q.z}; }

long lmod(const Int& a, long m) { return mod_pos(a, Int(m)).get_si(); }

long fl_inv(long a, long ell) { return inv_mod(Int(a), Int(ell)).get_si(); }

// Reduced row echelon over F_ell (entries kept in [0, ell)); pivot columns.
std::vector<size_t> fl_rref(std::vector<std::vector<long>>& A, long ell) {
  std::vector<size_t> piv;
  size_t rows = A.size();
  if (rows == 0) return piv;
  size_t cols = A[0].size(), r = 0;
  for (auto& row : A)
    for (auto& v : row) v = ((v % ell) + ell) % ell;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t pr = rows;
    for (size_t i = r; i < rows; ++i)
      if (A[i][c] != 0) {
        pr = i;
        break;
      }
    if (pr == rows) continue;
    std::swap(A[r], A[pr]);
    long iv = fl_inv(A[r][c], ell);
    for (size_t j = 0; j < cols; ++j) A[r][j] = A[r][j] * iv % ell;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      long f = A[i][c];
      for (size_t j = 0; j < cols; ++j) A[i][j] = ((A[i][j] - f * A[r][j]) % ell + ell) % ell;
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

std::vector<std::vector<long>> fl_nullspace(std::vector<std::vector<long>> A, long ell) {
  size_t cols = A.empty() ? 0 : A[0].size();
  std::vector<size_t> piv = fl_rref(A, ell);
  std::vector<bool> is_piv(cols, false);
  for (size_t c : piv) is_piv[c] = true;
  std::vector<std::vector<long>> K;
  for (size_t c = 0; c < cols; ++c) {
    if (is_piv[c]) continue;
    std::vector<long> v(cols, 0);
    v[c] = 1;
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = (ell - A[i][c]) % ell;
    K.push_back(std::move(v));
  }
  return K;
}

bool fl_invertible(std::vector<std::vector<long>> A, long ell) {
  size_t n = A.size();
  return fl_rref(A, ell).size() == n;
}

// Unique solution of the invertible square system S z = y mod ell.
std::vector<long> fl_solve(std::vector<std::vector<long>> S, const std::vector<long>& y,
                           long ell) {
  size_t n = S.size();
  for (size_t i = 0; i < n; ++i) S[i].push_back(((y[i] % ell) + ell) % ell);
  std::vector<size_t> piv = fl_rref(S, ell);
  require(piv.size() == n && piv.back() == n - 1, kMod, "fl_solve: singular system");
  std::vector<long> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = S[i][n];
  return z;
}

VecZ int_coords(const QLattice& L, const Quat& q, const char* what) {
  VecQ c = L.coords_q(q);
  VecZ r(4);
  for (int j = 0; j < 4; ++j) {
    require(c[j].get_den() == 1, kMod, what);
    r[j] = c[j].get_num();
  }
  return r;
}

int eps2(const Int& u) { return mod_pos(u, 4) == 3 ? 1 : 0; }

int omega2(const Int& u) {
  long m = lmod(u, 8);
  return (m == 3 || m == 5) ? 1 : 0;
}

Int floor_sqrt_rat(const Rat& r) {
  require(r >= 0, kMod, "floor_sqrt_rat: nonnegative");
  Int n = r.get_num(), d = r.get_den();
  return isqrt(n * d) / d;
}

long rank_q(const std::vector<Quat>& gens) {
  MatQ M;
  for (const auto& g : gens) M.push_back(qvec(g));
  return static_cast<long>(rref(M).size());
}

}  // namespace

Quat qadd(const Quat& u, const Quat& v) { return {u.t + v.t, u.x + v.x, u.y + v.y, u.z + v.z}; }
Quat qsub(const Quat& u, const Quat& v) { return {u.t - v.t, u.x - v.x, u.y - v.y, u.z - v.z}; }
Quat qscale(const Rat& c, const Quat& u) { return {c * u.t, c * u.x, c * u.y, c * u.z}; }

Quat qmul(const QuatAlg& A, const Quat& u, const Quat& v) {
  Rat a = A.a, b = A.b;
  return {u.t * v.t + a * u.x * v.x + b * u.y * v.y - a * b * u.z * v.z,
          u.t * v.x + u.x * v.t - b * (u.y * v.z - u.z * v.y),
          u.t * v.y + u.y * v.t + a * (u.x * v.z - u.z * v.x),
          u.t * v.z + u.z * v.t + u.x * v.y - u.y * v.x};
}

Quat qconj(const Quat& u) { return {u.t, -u.x, -u.y, -u.z}; }
Rat qtrd(const Quat& u) { return 2 * u.t; }

Rat qnrd(const QuatAlg& A, const Quat& u) {
  return u.t * u.t - Rat(A.a) * u.x * u.x - Rat(A.b) * u.y * u.y + Rat(A.a) * Rat(A.b) * u.z * u.z;
}

int hilbert_symbol(Int a, Int b, long ell) {
  require(a != 0 && b != 0, kMod, "hilbert_symbol: nonzero arguments");
  if (ell == 0) return (a < 0 && b < 0) ? -1 : 1;
  require(ell == 2 || (ell > 2 && is_prime(ell)), kMod, "hilbert_symbol: place must be prime");
  long alpha = val_p(a, ell), beta = val_p(b, ell);
  Int u = a / pow_int(Int(ell), alpha), v = b / pow_int(Int(ell), beta);
  if (ell == 2) {
    int e = eps2(u) * eps2(v) + static_cast<int>(alpha % 2) * omega2(v) +
            static_cast<int>(beta % 2) * omega2(u);
    return (e % 2) ? -1 : 1;
  }
  int s = 1;
  if ((alpha % 2) && (beta % 2) && ell % 4 == 3) s = -s;
  if (beta % 2) s *= kronecker(u, Int(ell));
  if (alpha % 2) s *= kronecker(v, Int(ell));
  return s;
}

std::vector<long> quat_ramified(long a, long b) {
  require(a != 0 && b != 0, kMod, "quat_ramified: nonzero parameters");
  std::vector<long> cand = {2};
  for (long q : prime_divisors(std::abs(a))) cand.push_back(q);
  for (long q : prime_divisors(std::abs(b))) cand.push_back(q);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::vector<long> ram;
  int prod = hilbert_symbol(a, b, 0);
  for (long q : cand) {
    int s = hilbert_symbol(a, b, q);
    prod *= s;
    if (s == -1) ram.push_back(q);
  }
  require(prod == 1, kMod, "quat_ramified: product formula violated");
  return ram;
}

QuatAlg definite_algebra(const std::vector<long>& nminus) {
  std::vector<long> want = nminus;
  std::sort(want.begin(), want.end());
  require(!want.empty(), kMod, "definite_algebra: at least one finite ramified prime");
  for (size_t i = 0; i + 1 < want.size(); ++i)
    require(want[i] != want[i + 1], kMod, "definite_algebra: distinct primes");
  for (long q : want) require(is_prime(q), kMod, "definite_algebra: ramified places are primes");
  if (want.size() % 2 == 0)
    fail(ErrKind::hypothesis, kMod, "definite_algebra: need odd finite ramification count");
  for (long s = 2; s <= 120; ++s)
    for (long i = 1; i < s; ++i) {
      long a = -i, b = -(s - i);
      if (quat_ramified(a, b) == want) return QuatAlg{a, b};
    }
  fail(ErrKind::unsupported, kMod, "definite_algebra: search bound exceeded");
}

// ---------------------------------------------------------------------------
// Lattices and orders.

QLattice QLattice::from_quats(const QuatAlg& A, const std::vector<Quat>& gens) {
  require(!gens.empty(), kMod, "lattice: empty generating set");
  Int den = 1;
  for (const auto& g : gens)
    for (const auto& e : qvec(g)) {
      Int d = e.get_den();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
  MatZ rows;
  for (const auto& g : gens) {
    VecZ r(4);
    VecQ v = qvec(g);
    for (int j = 0; j < 4; ++j) {
      Rat s = v[j] * Rat(den);
      r[j] = s.get_num();
    }
    rows.push_back(std::move(r));
  }
  MatZ H = row_hnf(std::move(rows));
  require(H.size() == 4, kMod, "lattice: expected rank 4");
  Int g = den;
  for (const auto& row : H)
    for (const auto& e : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
  if (g > 1) {
    for (auto& row : H)
      for (auto& e : row) e /= g;
    den /= g;
  }
  return QLattice{A, std::move(H), den};
}

std::vector<Quat> QLattice::basis() const {
  std::vector<Quat> b;
  for (const auto& row : rows)
    b.push_back(Quat{Rat(row[0]) / den, Rat(row[1]) / den, Rat(row[2]) / den, Rat(row[3]) / den});
  return b;
}

Quat QLattice::element(const VecZ& c) const {
  Quat s{0, 0, 0, 0};
  auto b = basis();
  for (size_t i = 0; i < 4; ++i) s = qadd(s, qscale(Rat(c[i]), b[i]));
  return s;
}

VecQ QLattice::coords_q(const Quat& q) const {
  MatQ At(4, VecQ(4));
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) At[i][j] = Rat(rows[j][i]);
  VecQ v = qvec(q);
  for (auto& e : v) e *= Rat(den);
  auto sol = solve_q(std::move(At), v);
  require(sol.has_value(), kMod, "coords_q: basis is nonsingular");
  return *sol;
}

bool QLattice::contains(const Quat& q) const {
  for (const auto& c : coords_q(q))
    if (c.get_den() != 1) return false;
  return true;
}

Int QLattice::index_in(const QLattice& sup) const {
  for (const auto& b : basis())
    require(sup.contains(b), kMod, "index_in: not a sublattice");
  Rat r = Rat(abs(det_z(rows))) * pow_int(sup.den, 4) / (Rat(abs(det_z(sup.rows))) * pow_int(den, 4));
  require(r.get_den() == 1, kMod, "index_in: integral index");
  return r.get_num();
}

Int Order::reduced_disc() const {
  auto b = L.basis();
  MatQ G(4, VecQ(4));
  for (size_t i = 0; i < 4; ++i)
    for (size_t j = 0; j < 4; ++j) {
      G[i][j] = qtrd(qmul(L.alg, b[i], b[j]));
      require(G[i][j].get_den() == 1, kMod, "disc: trace pairing must be integral");
    }
  Rat d = det_q(std::move(G));
  if (d < 0) d = -d;
  Int n = d.get_num();
  require(d.get_den() == 1 && is_perfect_square(n), kMod, "disc: square Gram determinant");
  return isqrt(n);
}

Order order_closure(const QuatAlg& A, std::vector<Quat> gens) {
  gens.push_back(qone());
  for (int round = 0; round < 3 && rank_q(gens) < 4; ++round) {
    size_t n = gens.size();
    for (size_t i = 0; i < n && gens.size() < 200; ++i)
      for (size_t j = 0; j < n && gens.size() < 200; ++j)
        gens.push_back(qmul(A, gens[i], gens[j]));
  }
  require(rank_q(gens) == 4, kMod, "order_closure: generators span rank 4");
  QLattice L = QLattice::from_quats(A, gens);
  for (int it = 0; it < 64; ++it) {
    // non-integral generators double the denominator every round
    if (mpz_sizeinbase(L.den.get_mpz_t(), 2) > 256)
      fail(ErrKind::hypothesis, kMod, "order_closure: denominators diverge");
    auto b = L.basis();
    std::vector<Quat> all = b;
    for (const auto& u : b)
      for (const auto& v : b) all.push_back(qmul(A, u, v));
    QLattice L2 = QLattice::from_quats(A, all);
    if (L2 == L) {
      require(L.contains(qone()), kMod, "order_closure: contains 1");
      for (const auto& u : b)
        if (qtrd(u).get_den() != 1 || qnrd(A, u).get_den() != 1)
          fail(ErrKind::hypothesis, kMod, "order_closure: non-integral elements");
      return Order{std::move(L)};
    }
    L = std::move(L2);
  }
  fail(ErrKind::hypothesis, kMod, "order_closure: generated ring is not finitely generated");
}

Order maximal_order(const QuatAlg& A) {
  require(A.a < 0 && A.b < 0, kMod, "maximal_order: definite algebra expected");
  Order O = order_closure(A, {Quat{0, 1, 0, 0}, Quat{0, 0, 1, 0}, Quat{0, 0, 0, 1}});
  Int target = 1;
  for (long q : quat_ramified(A.a, A.b)) target *= q;
  Int d = O.reduced_disc();
  while (d != target) {
    require(d % target == 0, kMod, "maximal_order: discriminant divisibility");
    Int ratio = d / target;
    long ell = factor(ratio.get_si())[0].first;
    auto b = O.L.basis();
    bool improved = false;
    long cap = ell * ell * ell * ell;
    for (long code = 1; code < cap && !improved; ++code) {
      long c = code;
      Quat x{0, 0, 0, 0};
      for (int j = 0; j < 4; ++j) {
        x = qadd(x, qscale(Rat(c % ell), b[j]));
        c /= ell;
      }
      x = qscale(Rat(Int(1), Int(ell)), x);
      if (qtrd(x).get_den() != 1 || qnrd(A, x).get_den() != 1) continue;
      if (O.contains(x)) continue;
      std::vector<Quat> gens = b;
      gens.push_back(x);
      try {
        Order O2 = order_closure(A, gens);
        Int d2 = O2.reduced_disc();
        if (d2 < d) {
          O = std::move(O2);
          d = d2;
          improved = true;
        }
      } catch (const Error&) {
      }
    }
    require(improved, kMod, "maximal_order: saturation step found no enlargement");
  }
  return O;
}

namespace {

// Right order of the left ideal with basis HI (coordinates in E's basis).
Order ideal_right_order(const Order& E, const MatZ& HI, long ell) {
  auto b = E.L.basis();
  std::vector<Quat> xk;
  for (const auto& row : HI) {
    Quat s{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j) s = qadd(s, qscale(Rat(row[j]), b[j]));
    xk.push_back(s);
  }
  MatZ adjH = mat_adjugate(HI);
  MatZ A;
  for (const auto& x : xk) {
    MatZ P(4, VecZ(4));
    for (int j = 0; j < 4; ++j) P[j] = int_coords(E.L, qmul(E.alg(), x, b[j]), "right order: integral products");
    MatZ Mt = mat_transpose(mat_mul(P, adjH));
    for (auto& r : Mt) A.push_back(std::move(r));
  }
  MatZ K = kernel_mod(A, pow_int(Int(ell), 3));
  std::vector<Quat> gens;
  for (const auto& z : K) {
    Quat s{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j) s = qadd(s, qscale(Rat(z[j]), b[j]));
    gens.push_back(qscale(Rat(Int(1), Int(ell)), s));
  }
  QLattice L = QLattice::from_quats(E.alg(), gens);
  require(order_closure(E.alg(), gens).L == L, kMod, "right order: multiplicatively closed");
  Order R{std::move(L)};
  require(R.reduced_disc() == E.reduced_disc(), kMod, "right order: discriminant preserved");
  return R;
}

QLattice intersect_lattices(const QLattice& L1, const QLattice& L2) {
  Int D;
  mpz_lcm(D.get_mpz_t(), L1.den.get_mpz_t(), L2.den.get_mpz_t());
  MatZ R1 = L1.rows, R2 = L2.rows;
  Int f1 = D / L1.den, f2 = D / L2.den;
  for (auto& row : R1)
    for (auto& e : row) e *= f1;
  for (auto& row : R2)
    for (auto& e : row) e *= f2;
  MatZ Ri = lattice_intersect(R1, R2);
  std::vector<Quat> gens;
  for (const auto& row : Ri)
    gens.push_back(Quat{Rat(row[0]) / D, Rat(row[1]) / D, Rat(row[2]) / D, Rat(row[3]) / D});
  return QLattice::from_quats(L1.alg, gens);
}

}  // namespace

Order eichler_order(const Order& omax, long nplus) {
  require(nplus >= 1, kMod, "eichler_order: positive level");
  if (!is_squarefree(nplus))
    fail(ErrKind::unsupported, kMod, "eichler_order: squarefree level only");
  Order E = omax;
  {
    Int d0 = E.reduced_disc();
    for (long ell : prime_divisors(nplus))
      if (d0 % ell == 0)
        fail(ErrKind::hypothesis, kMod, "eichler_order: level must be prime to discriminant");
  }
  for (long ell : prime_divisors(nplus)) {
    Int dprev = E.reduced_disc();
    auto b = E.L.basis();
    bool done = false;
    long cap = ell * ell * ell * ell;
    for (long code = 1; code < cap && !done; ++code) {
      long c = code;
      Quat x{0, 0, 0, 0};
      for (int j = 0; j < 4; ++j) {
        x = qadd(x, qscale(Rat(c % ell), b[j]));
        c /= ell;
      }
      Rat n = qnrd(E.alg(), x);
      if (mod_pos(n.get_num(), ell) != 0) continue;
      // left ideal E x + ell E, coordinates relative to E's basis
      MatZ rows;
      for (int j = 0; j < 4; ++j)
        rows.push_back(int_coords(E.L, qmul(E.alg(), b[j], x), "eichler: integral ideal"));
      for (int j = 0; j < 4; ++j) {
        VecZ r(4, 0);
        r[j] = ell;
        rows.push_back(std::move(r));
      }
      MatZ HI = row_hnf(std::move(rows));
      require(det_z(HI) == Int(ell) * ell, kMod, "eichler: rank-one ideal has index ell^2");
      Order Orr = ideal_right_order(E, HI, ell);
      QLattice LI = intersect_lattices(E.L, Orr.L);
      Order E2{std::move(LI)};
      require(order_closure(E.alg(), E2.L.basis()).L == E2.L, kMod, "eichler: closed intersection");
      require(E2.reduced_disc() == dprev * ell, kMod, "eichler: level raises discriminant");
      E = std::move(E2);
      done = true;
    }
    require(done, kMod, "eichler_order: no rank-one vector found");
  }
  return E;
}

// ---------------------------------------------------------------------------
// Short vectors.

std::vector<Quat> span_by_norm(const QuatAlg& A, const std::vector<Quat>& basis,
                               const Int& target) {
  require(target >= 0, kMod, "span_by_norm: nonnegative target");
  size_t n = basis.size();
  require(n >= 1 && n <= 4, kMod, "span_by_norm: rank between 1 and 4");
  std::vector<Quat> out;
  if (target == 0) return out;
  MatQ M(n, VecQ(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      M[i][j] = qtrd(qmul(A, basis[i], qconj(basis[j]))) / 2;
  // Q(c) = sum_i d_i (c_i + sum_{j>i} U[i][j] c_j)^2
  VecQ d(n);
  MatQ U(n, VecQ(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    d[i] = M[i][i];
    require(d[i] > 0, kMod, "span_by_norm: positive definite norm form");
    for (size_t j = i + 1; j < n; ++j) U[i][j] = M[i][j] / d[i];
    for (size_t r = i + 1; r < n; ++r)
      for (size_t c = i + 1; c < n; ++c) M[r][c] -= d[i] * U[i][r] * U[i][c];
  }
  VecZ cs(n, 0);
  std::function<void(size_t, Rat)> rec = [&](size_t lvl, Rat R) {
    size_t i = lvl;
    Rat s = 0;
    for (size_t j = i + 1; j < n; ++j) s += U[i][j] * Rat(cs[j]);
    Int rb = floor_sqrt_rat(R / d[i]) + 1;
    Int lo = rat_floor(-s) - rb, hi = rat_ceil(-s) + rb;
    for (Int ci = lo; ci <= hi; ++ci) {
      Rat t = Rat(ci) + s;
      Rat q = d[i] * t * t;
      if (q > R) continue;
      cs[i] = ci;
      if (i == 0) {
        if (q == R) {
          size_t fz = n;
          for (size_t j = 0; j < n; ++j)
            if (cs[j] != 0) {
              fz = j;
              break;
            }
          if (fz < n && cs[fz] > 0) {
            Quat v{0, 0, 0, 0};
            for (size_t j = 0; j < n; ++j) v = qadd(v, qscale(Rat(cs[j]), basis[j]));
            out.push_back(v);
          }
        }
      } else {
        rec(i - 1, R - q);
      }
    }
    cs[i] = 0;
  };
  rec(n - 1, Rat(target));
  return out;
}

std::vector<Quat> lattice_by_norm(const QLattice& L, const Int& target) {
  return span_by_norm(L.alg, L.basis(), target);
}

// ---------------------------------------------------------------------------
// Orientations.

OrientationRam::OrientationRam(const Order& O, long ell) : ell_(ell), r_(1), O_(O) {
  Int d = O_.reduced_disc();
  require(d % ell == 0 && (d / ell) % ell != 0, kMod,
          "orientation: prime must exactly divide the discriminant");
  auto b = O_.L.basis();
  std::vector<std::vector<long>> G(4, std::vector<long>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Rat t = qtrd(qmul(O_.alg(), b[i], b[j]));
      G[i][j] = lmod(t.get_num(), ell);
    }
  auto J = fl_nullspace(G, ell);
  require(J.size() == 2, kMod, "orientation: trace radical has rank 2");
  VecZ onez = int_coords(O_.L, qone(), "orientation: coordinates of 1");
  std::vector<long> one(4);
  for (int j = 0; j < 4; ++j) one[j] = lmod(onez[j], ell);

  auto make_cols = [&](const std::vector<long>& tcol) {
    std::vector<std::vector<long>> S(4, std::vector<long>(4));
    for (int i = 0; i < 4; ++i) {
      S[i][0] = one[i];
      S[i][1] = tcol[i];
      S[i][2] = J[0][i];
      S[i][3] = J[1][i];
    }
    return S;
  };

  // element generating the residue field over its prime field
  std::vector<long> tcoords;
  long tau = 0, nu = 0;
  long cap = ell * ell * ell * ell;
  for (long code = 1; code < cap; ++code) {
    long c = code;
    std::vector<long> e(4);
    for (int j = 0; j < 4; ++j) {
      e[j] = c % ell;
      c /= ell;
    }
    Quat t{0, 0, 0, 0};
    for (int j = 0; j < 4; ++j) t = qadd(t, qscale(Rat(e[j]), b[j]));
    long tt = lmod(qtrd(t).get_num(), ell), nn = lmod(qnrd(O_.alg(), t).get_num(), ell);
    if (ell == 2) {
      if (tt != 1 || nn != 1) continue;
    } else if (!fl_invertible(make_cols(e), ell)) {
      continue;
    }
    tcoords = e;
    tau = tt;
    nu = nn;
    break;
  }
  require(!tcoords.empty(), kMod, "orientation: no field generator found");

  std::vector<long> spre(4);
  if (ell == 2) {
    spre = tcoords;
  } else {
    long r0 = ((tau * tau - 4 * nu) % ell + ell) % ell;
    r0 = r0 * fl_inv(4 % ell, ell) % ell;
    require(kronecker(r0, ell) == -1, kMod, "orientation: residue field is quadratic");
    while (kronecker(r_, ell) != -1) ++r_;
    long c0 = sqrt_mod_p(Int(r_) * Int(fl_inv(r0, ell)) % ell, ell).get_si();
    long shift = tau * fl_inv(2, ell) % ell;
    for (int j = 0; j < 4; ++j)
      spre[j] = ((tcoords[j] - shift * one[j]) % ell + ell) % ell * c0 % ell;
  }
  auto S = make_cols(spre);
  require(fl_invertible(S, ell), kMod, "orientation: basis change invertible");
  solve_.assign(4, VecZ(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) solve_[i][j] = S[i][j];
}

std::pair<long, long> OrientationRam::image(const Quat& u) const {
  VecZ c = int_coords(O_.L, u, "orientation: element of the order");
  std::vector<long> y(4);
  for (int j = 0; j < 4; ++j) y[j] = lmod(c[j], ell_);
  std::vector<std::vector<long>> S(4, std::vector<long>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) S[i][j] = solve_[i][j].get_si();
  auto z = fl_solve(std::move(S), y, ell_);
  return {z[0], z[1]};
}

std::pair<long, long> OrientationRam::fmul(std::pair<long, long> a,
                                           std::pair<long, long> b) const {
  long ell = ell_;
  auto m = [&](long v) { return ((v % ell) + ell) % ell; };
  if (ell == 2)  // w^2 = w + 1
    return {m(a.first * b.first + a.second * b.second),
            m(a.first * b.second + a.second * b.first + a.second * b.second)};
  return {m(a.first * b.first + a.second * b.second % ell * r_),
          m(a.first * b.second + a.second * b.first)};
}

std::pair<long, long> OrientationRam::sqrt_of(long n) const {
  if (ell_ == 2) return {((n % 2) + 2) % 2, 0};
  long m = ((n % ell_) + ell_) % ell_;
  require(kronecker(m, ell_) == -1, kMod, "sqrt_of: expects a nonresidue");
  long beta = sqrt_mod_p(Int(m) * Int(fl_inv(r_, ell_)) % ell_, ell_).get_si();
  return {0, beta};
}

OrientationSplit::OrientationSplit(const Order& E, long ell) : ell_(ell), E_(E) {
  Int d = E_.reduced_disc();
  require(d % ell == 0 && (d / ell) % ell != 0, kMod,
          "orientation: prime must exactly divide the level");
  auto b = E_.L.basis();
  VecZ onez = int_coords(E_.L, qone(), "orientation: coordinates of 1");
  std::vector<long> one(4);
  for (int j = 0; j < 4; ++j) one[j] = lmod(onez[j], ell);
  long C[4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      VecZ c = int_coords(E_.L, qmul(E_.alg(), b[i], b[j]), "orientation: closed order");
      for (int k = 0; k < 4; ++k) C[i][j][k] = lmod(c[k], ell);
    }
  std::vector<std::vector<long>> homs;
  long cap = ell * ell * ell * ell;
  for (long code = 0; code < cap; ++code) {
    long c = code;
    std::vector<long> phi(4);
    for (int j = 0; j < 4; ++j) {
      phi[j] = c % ell;
      c /= ell;
    }
    long u = 0;
    for (int j = 0; j < 4; ++j) u += one[j] * phi[j];
    if (((u % ell) + ell) % ell != 1) continue;
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i)
      for (int j = 0; j < 4 && ok; ++j) {
        long lhs = 0;
        for (int k = 0; k < 4; ++k) lhs += C[i][j][k] * phi[k];
        ok = ((lhs - phi[i] * phi[j]) % ell + ell) % ell == 0;
      }
    if (ok) homs.push_back(std::move(phi));
  }
  require(homs.size() == 2, kMod, "orientation: exactly two residue maps at a level prime");
  std::sort(homs.begin(), homs.end());
  phi_ = homs[0];
  phi_other_ = homs[1];
}

long OrientationSplit::image(const Quat& u) const {
  VecZ c = int_coords(E_.L, u, "orientation: element of the order");
  long s = 0;
  for (int j = 0; j < 4; ++j) s += lmod(c[j], ell_) * phi_[j];
  return ((s % ell_) + ell_) % ell_;
}

// ---------------------------------------------------------------------------
// Splitting map.

SplittingMap::SplittingMap(const Order& O, long p, long N) : O_(O), p_(p), N_(N) {
  require(is_prime(p) && N >= 1, kMod, "splitting: prime modulus");
  require(O_.reduced_disc() % p != 0, kMod, "splitting: p must be coprime to the discriminant");
  pN_ = pow_int(Int(p), N);
  auto b = O_.L.basis();
  VecZ onez = int_coords(O_.L, qone(), "splitting: coordinates of 1");
  Int T[4][4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      VecZ c = int_coords(O_.L, qmul(O_.alg(), b[i], b[j]), "splitting: closed order");
      for (int k = 0; k < 4; ++k) T[i][j][k] = c[k];
    }
  auto cmulv = [&](const VecZ& u, const VecZ& v) {
    VecZ w(4, 0);
    for (int i = 0; i < 4; ++i) {
      if (u[i] == 0) continue;
      for (int j = 0; j < 4; ++j) {
        if (v[j] == 0) continue;
        Int f = u[i] * v[j];
        for (int k = 0; k < 4; ++k) w[k] += f * T[i][j][k];
      }
    }
    for (auto& e : w) e = mod_pos(e, pN_);
    return w;
  };

  // basis combination whose characteristic polynomial splits mod p
  VecZ tc;
  Int tau, nu;
  long cap = p * p * p * p;
  for (long code = 1; code < cap && tc.empty(); ++code) {
    long c = code;
    Quat t{0, 0, 0, 0};
    VecZ e(4);
    for (int j = 0; j < 4; ++j) {
      e[j] = c % p;
      t = qadd(t, qscale(Rat(c % p), b[j]));
      c /= p;
    }
    Int tt = qtrd(t).get_num(), nn = qnrd(O_.alg(), t).get_num();
    bool ok = (p == 2) ? (mod_pos(tt, 2) == 1 && mod_pos(nn, 2) == 0)
                       : kronecker(tt * tt - 4 * nn, p) == 1;
    if (!ok) continue;
    tc = e;
    tau = tt;
    nu = nn;
  }
  require(!tc.empty(), kMod, "splitting: no split element found");

  // Newton-lift a root of X^2 - tau X + nu from mod p to mod p^N
  Int lam;
  if (p == 2) {
    lam = 0;
  } else {
    Int r0 = sqrt_mod_p(mod_pos(tau * tau - 4 * nu, p), p);
    lam = mod_pos((tau + r0) * inv_mod(Int(2), Int(p)), p);
  }
  for (int it = 0; it < 64; ++it) {
    Int f = mod_pos(lam * lam - tau * lam + nu, pN_);
    if (f == 0) break;
    Int df = mod_pos(2 * lam - tau, pN_);
    lam = mod_pos(lam - f * inv_mod(df, pN_), pN_);
  }
  require(mod_pos(lam * lam - tau * lam + nu, pN_) == 0, kMod, "splitting: root lift converged");
  Int lamp = mod_pos(tau - lam, pN_);
  Int den0 = mod_pos(lam - lamp, pN_);
  require(mod_pos(den0, p) != 0, kMod, "splitting: distinct roots");

  // idempotent e = (t - lambda') / (lambda - lambda')
  Int idn = inv_mod(den0, pN_);
  VecZ ec(4);
  for (int j = 0; j < 4; ++j) {
    Int v = tc[j] - lamp * onez[j];
    ec[j] = mod_pos(v * idn, pN_);
  }
  require(cmulv(ec, ec) == ec, kMod, "splitting: idempotent");
  {
    bool z = true, o = true;
    for (int j = 0; j < 4; ++j) {
      if (mod_pos(ec[j], p) != 0) z = false;
      if (mod_pos(ec[j] - onez[j], p) != 0) o = false;
    }
    require(!z && !o, kMod, "splitting: nontrivial idempotent");
  }

  // second module generator g e with (e, g e) unimodular rows
  VecZ gec;
  long rows[2] = {-1, -1};
  Int det2;
  for (long code = 1; code < cap && rows[0] < 0; ++code) {
    long c = code;
    VecZ g(4);
    for (int j = 0; j < 4; ++j) {
      g[j] = c % p;
      c /= p;
    }
    VecZ cand = cmulv(g, ec);
    for (int r1 = 0; r1 < 4 && rows[0] < 0; ++r1)
      for (int r2 = r1 + 1; r2 < 4 && rows[0] < 0; ++r2) {
        Int dd = mod_pos(ec[r1] * cand[r2] - ec[r2] * cand[r1], pN_);
        if (mod_pos(dd, p) != 0) {
          rows[0] = r1;
          rows[1] = r2;
          det2 = dd;
          gec = cand;
        }
      }
  }
  require(rows[0] >= 0, kMod, "splitting: free module basis found");

  Int idet = inv_mod(det2, pN_);
  auto solve2 = [&](const VecZ& v) {
    // [e ge] (x y)^T = v on the two chosen rows, verified on the rest
    Int x = mod_pos((gec[rows[1]] * v[rows[0]] - gec[rows[0]] * v[rows[1]]) * idet, pN_);
    Int y = mod_pos((-ec[rows[1]] * v[rows[0]] + ec[rows[0]] * v[rows[1]]) * idet, pN_);
    for (int r = 0; r < 4; ++r)
      require(mod_pos(ec[r] * x + gec[r] * y - v[r], pN_) == 0, kMod,
              "splitting: module rank two");
    return std::pair<Int, Int>{x, y};
  };

  for (int i = 0; i < 4; ++i) {
    VecZ ei(4, 0);
    ei[i] = 1;
    auto [a, g] = solve2(cmulv(ei, ec));
    auto [bb, dd] = solve2(cmulv(ei, gec));
    img_[i] = {a, bb, g, dd};
  }

  // certify: ring map, unit, trace and determinant
  auto img_of = [&](const VecZ& c) {
    std::array<Int, 4> m{0, 0, 0, 0};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) m[k] = mod_pos(m[k] + c[i] * img_[i][k], pN_);
    return m;
  };
  auto mat_mul2 = [&](const std::array<Int, 4>& x, const std::array<Int, 4>& y) {
    return std::array<Int, 4>{mod_pos(x[0] * y[0] + x[1] * y[2], pN_),
                              mod_pos(x[0] * y[1] + x[1] * y[3], pN_),
                              mod_pos(x[2] * y[0] + x[3] * y[2], pN_),
                              mod_pos(x[2] * y[1] + x[3] * y[3], pN_)};
  };
  auto idm = img_of(onez);
  require(idm[0] == 1 && idm[1] == 0 && idm[2] == 0 && idm[3] == 1, kMod, "splitting: unital");
  for (int i = 0; i < 4; ++i) {
    Int tr = mod_pos(img_[i][0] + img_[i][3], pN_);
    Int dt = mod_pos(img_[i][0] * img_[i][3] - img_[i][1] * img_[i][2], pN_);
    require(tr == mod_pos(qtrd(b[i]).get_num(), pN_), kMod, "splitting: trace compatible");
    require(dt == mod_pos(qnrd(O_.alg(), b[i]).get_num(), pN_), kMod,
            "splitting: determinant compatible");
    VecZ ei(4, 0);
    ei[i] = 1;
    for (int j = 0; j < 4; ++j) {
      VecZ ej(4, 0);
      ej[j] = 1;
      VecZ pc(4);
      for (int k = 0; k < 4; ++k) pc[k] = mod_pos(T[i][j][k], pN_);
      auto lhs = mat_mul2(img_of(ei), img_of(ej));
      require(lhs == img_of(pc), kMod, "splitting: multiplicative");
    }
  }
}

std::array<Int, 4> SplittingMap::image(const Quat& u) const {
  VecQ c = O_.L.coords_q(u);
  std::array<Int, 4> m{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    Int num = c[i].get_num(), den = c[i].get_den();
    require(mod_pos(den, p_) != 0, kMod, "splitting: p-integral coordinates");
    Int v = mod_pos(num * inv_mod(mod_pos(den, pN_), pN_), pN_);
    for (int k = 0; k < 4; ++k) m[k] = mod_pos(m[k] + v * img_[i][k], pN_);
  }
  return m;
}

}  // namespace aclp
