#include "aclp/embeddings.hpp"

#include <algorithm>
#include <optional>

namespace aclp {

namespace {

constexpr const char* kMod = "embeddings";
constexpr long kNoErr = kPrecInf;
constexpr long kMargin = 8;
constexpr long kShellMax = 6;  // p-power search radius for sqrt(D) images
constexpr long kConjMax = 8;   // and for conjugator norms p^(2k)

Mat2 mul2(const Mat2& X, const Mat2& Y) {
  return Mat2{X[0] * Y[0] + X[1] * Y[2], X[0] * Y[1] + X[1] * Y[3],
              X[2] * Y[0] + X[3] * Y[2], X[2] * Y[1] + X[3] * Y[3]};
}

bool coords_integral(const Order& E, const Quat& q) {
  for (const Rat& c : E.L.coords_q(q))
    if (c.get_den() != 1) return false;
  return true;
}

// membership in the p-order: every coordinate denominator a p-power
bool coords_p_order(const Order& E, long p, const Quat& q) {
  for (const Rat& c : E.L.coords_q(q)) {
    Int den = c.get_den();
    while (den % p == 0) den /= p;
    if (den != 1) return false;
  }
  return true;
}

bool p_primitive(const Order& E, long p, const Quat& w) {
  for (const Rat& c : E.L.coords_q(w)) {
    require(c.get_den() == 1, kMod, "primitivity of a fractional element");
    if (c.get_num() % p != 0) return true;
  }
  return false;
}

// the ring generator (D + sqrt(D))/2 must land in the p-order
bool optimal_image(const Order& E, long p, long D, const Quat& u) {
  Quat g = qscale(Rat(1) / Rat(2), qadd(qscale(Rat(D), qone()), u));
  return coords_p_order(E, p, g);
}

std::pair<long, long> neg_pair(std::pair<long, long> x, long ell) {
  return {(ell - x.first % ell) % ell, (ell - x.second % ell) % ell};
}

// p-power multiple with integer coordinates; invisible mod 2 since p is odd
// whenever 2 divides the level
Quat integral_scaled(const Order& E, long p, Quat q) {
  for (long t = 0; t <= 4 * kShellMax; ++t) {
    if (coords_integral(E, q)) return q;
    q = qscale(Rat(p), q);
  }
  fail(ErrKind::invariant, kMod, "element is not in the p-order");
}

// local orientation filter: +1 or -1 for the compatible sign of u, 0 when
// neither sign matches every place
int oriented_sign(const Order& E, const FieldData& K, const Quat& u, long a,
                  const std::vector<long>& ram, const std::vector<long>& split) {
  long p = K.p;
  Int pa = pow_int(p, a);
  Quat w = qscale(Rat(pa), u);
  bool plus = true, minus = true;
  for (long ell : ram) {
    OrientationRam ori(E, ell);
    if (ell == 2) {
      // compare (1 + u)/2 against the pinned root w of x^2 + x + 1 in F_4
      Quat h = integral_scaled(E, p, qscale(Rat(1) / Rat(2), qadd(qone(), u)));
      auto im = ori.image(h);
      std::pair<long, long> want{0, 1};
      plus = plus && im == want;
      minus = minus && std::pair<long, long>{(im.first + 1) % 2, im.second} == want;
    } else {
      auto im = ori.image(w);
      long s = inv_mod(pa, Int(ell)).get_si();
      auto scl = [&](std::pair<long, long> x) {
        return std::pair<long, long>{mod_pos(Int(x.first) * s, Int(ell)).get_si(),
                                     mod_pos(Int(x.second) * s, Int(ell)).get_si()};
      };
      auto want = ori.sqrt_of(mod_pos(Int(K.D), Int(ell)).get_si());
      plus = plus && scl(im) == want;
      minus = minus && scl(neg_pair(im, ell)) == want;
    }
  }
  for (long ell : split) {
    OrientationSplit os(E, ell);
    if (ell == 2) {
      Quat h = integral_scaled(E, p, qscale(Rat(1) / Rat(2), qadd(qone(), u)));
      long im = os.image(h) % 2;
      plus = plus && im == 0;
      minus = minus && (1 + im) % 2 == 0;
    } else {
      long im = os.image(w);
      long s = inv_mod(pa, Int(ell)).get_si();
      long v = mod_pos(Int(im) * s, Int(ell)).get_si();
      long r0 = sqrt_mod_p(Int(K.D), ell).get_si();
      plus = plus && v == r0;
      minus = minus && (ell - v) % ell == r0;
    }
  }
  if (plus && !minus) return 1;
  if (minus && !plus) return -1;
  return 0;
}

// All w = c0 v0 + c1 v1 + c2 v2 with nrd(w) = target, up to sign (first
// nonzero coefficient positive). Outer coefficients run over the ranges the
// definite Gram matrix allows; the innermost one is solved exactly, which
// keeps large targets tractable where a full box scan is not.
std::vector<Quat> ternary_by_norm(const QuatAlg& A, const std::vector<Quat>& v,
                                  const Int& target) {
  Int S[3][3];
  Int den = 1;
  {
    Rat g[3][3];
    for (int i = 0; i < 3; ++i) g[i][i] = qnrd(A, v[i]) * 2;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        g[i][j] = qnrd(A, qadd(v[i], v[j])) * 2 - g[i][i] - g[j][j];
        g[i][j] /= 2;
        g[j][i] = g[i][j];
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Int d = g[i][j].get_den();
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) S[i][j] = Rat(g[i][j] * den).get_num();
  }
  // c^T S c = 2 den nrd; coefficient bounds from the adjugate
  Int T = 2 * den * target;
  Int det = S[0][0] * (S[1][1] * S[2][2] - S[1][2] * S[1][2]) -
            S[0][1] * (S[0][1] * S[2][2] - S[1][2] * S[0][2]) +
            S[0][2] * (S[0][1] * S[1][2] - S[1][1] * S[0][2]);
  require(det > 0 && S[0][0] > 0, kMod, "trace-zero norm form is not definite");
  Int adj1 = S[0][0] * S[2][2] - S[0][2] * S[0][2];
  Int adj2 = S[0][0] * S[1][1] - S[0][1] * S[0][1];
  std::vector<Quat> out;
  auto emit = [&](Int c0, Int c1, Int c2) {
    Int lead = c0 != 0 ? c0 : (c1 != 0 ? c1 : c2);
    if (lead == 0) return;
    if (lead < 0) {
      c0 = -c0;
      c1 = -c1;
      c2 = -c2;
    }
    out.push_back(qadd(qadd(qscale(Rat(c0), v[0]), qscale(Rat(c1), v[1])),
                       qscale(Rat(c2), v[2])));
  };
  Int b1 = sqrt(T * adj1 / det), b2 = sqrt(T * adj2 / det);
  for (Int c2 = 0; c2 <= b2; ++c2)
    for (Int c1 = (c2 == 0 ? Int(0) : -b1); c1 <= b1; ++c1) {
      Int L = S[0][1] * c1 + S[0][2] * c2;
      Int R = S[1][1] * c1 * c1 + 2 * S[1][2] * c1 * c2 + S[2][2] * c2 * c2 - T;
      Int dq = L * L - S[0][0] * R;
      if (dq < 0) continue;
      Int r = sqrt(dq);
      if (r * r != dq) continue;
      for (int s : {1, -1}) {
        Int num = -L + s * r;
        if (!mpz_divisible_p(num.get_mpz_t(), S[0][0].get_mpz_t())) continue;
        emit(num / S[0][0], c1, c2);
        if (r == 0 || (c1 == 0 && c2 == 0)) break;
      }
    }
  return out;
}

// Exact search for x = c1 v1 + c2 v2 with nrd(x) = p^(2k), k <= kmax.
// Solves the definite binary norm form against each target instead of
// scanning a coefficient box, so misses stay cheap at large k.
std::optional<Quat> binary_p_power(const QuatAlg& A, const Quat& v1, const Quat& v2,
                                   long p, long kmax) {
  Rat ar = qnrd(A, v1), cr = qnrd(A, v2);
  Rat hr = qnrd(A, qadd(v1, v2)) - ar - cr;
  Int den = 1;
  for (const Rat& r : {ar, cr, hr}) {
    Int d = r.get_den();
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  Int a = Rat(ar * den).get_num();
  Int c = Rat(cr * den).get_num();
  Int h = Rat(hr * den).get_num();
  Int disc = 4 * a * c - h * h;
  require(a > 0 && disc > 0, kMod, "conjugating space has indefinite norm form");
  for (long k = 0; k <= kmax; ++k) {
    Int t = den * pow_int(Int(p), 2 * k);
    Int ycap = 4 * a * t;
    for (Int y = 0; disc * y * y <= ycap; ++y) {
      Int dq = h * h * y * y - 4 * a * (c * y * y - t);
      if (dq < 0) continue;
      Int r = sqrt(dq);
      if (r * r != dq) continue;
      for (int s : {1, -1}) {
        Int num = -h * y + s * r;
        if (!mpz_divisible_p(num.get_mpz_t(), Int(2 * a).get_mpz_t())) continue;
        Int x = num / (2 * a);
        if (x == 0 && y == 0) continue;
        return qadd(qscale(Rat(x), v1), qscale(Rat(y), v2));
      }
    }
  }
  return std::nullopt;
}

// saturated basis, in order coordinates, of { x in the order : x u1 = u2 x }
MatZ twisted_centralizer(const Order& E, const Quat& u1, const Quat& u2) {
  auto bas = E.L.basis();
  MatQ A(4, VecQ(4));
  for (int c = 0; c < 4; ++c) {
    Quat q = qsub(qmul(E.alg(), bas[c], u1), qmul(E.alg(), u2, bas[c]));
    A[0][c] = q.t;
    A[1][c] = q.x;
    A[2][c] = q.y;
    A[3][c] = q.z;
  }
  MatZ Ai(4, VecZ(4));
  for (int r = 0; r < 4; ++r) {
    Int l = 1;
    for (int c = 0; c < 4; ++c) {
      Int d = A[r][c].get_den();
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    for (int c = 0; c < 4; ++c) {
      Rat v = Rat(l) * A[r][c];
      Ai[r][c] = v.get_num();
    }
  }
  return kernel_int(Ai);
}

std::pair<long, Quat> locate(const QuotientGraph& G, const VertexM& v) {
  for (long r = 0; r < static_cast<long>(G.vertices().size()); ++r) {
    const VertexM& R = G.vertices()[r].M;
    if ((R.det_val() + v.det_val()) % 2) continue;
    if (auto t = G.ctx().transporter(v, R)) return {r, *t};
  }
  fail(ErrKind::invariant, kMod, "fixed vertex has no quotient representative");
}

struct Seed {
  Mat2 T0;
  long rep = -1;
  Quat glue;
  long skip = -1;  // excluded slot, -1 for none
};

std::vector<Seed> domain_seeds(const BTContext& ctx, const Embedding& e, long kernel) {
  std::vector<Seed> seeds;
  if (kernel == 2) {
    seeds.push_back({ctx.vertex_matrix(e.ve), e.rep_e, e.glue_e, e.slot_ev});
    seeds.push_back({ctx.vertex_matrix(e.vo), e.rep_o, e.glue_o, e.slot_ov});
  } else {
    seeds.push_back({ctx.vertex_matrix(e.ve), e.rep_e, e.glue_e, -1});
  }
  return seeds;
}

struct RelState {
  long rep = -1;
  Quat glue;
  long k = 0, j = 0;
  Int b = 0;
  long depth = 0;
};

// descent below one seed, mirroring the root-walk slot conventions; every
// chart and sample is pushed forward through the seed's vertex matrix
void relative_walk(const QuotientGraph& G, const EdgeMeasure& mu, const TeichCenters& tc,
                   const Seed& seed, const RelState& st, long m,
                   const std::function<void(const DomainBall&)>& visit) {
  long p = G.ctx().p();
  long lo = (st.depth > 0 && st.j == 0) ? 1 : 0;
  long hi = (st.depth > 0 && st.j > 0) ? p - 1 : p;
  Mat2 Tloc{pow_int(Int(p), st.j), st.b, Int(0), pow_int(Int(p), st.k)};
  Mat2 T = mul2(seed.T0, Tloc);
  for (long s = lo; s <= hi; ++s) {
    if (st.depth == 0 && s == seed.skip) continue;
    auto ts = G.step(st.rep, st.glue, T, s);
    RelState ch = st;
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
      DomainBall B;
      Int lx, ly;
      if (ch.j > 0) {
        B.M = mul2(seed.T0, Mat2{pow_int(Int(p), ch.j), ch.b, Int(0), pow_int(Int(p), ch.k)});
        lx = tc.center(ch.b, ch.j);
        ly = pow_int(Int(p), ch.k);
      } else {
        B.M = mul2(seed.T0, Mat2{Int(0), Int(1), pow_int(Int(p), ch.k), Int(0)});
        lx = 1;
        ly = 0;
      }
      B.sx = seed.T0[0] * lx + seed.T0[1] * ly;
      B.sy = seed.T0[2] * lx + seed.T0[3] * ly;
      B.mu = mu.mu_oriented(ts.edge);
      B.edge = ts.edge;
      visit(B);
    } else {
      relative_walk(G, mu, tc, seed, ch, m, visit);
    }
  }
}

}  // namespace

EmbeddingSystem::EmbeddingSystem(const QuotientGraph& G, const FieldData& K)
    : G_(&G), K_(K), delta_(ClassGroup(K.D), K.p) {
  const BTContext& ctx = G.ctx();
  const Order& E = ctx.order();
  long p = K_.p;
  if (p != ctx.p()) fail(ErrKind::bad_input, kMod, "field prime differs from the tree prime");

  std::vector<long> ram = quat_ramified(E.alg().a, E.alg().b);
  std::vector<long> split = ctx.nplus() > 1 ? prime_divisors(ctx.nplus()) : std::vector<long>{};
  for (long ell : ram)
    if (kronecker(Int(K_.D), Int(ell)) != -1)
      fail(ErrKind::hypothesis, kMod, "prime " + std::to_string(ell) +
                                          " of the ramified level is not inert in the field");
  for (long ell : split)
    if (kronecker(Int(K_.D), Int(ell)) != 1)
      fail(ErrKind::hypothesis, kMod, "prime " + std::to_string(ell) +
                                          " of the split level is not split in the field");

  // the norm-one units of the p-localized ring: {1} generically, but {+-1}
  // when some odd power of the ramified prime ideal is principal, which
  // happens exactly for odd order of its ideal class
  kernel_ = delta_.index_Hp() % 2 == 1 ? 2 : 1;

  // trace-zero saturated sublattice of the order
  auto bas = E.L.basis();
  MatZ trow(1, VecZ(4));
  for (int c = 0; c < 4; ++c) {
    Rat t = qtrd(bas[c]);
    require(t.get_den() == 1, kMod, "order basis has nonintegral trace");
    trow[0][c] = t.get_num();
  }
  MatZ tz = kernel_int(trow);
  require(tz.size() == 3, kMod, "trace-zero sublattice has wrong rank");
  std::vector<Quat> tzq;
  for (const auto& row : tz) tzq.push_back(E.L.element(row));

  // class count at a fixed orientation: the coset group extends by the class
  // of a local uniformizer, which is already a coset exactly when the odd
  // unit exists; the two cases give 2h/kernel in total
  long want = 2 * static_cast<long>(delta_.size()) / kernel_;
  for (long a = 0; a <= kShellMax && static_cast<long>(classes_.size()) < want; ++a) {
    Int target = Int(-K_.D) * pow_int(p, 2 * a);
    for (const Quat& w : ternary_by_norm(E.alg(), tzq, target)) {
      if (a > 0 && !p_primitive(E, p, w)) continue;
      Quat u = qscale(Rat(1) / Rat(pow_int(p, a)), w);
      if (!optimal_image(E, p, K_.D, u)) continue;
      int sg = oriented_sign(E, K_, u, a, ram, split);
      if (sg == 0) continue;
      if (sg < 0) u = qscale(Rat(-1), u);
      bool dup = false;
      for (const auto& c : classes_)
        if (same_class(u, c.u)) {
          dup = true;
          break;
        }
      if (dup) continue;
      classes_.push_back(build(u));
    }
  }
  require(static_cast<long>(classes_.size()) == want, kMod,
          "found " + std::to_string(classes_.size()) +
              " embedding classes where the class number predicts " +
              std::to_string(want));

  // one orbit ordered against the coset labels, translating the base class
  // by each inverse coset representative
  sys_.assign(delta_.size(), -1);
  std::vector<bool> hit(classes_.size(), false);
  sys_[0] = 0;
  hit[0] = true;
  for (size_t i = 1; i < delta_.size(); ++i) {
    long c = delta_action(0, delta_.reps()[delta_.inv(i)]);
    require(c >= 0 && !hit[c], kMod, "coset translates of the base class collide");
    sys_[i] = c;
    hit[c] = true;
  }
  for (size_t c = 0; c < classes_.size(); ++c)
    if (!hit[c]) {
      other_ = static_cast<long>(c);
      break;
    }
  if (other_ < 0) {
    // all classes at this orientation lie in one coset orbit; the diagnostic
    // partner is then the conjugate embedding, with negated root and the two
    // fixed points swapped, stored past the enumerated classes
    require(kernel_ == 2, kMod, "coset orbit exhausts the classes but the unit group is trivial");
    classes_.push_back(build(qscale(Rat(-1), classes_[0].u)));
    other_ = static_cast<long>(classes_.size()) - 1;
  }
}

Embedding EmbeddingSystem::build(const Quat& u) const {
  const BTContext& ctx = G_->ctx();
  const Order& E = ctx.order();
  long p = K_.p;
  Embedding e;
  e.u = u;
  Quat w = u;
  while (!coords_integral(E, w)) {
    w = qscale(Rat(p), w);
    e.scale += 1;
    require(e.scale <= 2 * kShellMax, kMod, "image of sqrt(D) is not in the p-order");
  }

  Mat2 Mw = ctx.image_mod(w);
  Int fp = Int(K_.f) * pow_int(p, e.scale);
  const Int &A = Mw[0], &B = Mw[1], &C = Mw[2];
  require(B != 0 || C != 0, kMod, "splitting image of sqrt(D) is diagonal");

  // one endpoint: the lattice spanned by f p^scale e and iota(w) e for a
  // standard basis vector e, picked to keep the determinant valuation low
  bool use1 = C != 0 && (B == 0 || val_p(C, p) <= val_p(B, p));
  Mat2 T1 = use1 ? Mat2{fp, A, Int(0), C} : Mat2{Int(0), B, fp, -A};
  // the other endpoint: translate by a uniformizer of the local field; the
  // image of sqrt(D) works except over the 2-adics with odd radicand, where
  // (1 + sqrt(d)) has the odd valuation
  Mat2 Mpi = Mw;
  if (p == 2 && mod_pos(Int(K_.d), Int(4)) == 3) {
    // pi = 1 + sqrt(d), scaled by 2 p^scale to the integral form f p^scale + iota(w)
    Mpi[0] += fp;
    Mpi[3] += fp;
  }
  Mat2 T2 = mul2(Mpi, T1);
  VertexM v1 = ctx.canon(T1), v2 = ctx.canon(T2);
  require((v1.det_val() + v2.det_val()) % 2 == 1, kMod, "fixed endpoints share a parity");
  if (v1.det_val() % 2 == 0) {
    e.ve = v1;
    e.vo = v2;
  } else {
    e.ve = v2;
    e.vo = v1;
  }
  for (long s = 0; s <= p; ++s) {
    if (ctx.neighbor(e.ve, s) == e.vo) e.slot_ev = s;
    if (ctx.neighbor(e.vo, s) == e.ve) e.slot_ov = s;
  }
  require(e.slot_ev >= 0 && e.slot_ov >= 0, kMod, "fixed endpoints are not adjacent");

  auto [re, ge] = locate(*G_, e.ve);
  auto [ro, go] = locate(*G_, e.vo);
  e.rep_e = re;
  e.glue_e = ge;
  e.rep_o = ro;
  e.glue_o = go;
  return e;
}

std::pair<Padic, Padic> EmbeddingSystem::fixed_points(const Embedding& e) const {
  const BTContext& ctx = G_->ctx();
  long prec = ctx.prec();
  Quat w = qscale(Rat(pow_int(K_.p, e.scale)), e.u);
  Mat2 Mw = ctx.image_mod(w);
  const FieldTag& F = K_.tag;
  Padic A = Padic::from_int(F, Mw[0], prec);
  Padic C = Padic::from_int(F, Mw[2], prec);
  Padic root = Padic::gen(F, prec).mul_int(Int(K_.f) * pow_int(K_.p, e.scale));
  Padic z = (A + root) / C;
  return {z, z.conj()};
}

std::array<Padic, 3> EmbeddingSystem::twist_form(const Embedding& e) const {
  const BTContext& ctx = G_->ctx();
  long prec = ctx.prec();
  Quat w = qscale(Rat(pow_int(K_.p, e.scale)), e.u);
  Mat2 Mw = ctx.image_mod(w);
  const FieldTag& F = K_.tag;
  return {Padic::from_int(F, Mw[2], prec), Padic::from_int(F, Int(-2) * Mw[0], prec),
          Padic::from_int(F, -Mw[1], prec)};
}

bool EmbeddingSystem::same_class(const Quat& u1, const Quat& u2) const {
  const Order& E = G_->ctx().order();
  MatZ lam = twisted_centralizer(E, u1, u2);
  require(lam.size() == 2, kMod, "conjugating space has wrong dimension");
  return binary_p_power(E.alg(), E.L.element(lam[0]), E.L.element(lam[1]), K_.p,
                        kConjMax)
      .has_value();
}

Embedding EmbeddingSystem::conjugated(const Embedding& e, const Quat& g) const {
  const QuatAlg& alg = G_->ctx().order().alg();
  Rat n = qnrd(alg, g);
  require(n != 0, kMod, "conjugator is not invertible");
  require(val_p(n, K_.p) % 2 == 0, kMod, "conjugator has odd norm valuation");
  Quat ui = qmul(alg, qmul(alg, qscale(Rat(1) / n, qconj(g)), e.u), g);
  return build(ui);
}

long EmbeddingSystem::delta_action(long cls, const Form& sigma) const {
  const BTContext& ctx = G_->ctx();
  const Order& E = ctx.order();
  const QuatAlg& alg = E.alg();
  require(cls >= 0 && cls < static_cast<long>(classes_.size()), kMod, "class index out of range");
  require(sigma.disc() == Int(K_.D), kMod, "form discriminant differs from the field");
  long p = K_.p;

  // ideal representative with norm prime to p, the level and the conductor
  Int away = Int(p) * Int(ctx.nminus()) * Int(ctx.nplus()) * Int(2) * Int(K_.f);
  Form g = with_coprime_lead(sigma, away);
  const Quat& u = classes_[cls].u;
  Quat g2 = qscale(Rat(1) / Rat(2), qadd(qscale(Rat(-g.B), qone()), u));

  // right module generated by the embedded ideal [A, (-B + sqrt(D))/2]
  std::vector<Quat> gens;
  for (const Quat& b : E.L.basis()) {
    gens.push_back(qscale(Rat(g.A), b));
    gens.push_back(qmul(alg, g2, b));
  }
  QLattice I = QLattice::from_quats(alg, gens);

  // its left order (1 / nrd(I)) I conj(I); a canary for the generators
  std::vector<Quat> ogens;
  for (const Quat& x : I.basis())
    for (const Quat& y : I.basis()) ogens.push_back(qscale(Rat(1) / Rat(g.A), qmul(alg, x, qconj(y))));
  QLattice OL = QLattice::from_quats(alg, ogens);
  require(OL.contains(qone()), kMod, "translated order does not contain one");

  // principal generator up to p-units; any hit gives the same class
  Quat beta;
  bool found = false;
  for (long k = 0; k <= kConjMax && !found; ++k) {
    auto hits = lattice_by_norm(I, g.A * pow_int(p, 2 * k));
    if (!hits.empty()) {
      beta = hits[0];
      found = true;
    }
  }
  require(found, kMod, "translated ideal has no generator in the search range");

  Rat nb = qnrd(alg, beta);
  Quat ui = qmul(alg, qmul(alg, qscale(Rat(1) / nb, qconj(beta)), u), beta);
  require(coords_p_order(E, p, ui), kMod, "translated image left the p-order");
  for (size_t c = 0; c < classes_.size(); ++c)
    if (same_class(ui, classes_[c].u)) return static_cast<long>(c);
  fail(ErrKind::invariant, kMod, "translated class is not in the enumeration");
}

void EmbeddingSystem::domain_cover(const EdgeMeasure& mu, const Embedding& e, long m,
                                   const std::function<void(const DomainBall&)>& visit) const {
  const BTContext& ctx = G_->ctx();
  if (&mu.graph() != G_) fail(ErrKind::bad_input, kMod, "measure lives on a different graph");
  if (m < 1) fail(ErrKind::bad_input, kMod, "covering level must be positive");
  long base = std::max(e.ve.det_val(), e.vo.det_val());
  if (m + base + kMargin >= ctx.prec())
    fail(ErrKind::precision, kMod, "covering level exceeds the context precision");
  TeichCenters tc(ctx.p(), m + 1);
  for (const Seed& seed : domain_seeds(ctx, e, kernel_)) {
    RelState st;
    st.rep = seed.rep;
    st.glue = seed.glue;
    relative_walk(*G_, mu, tc, seed, st, m, visit);
  }
}

Int EmbeddingSystem::domain_edge_sum(const EdgeMeasure& mu, const Embedding& e) const {
  const BTContext& ctx = G_->ctx();
  if (&mu.graph() != G_) fail(ErrKind::bad_input, kMod, "measure lives on a different graph");
  long p = ctx.p();
  Int total = 0;
  for (const Seed& seed : domain_seeds(ctx, e, kernel_)) {
    for (long s = 0; s <= p; ++s) {
      if (s == seed.skip) continue;
      auto ts = G_->step(seed.rep, seed.glue, seed.T0, s);
      total += mu.mu_oriented(ts.edge);
    }
  }
  return total;
}

Padic eta_inverse(const std::pair<Padic, Padic>& zz, const Int& x, const Int& y) {
  const FieldTag& F = zz.first.field();
  if (y == 0) {
    require(x != 0, kMod, "chart at the zero vector");
    return Padic::one(F);
  }
  Padic xv = Padic::from_int(F, x, kPrecInf);
  return (xv - zz.second.mul_int(y)) / (xv - zz.first.mul_int(y));
}

Padic eta_forward(const std::pair<Padic, Padic>& zz, const Padic& alpha) {
  return (alpha * zz.first - zz.second) / (alpha - Padic::one(alpha.field()));
}

Integral integrate_on_torus(const EdgeMeasure& mu, const EmbeddingSystem& sys,
                            const Embedding& e,
                            const std::function<Padic(const Padic&)>& phi, long m) {
  auto zz = sys.fixed_points(e);
  const FieldTag& F = zz.first.field();
  Padic acc = Padic::zero(F);
  long err = kNoErr;
  sys.domain_cover(mu, e, m, [&](const DomainBall& B) {
    err = std::min(err, 2 * m);
    if (B.mu == 0) return;
    acc = acc + phi(eta_inverse(zz, B.sx, B.sy)).mul_int(B.mu);
  });
  long kap = sys.kernel_order();
  return Integral{acc.div_int(Int(kap)), err - 2 * val_p(Int(kap), sys.field().p)};
}

Integral log_moment_on_torus(const EdgeMeasure& mu, const EmbeddingSystem& sys,
                             const Embedding& e, long n, long m, const LogBranch& br) {
  require(n >= 1, kMod, "moment order must be positive");
  auto zz = sys.fixed_points(e);
  const FieldTag& F = zz.first.field();
  long p = sys.field().p;
  Padic acc = Padic::zero(F);
  long err = kNoErr;
  sys.domain_cover(mu, e, m, [&](const DomainBall& B) {
    long lt = log_tail_2v(p, line_ball_cert(B.M, zz.first, zz.second));
    // the sample at infinity has ratio exactly one; its logarithm vanishes
    if (B.sy == 0) {
      err = std::min(err, n * lt);
      return;
    }
    Padic val = br(eta_inverse(zz, B.sx, B.sy));
    err = std::min(err, lt + (n - 1) * std::min(val.lower_2v(), lt));
    if (B.mu == 0) return;
    acc = acc + val.pow(Int(n)).mul_int(B.mu);
  });
  long kap = sys.kernel_order();
  return Integral{acc.div_int(Int(kap)), err - 2 * val_p(Int(kap), p)};
}

}  // namespace aclp
