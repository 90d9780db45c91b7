#include "aclp/harmonic.hpp"

#include <algorithm>

#include "aclp/quaternion.hpp"

namespace aclp {

namespace {

constexpr const char* kMod = "harmonic";

bool coords_p_primitive(const Order& O, const Quat& y, long p) {
  VecQ c = O.L.coords_q(y);
  for (const auto& v : c) {
    if (v == 0) continue;
    require(v.get_den() == 1, kMod, "coordinates not integral");
    if (v.get_num() % p != 0) return true;
  }
  return false;
}

// y' = gamma y for a unit gamma of the even-valuation p-arithmetic group
// iff the order coordinates of y' conj(y) are all divisible by ell
bool same_left_class(const Order& O, const Quat& y1, const Quat& y2, long ell) {
  Quat z = qmul(O.alg(), y1, qconj(y2));
  VecQ c = O.L.coords_q(z);
  for (const auto& v : c) {
    require(v.get_den() == 1, kMod, "class test: coordinates not integral");
    if (v.get_num() % ell != 0) return false;
  }
  return true;
}

}  // namespace

CocycleSpace::CocycleSpace(const QuotientGraph& G, int weight) : G_(&G) {
  if (weight != 2) fail(ErrKind::unsupported, kMod, "only weight 2 is implemented");
  long n = G.unoriented_count();
  MatQ A;
  for (const auto& V : G.vertices()) {
    VecQ row(n, Rat(0));
    for (const auto& sl : V.slots) {
      const auto& E = G.edges()[sl.edge];
      if (!E.self_reversed) row[E.unoriented] += E.sign;
    }
    A.push_back(std::move(row));
  }
  for (const auto& E : G.edges())
    if (E.self_reversed) {
      VecQ row(n, Rat(0));
      row[E.unoriented] = 1;
      A.push_back(std::move(row));
    }
  basis_ = kernel_q(std::move(A));
}

VecQ CocycleSpace::values_oriented(const VecQ& coeff) const {
  require(coeff.size() == basis_.size(), kMod, "coefficient count");
  long n = G_->unoriented_count();
  VecQ vals(n, Rat(0));
  for (size_t i = 0; i < basis_.size(); ++i)
    for (long u = 0; u < n; ++u) vals[u] += coeff[i] * basis_[i][u];
  VecQ out(G_->edges().size(), Rat(0));
  for (size_t e = 0; e < G_->edges().size(); ++e) {
    const auto& E = G_->edges()[e];
    if (!E.self_reversed) out[e] = Rat(E.sign) * vals[E.unoriented];
  }
  return out;
}

std::vector<Quat> CocycleSpace::hecke_reps(long ell) const {
  const BTContext& ctx = G_->ctx();
  const Order& O = ctx.order();
  if (ell < 2 || !is_prime(ell)) fail(ErrKind::bad_input, kMod, "hecke index must be prime");
  if (ell == ctx.p() || ctx.nminus() % ell == 0 || ctx.nplus() % ell == 0)
    fail(ErrKind::unsupported, kMod, "hecke prime must avoid p and the discriminant");
  std::vector<Quat> reps;
  for (long a = 0; a <= 2 && static_cast<long>(reps.size()) < ell + 1; ++a) {
    Int target = Int(ell) * pow_int(Int(ctx.p()), 2 * a);
    for (const auto& y : lattice_by_norm(O.L, target)) {
      if (!coords_p_primitive(O, y, ctx.p())) continue;
      bool fresh = true;
      for (const auto& r : reps)
        if (same_left_class(O, y, r, ell)) {
          fresh = false;
          break;
        }
      if (fresh) reps.push_back(y);
      if (static_cast<long>(reps.size()) == ell + 1) break;
    }
  }
  require(static_cast<long>(reps.size()) == ell + 1, kMod, "expected ell + 1 hecke classes");
  return reps;
}

VecQ CocycleSpace::in_basis(const VecQ& values) const {
  MatQ At(values.size(), VecQ(basis_.size()));
  for (size_t i = 0; i < basis_.size(); ++i)
    for (size_t u = 0; u < values.size(); ++u) At[u][i] = basis_[i][u];
  auto sol = solve_q(At, values);
  if (!sol) fail(ErrKind::invariant, kMod, "image left the cocycle space");
  return *sol;
}

MatQ CocycleSpace::hecke_matrix(long ell) const {
  auto reps = hecke_reps(ell);
  long n = G_->unoriented_count();
  long ne = static_cast<long>(G_->edges().size());
  // translation tables: T c (e) = sum over left classes of c(y_i e)
  std::vector<std::vector<long>> img(reps.size(), std::vector<long>(ne));
  for (size_t i = 0; i < reps.size(); ++i)
    for (long e = 0; e < ne; ++e) img[i][e] = G_->map_edge(reps[i], e);
  MatQ M;
  for (const auto& row : basis_) {
    VecQ vals(n, Rat(0));
    for (long u = 0; u < n; ++u) vals[u] = row[u];
    // evaluate T c on the representative orientation of each class
    VecQ out(n, Rat(0));
    for (long e = 0; e < ne; ++e) {
      const auto& E = G_->edges()[e];
      if (E.sign != +1 || E.self_reversed) continue;
      Rat s = 0;
      for (size_t i = 0; i < reps.size(); ++i) {
        const auto& F = G_->edges()[img[i][e]];
        if (!F.self_reversed) s += Rat(F.sign) * vals[F.unoriented];
      }
      out[E.unoriented] = s;
    }
    // self-reversed classes: the pullback sum must vanish there
    for (long e = 0; e < ne; ++e) {
      const auto& E = G_->edges()[e];
      if (!E.self_reversed) continue;
      Rat s = 0;
      for (size_t i = 0; i < reps.size(); ++i) {
        const auto& F = G_->edges()[img[i][e]];
        if (!F.self_reversed) s += Rat(F.sign) * vals[F.unoriented];
      }
      require(s == 0, kMod, "hecke image does not vanish on a self-reversed class");
    }
    M.push_back(in_basis(out));
  }
  return M;
}

MatQ CocycleSpace::involution_matrix(const Quat& y) const {
  long n = G_->unoriented_count();
  long ne = static_cast<long>(G_->edges().size());
  MatQ M;
  for (const auto& row : basis_) {
    VecQ out(n, Rat(0));
    for (long e = 0; e < ne; ++e) {
      const auto& E = G_->edges()[e];
      if (E.sign != +1 || E.self_reversed) continue;
      const auto& F = G_->edges()[G_->map_edge(y, e)];
      if (!F.self_reversed) out[E.unoriented] = Rat(F.sign) * row[F.unoriented];
    }
    M.push_back(in_basis(out));
  }
  return M;
}

VecZ CocycleSpace::eigencocycle(const std::vector<std::pair<long, long>>& eigs) const {
  long d = dim();
  require(d >= 1, kMod, "empty cocycle space");
  // K: rows span the current candidate subspace, in basis coordinates
  MatQ K = mat_to_q(mat_identity(d));
  for (auto [ell, a] : eigs) {
    MatQ T = hecke_matrix(ell);
    // rows of K (T - a) must vanish; kernel taken inside the K-span
    MatQ C;
    for (const auto& k : K) {
      VecQ img(d, Rat(0));
      for (long i = 0; i < d; ++i)
        for (long j = 0; j < d; ++j) img[j] += k[i] * T[i][j];
      for (long j = 0; j < d; ++j) img[j] -= Rat(a) * k[j];
      C.push_back(img);
    }
    // coefficients c with sum_i c_i C_i = 0 give the surviving combinations
    MatQ Ct(d, VecQ(C.size()));
    for (size_t i = 0; i < C.size(); ++i)
      for (long j = 0; j < d; ++j) Ct[j][i] = C[i][j];
    MatQ null = kernel_q(Ct);
    MatQ K2;
    for (const auto& c : null) {
      VecQ v(d, Rat(0));
      for (size_t i = 0; i < K.size(); ++i)
        for (long j = 0; j < d; ++j) v[j] += c[i] * K[i][j];
      K2.push_back(v);
    }
    K = std::move(K2);
    if (K.empty()) fail(ErrKind::hypothesis, kMod, "no cocycle with the prescribed eigenvalues");
  }
  if (K.size() != 1)
    fail(ErrKind::hypothesis, kMod, "eigenvalues do not pin a one-dimensional space");

  long n = G_->unoriented_count();
  VecQ vals(n, Rat(0));
  for (long i = 0; i < d; ++i)
    for (long u = 0; u < n; ++u) vals[u] += K[0][i] * basis_[i][u];
  // integral, content one, first nonzero entry positive
  Int lcm = 1;
  for (const auto& v : vals) {
    Int den = v.get_den();
    lcm = lcm / gcd(lcm, den) * den;
  }
  VecZ out(n);
  Int content = 0;
  for (long u = 0; u < n; ++u) {
    Rat scaled = vals[u] * Rat(lcm);
    require(scaled.get_den() == 1, kMod, "normalization failed");
    out[u] = scaled.get_num();
    content = gcd(content, out[u]);
  }
  require(content > 0, kMod, "eigencocycle is zero");
  int flip = 0;
  for (long u = 0; u < n && !flip; ++u)
    if (out[u] != 0) flip = (out[u] > 0) ? 1 : -1;
  for (auto& x : out) x = x * flip / content;
  return out;
}

}  // namespace aclp
