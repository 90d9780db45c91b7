#include "aclp/bttree.hpp"

#include <algorithm>

#include "aclp/linalg.hpp"

namespace aclp {

namespace {

constexpr const char* kMod = "bttree";
// valuation decisions are only trusted this far below the working precision
constexpr long kMargin = 8;

bool p_primitive(const Order& O, const Quat& y, long p) {
  VecQ c = O.L.coords_q(y);
  for (const auto& v : c) {
    if (v == 0) continue;
    if (v.get_den() != 1) fail(ErrKind::invariant, kMod, "coordinates not integral");
    if (v.get_num() % p != 0) return true;
  }
  return false;
}

}  // namespace

BTContext::BTContext(const Order& E, long p, long prec)
    : E_(E), p_(p), prec_(prec), iota_(E, p, prec), pN_(pow_int(Int(p), prec)) {
  require(prec_ > 4 * kMargin, kMod, "working precision too small");
  for (long ell : quat_ramified(E_.alg().a, E_.alg().b)) nminus_ *= ell;
  Int d = E_.reduced_disc();
  require(d % nminus_ == 0, kMod, "discriminant vs ramification");
  Int np = d / nminus_;
  require(np.fits_slong_p(), kMod, "level too large");
  nplus_ = np.get_si();
}

Mat2 BTContext::vertex_matrix(const VertexM& v) const {
  return {pow_int(Int(p_), v.a), v.b, Int(0), pow_int(Int(p_), v.c)};
}

Mat2 BTContext::slot_matrix(long s) const {
  require(s >= 0 && s <= p_, kMod, "slot out of range");
  if (s == p_) return {Int(1), Int(0), Int(0), Int(p_)};
  return {Int(p_), Int(s), Int(0), Int(1)};
}

Mat2 BTContext::mat_mul2(const Mat2& X, const Mat2& Y) const {
  return {mod_pos(X[0] * Y[0] + X[1] * Y[2], pN_), mod_pos(X[0] * Y[1] + X[1] * Y[3], pN_),
          mod_pos(X[2] * Y[0] + X[3] * Y[2], pN_), mod_pos(X[2] * Y[1] + X[3] * Y[3], pN_)};
}

Mat2 BTContext::image_mod(const Quat& y) const {
  auto m = iota_.image(y);
  return {m[0], m[1], m[2], m[3]};
}

VertexM BTContext::canon(Mat2 X) const {
  for (auto& e : X) e = mod_pos(e, pN_);
  auto vv = [&](const Int& x) { return x == 0 ? prec_ : val_p(x, p_); };

  // bottom row: move the least divisible entry into position (1,1)
  long v10 = vv(X[2]), v11 = vv(X[3]);
  if (v11 > v10) {
    std::swap(X[0], X[1]);
    std::swap(X[2], X[3]);
    std::swap(v10, v11);
  }
  if (v11 + kMargin >= prec_)
    fail(ErrKind::precision, kMod, "canon: bottom row valuations exceed precision");
  if (v10 < prec_) {
    // column operation clearing the (1,0) entry
    Int pe = pow_int(Int(p_), v11);
    Int m = pN_ / pe;
    Int q = mod_pos((X[2] / pe) * inv_mod(mod_pos(X[3] / pe, m), m), m);
    X[0] = mod_pos(X[0] - q * X[1], pN_);
  }
  X[2] = 0;

  long av = vv(X[0]), cv = v11;
  if (av + kMargin >= prec_)
    fail(ErrKind::precision, kMod, "canon: diagonal valuation exceeds precision");
  Int pa = pow_int(Int(p_), av), pc = pow_int(Int(p_), cv);
  // unit-scale the second column, then reduce b into [0, p^a)
  Int m2 = pN_ / pc;
  Int i2 = inv_mod(mod_pos(X[3] / pc, m2), m2);
  Int b = mod_pos(mod_pos(X[1] * i2, pN_), pa);

  long bv = (b == 0) ? av : val_p(b, p_);
  long sh = std::min(std::min(av, cv), bv);
  VertexM out;
  out.a = av - sh;
  out.c = cv - sh;
  if (sh > 0) b /= pow_int(Int(p_), sh);
  out.b = mod_pos(b, pow_int(Int(p_), out.a));
  return out;
}

VertexM BTContext::neighbor(const VertexM& v, long s) const {
  return canon(mat_mul2(vertex_matrix(v), slot_matrix(s)));
}

VertexM BTContext::act_canon(const Quat& y, const Mat2& X) const {
  return canon(mat_mul2(image_mod(y), X));
}

std::vector<Quat> BTContext::transporters(const VertexM& v1, const VertexM& v2, bool all) const {
  const long d1 = v1.det_val(), d2 = v2.det_val();
  Mat2 M1 = vertex_matrix(v1);
  Mat2 A2{pow_int(Int(p_), v2.c), -v2.b, Int(0), pow_int(Int(p_), v2.a)};  // adjugate

  // adj(M2) iota(y) M1 must vanish mod p^(j+d2); expand over the order basis
  const std::vector<Quat> basis = E_.L.basis();
  std::array<Mat2, 4> G;
  for (int i = 0; i < 4; ++i) G[i] = mat_mul2(A2, mat_mul2(image_mod(basis[i]), M1));

  std::vector<Quat> out;
  // a primitive transporter has iota(y) = p^(j-d1) M2 U adj(M1), so j <= d1
  for (long j = 0; j <= d1; ++j) {
    long n = 2 * j + d2 - d1;
    if (n < 0 || (n & 1) != 0) continue;
    long e = j + d2;
    if (e + kMargin >= prec_) fail(ErrKind::precision, kMod, "transporters: precision exhausted");
    Int pe = pow_int(Int(p_), e);
    MatZ A(4, VecZ(4));
    for (int ent = 0; ent < 4; ++ent)
      for (int i = 0; i < 4; ++i) A[ent][i] = mod_pos(G[i][ent], pe);
    MatZ K = kernel_mod(A, pe);
    std::vector<Quat> gens;
    gens.reserve(4);
    for (const auto& row : K) gens.push_back(E_.L.element(row));
    for (const auto& y : span_by_norm(E_.alg(), gens, pow_int(Int(p_), n))) {
      if (!p_primitive(E_, y, p_)) continue;
      require(act_canon(y, M1) == v2, kMod, "transporters: candidate fails exact check");
      out.push_back(y);
      if (!all) return out;
    }
  }
  return out;
}

std::optional<Quat> BTContext::transporter(const VertexM& v1, const VertexM& v2) const {
  auto v = transporters(v1, v2, false);
  if (v.empty()) return std::nullopt;
  return v.front();
}

Quat BTContext::odd_element(long kmax) const {
  for (long k = 0; k <= kmax; ++k) {
    for (const auto& y : lattice_by_norm(E_.L, pow_int(Int(p_), 2 * k + 1)))
      if (p_primitive(E_, y, p_)) return y;
  }
  fail(ErrKind::hypothesis, kMod, "no element of odd norm valuation within bound");
}

// ---------------------------------------------------------------------------

QuotientGraph::QuotientGraph(const BTContext& ctx) : ctx_(&ctx) {
  const long p = ctx.p();
  const long nslots = p + 1;

  // vertex classes by breadth-first closure from the root lattice
  verts_.push_back(QuotientVertex{});
  for (size_t qi = 0; qi < verts_.size(); ++qi) {
    require(verts_.size() <= 4096, kMod, "quotient unexpectedly large");
    VertexM Mq = verts_[qi].M;
    verts_[qi].child_canon.resize(nslots);
    verts_[qi].slots.resize(nslots);
    for (long s = 0; s < nslots; ++s) {
      VertexM C = ctx.neighbor(Mq, s);
      verts_[qi].child_canon[s] = C;
      long hit = -1;
      Quat g = qone();
      for (size_t u = 0; u < verts_.size(); ++u) {
        if (C == verts_[u].M) {
          hit = static_cast<long>(u);
          break;
        }
        auto t = ctx.transporter(C, verts_[u].M);
        if (t) {
          hit = static_cast<long>(u);
          g = *t;
          break;
        }
      }
      if (hit < 0) {
        verts_.push_back(QuotientVertex{});
        verts_.back().M = C;
        hit = static_cast<long>(verts_.size()) - 1;
      }
      require(((C.det_val() ^ verts_[hit].M.det_val()) & 1) == 0, kMod,
              "parity not preserved by the even subgroup");
      verts_[qi].slots[s].rep = hit;
      verts_[qi].slots[s].glue = g;
    }
  }

  // stabilizers and the induced action on the p+1 slots
  for (auto& V : verts_) {
    V.stab = ctx.transporters(V.M, V.M, true);
    V.w = static_cast<long>(V.stab.size());
    require(V.w >= 1, kMod, "stabilizer misses the identity");
  }

  for (size_t vi = 0; vi < verts_.size(); ++vi) {
    auto& V = verts_[vi];
    Mat2 Mv = ctx.vertex_matrix(V.M);
    std::vector<std::vector<long>> perms;
    for (const auto& y : V.stab) {
      std::vector<long> pi(nslots, -1);
      std::vector<bool> seen(nslots, false);
      for (long s = 0; s < nslots; ++s) {
        VertexM im = ctx.act_canon(y, ctx.mat_mul2(Mv, ctx.slot_matrix(s)));
        for (long t = 0; t < nslots; ++t)
          if (V.child_canon[t] == im) {
            pi[s] = t;
            break;
          }
        require(pi[s] >= 0 && !seen[pi[s]], kMod, "stabilizer does not permute the slots");
        seen[pi[s]] = true;
      }
      perms.push_back(std::move(pi));
    }
    // slot orbits are the oriented edge classes out of this vertex
    std::vector<long> cls(nslots, -1);
    for (long s = 0; s < nslots; ++s) {
      if (cls[s] >= 0) continue;
      long id = static_cast<long>(edges_.size());
      edges_.push_back(OrientedEdge{});
      edges_[id].src = static_cast<long>(vi);
      edges_[id].slot = s;
      std::vector<long> st{s};
      cls[s] = id;
      long cnt = 1;
      for (size_t h = 0; h < st.size(); ++h)
        for (const auto& pi : perms) {
          long t = pi[st[h]];
          if (cls[t] < 0) {
            cls[t] = id;
            st.push_back(t);
            ++cnt;
          }
        }
      edges_[id].orbit = cnt;
      require(V.w % cnt == 0, kMod, "orbit size does not divide the stabilizer order");
      edges_[id].w = V.w / cnt;
    }
    for (long s = 0; s < nslots; ++s) V.slots[s].edge = cls[s];
  }

  // reversal: push the source vertex through the slot glue and find which
  // slot of the child's representative points back at it
  for (auto& E : edges_) {
    const auto& V = verts_[E.src];
    const auto& sl = V.slots[E.slot];
    const auto& U = verts_[sl.rep];
    VertexM back = ctx.act_canon(sl.glue, ctx.vertex_matrix(V.M));
    long sbar = -1;
    for (long s = 0; s < nslots; ++s)
      if (U.child_canon[s] == back) {
        sbar = s;
        break;
      }
    require(sbar >= 0, kMod, "reversed edge not found among the child's slots");
    E.reverse = U.slots[sbar].edge;
  }
  for (long e = 0; e < static_cast<long>(edges_.size()); ++e) {
    require(edges_[edges_[e].reverse].reverse == e, kMod, "edge reversal is not an involution");
    require(edges_[edges_[e].reverse].w == edges_[e].w, kMod, "reversal changes the edge weight");
  }

  // unoriented classes: pair each class with its reverse
  for (auto& E : edges_) E.unoriented = -1;
  for (long e = 0; e < static_cast<long>(edges_.size()); ++e) {
    if (edges_[e].unoriented >= 0) continue;
    long r = edges_[e].reverse;
    edges_[e].unoriented = n_unor_;
    edges_[e].sign = +1;
    edges_[e].self_reversed = (r == e);
    if (r != e) {
      edges_[r].unoriented = n_unor_;
      edges_[r].sign = -1;
      edges_[r].self_reversed = false;
    }
    ++n_unor_;
  }

  certify();
}

Rat QuotientGraph::vertex_mass() const {
  Rat s = 0;
  for (const auto& V : verts_) s += Rat(1) / Rat(V.w);
  return s;
}

void QuotientGraph::certify() const {
  const long p = ctx_->p();
  // Class-number mass. Stabilizers of vertices of either parity are unit
  // groups of maximal-at-p orders; each parity carries mass
  // phi(nminus) psi(nplus) / 12.
  Int phi = 1, psi = 1;
  for (auto [ell, e] : factor(ctx_->nminus())) {
    require(e == 1, kMod, "ramified part not squarefree");
    phi *= ell - 1;
  }
  for (auto [ell, e] : factor(ctx_->nplus())) {
    require(e == 1, kMod, "level not squarefree");
    psi *= ell + 1;
  }
  Rat want(phi * psi, 12);
  want.canonicalize();
  Rat half[2] = {Rat(0), Rat(0)};
  for (const auto& V : verts_) half[V.M.det_val() & 1] += Rat(1) / Rat(V.w);
  if (half[0] != want || half[1] != want)
    fail(ErrKind::invariant, kMod, "vertex mass mismatch");

  // every slot of every vertex carries an edge class of matching source
  for (size_t vi = 0; vi < verts_.size(); ++vi) {
    Int sum = 0;
    std::vector<long> seen;
    for (const auto& sl : verts_[vi].slots) {
      require(sl.rep >= 0 && sl.edge >= 0, kMod, "unassigned slot");
      require(edges_[sl.edge].src == static_cast<long>(vi), kMod, "edge class source mismatch");
      if (std::find(seen.begin(), seen.end(), sl.edge) == seen.end()) {
        seen.push_back(sl.edge);
        sum += edges_[sl.edge].orbit;
      }
    }
    require(sum == p + 1, kMod, "slot orbits do not cover the star");
  }
}

long QuotientGraph::map_vertex(const Quat& y, long v) const {
  VertexM im = ctx_->act_canon(y, ctx_->vertex_matrix(verts_[v].M));
  for (size_t u = 0; u < verts_.size(); ++u) {
    if (im == verts_[u].M || ctx_->transporter(im, verts_[u].M))
      return static_cast<long>(u);
  }
  fail(ErrKind::invariant, kMod, "translated vertex leaves the quotient");
}

long QuotientGraph::map_edge(const Quat& y, long e) const {
  const auto& E = edges_[e];
  const auto& V = verts_[E.src];
  Mat2 Mv = ctx_->vertex_matrix(V.M);
  VertexM im = ctx_->act_canon(y, Mv);
  long u = -1;
  Quat g = qone();
  for (size_t cand = 0; cand < verts_.size(); ++cand) {
    if (im == verts_[cand].M) {
      u = static_cast<long>(cand);
      break;
    }
    auto t = ctx_->transporter(im, verts_[cand].M);
    if (t) {
      u = static_cast<long>(cand);
      g = *t;
      break;
    }
  }
  require(u >= 0, kMod, "translated edge leaves the quotient");
  // push the child through y then through the transporter onto the rep
  Mat2 C = ctx_->mat_mul2(Mv, ctx_->slot_matrix(E.slot));
  const QuatAlg& A = ctx_->order().alg();
  VertexM cc = ctx_->act_canon(qmul(A, g, y), C);
  const auto& U = verts_[u];
  for (long s = 0; s <= ctx_->p(); ++s)
    if (U.child_canon[s] == cc) return U.slots[s].edge;
  fail(ErrKind::invariant, kMod, "translated edge misses the slot table");
}

QuotientGraph::TreeStep QuotientGraph::step(long rep, const Quat& glue, const Mat2& T,
                                            long s) const {
  const auto& ctx = *ctx_;
  const auto& V = verts_[rep];
  Mat2 C = ctx.mat_mul2(T, ctx.slot_matrix(s));
  VertexM cc = ctx.act_canon(glue, C);
  long sm = -1;
  for (long t = 0; t < static_cast<long>(V.child_canon.size()); ++t)
    if (V.child_canon[t] == cc) {
      sm = t;
      break;
    }
  require(sm >= 0, kMod, "tree step: image is not a neighbor of the representative");
  const auto& sl = V.slots[sm];
  TreeStep out;
  out.edge = sl.edge;
  out.sign = edges_[sl.edge].sign;
  out.unoriented = edges_[sl.edge].unoriented;
  out.child_rep = sl.rep;
  out.child_glue = qmul(ctx.order().alg(), sl.glue, glue);
  return out;
}

}  // namespace aclp
