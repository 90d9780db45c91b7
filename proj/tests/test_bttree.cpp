#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "aclp/bttree.hpp"
#include "aclp/linalg.hpp"
#include "aclp/quaternion.hpp"

using namespace aclp;

namespace {

Quat qi() { return Quat{0, 1, 0, 0}; }
Quat qj() { return Quat{0, 0, 1, 0}; }

Order hurwitz() {
  QuatAlg A{-1, -1};
  return maximal_order(A);
}

Order disc7() { return maximal_order(QuatAlg{-1, -7}); }
Order disc13() { return maximal_order(QuatAlg{-2, -13}); }

// dimension of { values on unoriented classes : zero on self-reversed ones,
// signed sums over the slots of every vertex vanish }
long cocycle_dim(const QuotientGraph& G) {
  long n = G.unoriented_count();
  MatQ A;
  for (const auto& V : G.vertices()) {
    VecQ row(n, 0);
    for (const auto& sl : V.slots) {
      const auto& E = G.edges()[sl.edge];
      if (!E.self_reversed) row[E.unoriented] += E.sign;
    }
    A.push_back(row);
  }
  for (long u = 0; u < n; ++u) {
    bool self = false;
    for (const auto& E : G.edges())
      if (E.unoriented == u && E.self_reversed) self = true;
    if (self) {
      VecQ row(n, 0);
      row[u] = 1;
      A.push_back(row);
    }
  }
  return static_cast<long>(kernel_q(A).size());
}

}  // namespace

TEST_CASE("canonical vertex forms") {
  BTContext ctx(hurwitz(), 3, 48);

  CHECK(ctx.canon(Mat2{Int(1), Int(0), Int(0), Int(1)}) == VertexM{});
  CHECK(ctx.canon(Mat2{Int(3), Int(2), Int(0), Int(1)}) == VertexM{1, 0, 2});
  // homothety by p and by a p-adic unit
  Mat2 X{Int(9), Int(5), Int(0), Int(3)};
  VertexM v = ctx.canon(X);
  CHECK(v == ctx.canon(Mat2{Int(27), Int(15), Int(0), Int(9)}));
  CHECK(v == ctx.canon(Mat2{Int(18), Int(10), Int(0), Int(6)}));
  // right multiplication by unimodular matrices fixes the lattice
  auto app = [&](const Mat2& M, const Mat2& U) { return ctx.mat_mul2(M, U); };
  for (Mat2 U : {Mat2{Int(1), Int(1), Int(0), Int(1)}, Mat2{Int(0), Int(1), Int(1), Int(0)},
                 Mat2{Int(1), Int(0), Int(5), Int(1)}, Mat2{Int(2), Int(1), Int(1), Int(1)}}) {
    CHECK(ctx.canon(app(X, U)) == v);
    CHECK(ctx.canon(app(Mat2{Int(3), Int(1), Int(0), Int(1)}, U)) == VertexM{1, 0, 1});
  }
  // idempotence and determinant bookkeeping
  for (long a = 0; a <= 2; ++a)
    for (long c = 0; c <= 2; ++c)
      for (long b = 0; b < 9; ++b) {
        Int bb(b);
        if (std::min({a, c, bb == 0 ? a : val_p(bb, 3)}) != 0) continue;
        if (bb >= pow_int(3, a)) continue;
        VertexM w{a, c, bb};
        CHECK(ctx.canon(ctx.vertex_matrix(w)) == w);
      }
}

TEST_CASE("tree layers and parents") {
  // layer k of the tree has (p+1) p^(k-1) vertices
  for (auto [ord, p] : std::vector<std::pair<Order, long>>{{hurwitz(), 3}, {disc7(), 2}}) {
    BTContext ctx(ord, p, 48);
    std::vector<std::set<VertexM>> layers;
    std::set<VertexM> seen;
    layers.push_back({VertexM{}});
    seen.insert(VertexM{});
    for (int k = 1; k <= 4; ++k) {
      std::set<VertexM> next;
      for (const auto& v : layers.back())
        for (long s = 0; s <= p; ++s) {
          VertexM w = ctx.neighbor(v, s);
          if (!seen.count(w)) next.insert(w);
        }
      for (const auto& w : next) seen.insert(w);
      layers.push_back(next);
      CHECK(static_cast<long>(next.size()) == (p + 1) * pow_int(p, k - 1));
    }
    // each vertex of layer 2 has exactly one neighbor in layer 1
    for (const auto& v : layers[2]) {
      long up = 0;
      for (long s = 0; s <= p; ++s)
        if (layers[1].count(ctx.neighbor(v, s))) ++up;
      CHECK(up == 1);
    }
  }
}

TEST_CASE("root stabilizer is the unit group") {
  BTContext ctx(hurwitz(), 3, 48);
  auto stab = ctx.transporters(VertexM{}, VertexM{}, true);
  CHECK(stab.size() == 12);  // Hurwitz units modulo sign
  for (const auto& y : stab) CHECK(qnrd(ctx.order().alg(), y) == 1);
}

TEST_CASE("action composes through the splitting") {
  BTContext ctx(disc7(), 2, 48);
  QuotientGraph G(ctx);
  std::vector<Quat> samples;
  for (const auto& V : G.vertices())
    for (const auto& y : V.stab) samples.push_back(y);
  samples.push_back(qadd(qone(), qi()));  // norm 2
  const QuatAlg& A = ctx.order().alg();
  Mat2 X = ctx.vertex_matrix(VertexM{2, 0, 3});
  for (size_t i = 0; i < samples.size(); ++i)
    for (size_t j = 0; j < samples.size(); ++j) {
      Quat prod = qmul(A, samples[i], samples[j]);
      CHECK(ctx.act_canon(prod, X) ==
            ctx.act_canon(samples[i], ctx.mat_mul2(ctx.image_mod(samples[j]), X)));
    }
}

TEST_CASE("quotient: discriminant 2 at p = 3") {
  BTContext ctx(hurwitz(), 3, 48);
  QuotientGraph G(ctx);
  CHECK(G.vertices().size() == 2);
  CHECK(G.vertices()[0].w == 12);
  CHECK(G.vertices()[1].w == 12);
  CHECK(G.vertex_mass() == Rat(1, 6));
  CHECK(cocycle_dim(G) == 0);
  Quat w = ctx.odd_element();
  CHECK(qnrd(ctx.order().alg(), w) == 3);
}

TEST_CASE("quotient: discriminant 7 at p = 2") {
  BTContext ctx(disc7(), 2, 48);
  QuotientGraph G(ctx);
  CHECK(G.vertex_mass() == 1);
  CHECK(cocycle_dim(G) == 1);
  Quat w = ctx.odd_element();
  CHECK(qnrd(ctx.order().alg(), w) == 2);
}

TEST_CASE("quotient: discriminant 7 at p = 3") {
  BTContext ctx(disc7(), 3, 48);
  QuotientGraph G(ctx);
  CHECK(G.vertex_mass() == 1);
  CHECK(cocycle_dim(G) == 1);
}

TEST_CASE("quotient: discriminant 13 at p = 2") {
  BTContext ctx(disc13(), 2, 48);
  QuotientGraph G(ctx);
  CHECK(G.vertex_mass() == 2);
  CHECK(cocycle_dim(G) == 2);
}

TEST_CASE("odd elements induce a parity-swapping involution") {
  BTContext ctx(disc7(), 2, 48);
  QuotientGraph G(ctx);
  Quat w = ctx.odd_element();
  long nv = static_cast<long>(G.vertices().size());
  for (long v = 0; v < nv; ++v) {
    long u = G.map_vertex(w, v);
    CHECK(((G.vertices()[v].M.det_val() ^ G.vertices()[u].M.det_val()) & 1) == 1);
    CHECK(G.map_vertex(w, u) == v);
  }
  long ne = static_cast<long>(G.edges().size());
  for (long e = 0; e < ne; ++e) {
    long f = G.map_edge(w, e);
    CHECK(G.map_edge(w, f) == e);
    CHECK(G.map_edge(w, G.edges()[e].reverse) == G.edges()[f].reverse);
    CHECK(G.edges()[f].src == G.map_vertex(w, G.edges()[e].src));
  }
}

TEST_CASE("edge classes are consistent") {
  BTContext ctx(disc13(), 2, 48);
  QuotientGraph G(ctx);
  long oriented = static_cast<long>(G.edges().size());
  long twice = 0;
  for (long e = 0; e < oriented; ++e) {
    const auto& E = G.edges()[e];
    CHECK(G.edges()[E.reverse].reverse == e);
    CHECK(G.edges()[E.reverse].w == E.w);
    CHECK(G.vertices()[E.src].slots[E.slot].edge == e);
    CHECK(E.w * E.orbit == G.vertices()[E.src].w);
    twice += E.self_reversed ? 2 : 1;
    if (E.self_reversed) CHECK(E.reverse == e);
  }
  CHECK(twice % 2 == 0);
  // every unoriented class has one or two orientations
  std::vector<long> count(G.unoriented_count(), 0);
  for (const auto& E : G.edges()) ++count[E.unoriented];
  for (long u = 0; u < G.unoriented_count(); ++u) CHECK((count[u] == 1 || count[u] == 2));
}

TEST_CASE("deterministic construction") {
  BTContext ctx(disc7(), 2, 48);
  QuotientGraph G1(ctx), G2(ctx);
  REQUIRE(G1.vertices().size() == G2.vertices().size());
  for (size_t i = 0; i < G1.vertices().size(); ++i) {
    CHECK(G1.vertices()[i].M == G2.vertices()[i].M);
    CHECK(G1.vertices()[i].w == G2.vertices()[i].w);
  }
  REQUIRE(G1.edges().size() == G2.edges().size());
  for (size_t e = 0; e < G1.edges().size(); ++e) {
    CHECK(G1.edges()[e].src == G2.edges()[e].src);
    CHECK(G1.edges()[e].slot == G2.edges()[e].slot);
    CHECK(G1.edges()[e].reverse == G2.edges()[e].reverse);
  }
}

TEST_CASE("tree walk carries exact transporters") {
  BTContext ctx(disc7(), 2, 48);
  QuotientGraph G(ctx);
  // depth-first over all length-4 slot words from the root
  struct Node {
    Mat2 T;
    long rep;
    Quat glue;
    int depth;
  };
  std::vector<Node> stack{{Mat2{Int(1), Int(0), Int(0), Int(1)}, 0, qone(), 0}};
  long visited = 0;
  while (!stack.empty()) {
    Node nd = stack.back();
    stack.pop_back();
    ++visited;
    // the stored glue carries the current tree vertex onto its class rep
    CHECK(ctx.act_canon(nd.glue, nd.T) == G.vertices()[nd.rep].M);
    if (nd.depth == 4) continue;
    for (long s = 0; s <= ctx.p(); ++s) {
      auto st = G.step(nd.rep, nd.glue, nd.T, s);
      CHECK(st.edge >= 0);
      CHECK(G.edges()[st.edge].unoriented == st.unoriented);
      stack.push_back({ctx.mat_mul2(nd.T, ctx.slot_matrix(s)), st.child_rep, st.child_glue,
                       nd.depth + 1});
    }
  }
  CHECK(visited == 1 + 3 + 9 + 27 + 81);
  // at the root the walk reproduces the slot table
  for (long s = 0; s <= ctx.p(); ++s) {
    auto st = G.step(0, qone(), Mat2{Int(1), Int(0), Int(0), Int(1)}, s);
    CHECK(st.edge == G.vertices()[0].slots[s].edge);
    CHECK(st.child_rep == G.vertices()[0].slots[s].rep);
  }
}

TEST_CASE("precision exhaustion is reported") {
  BTContext ctx(hurwitz(), 3, 40);
  CHECK_THROWS_AS(ctx.canon(Mat2{pow_int(Int(3), 35), Int(0), Int(0), Int(1)}), Error);
  try {
    ctx.canon(Mat2{pow_int(Int(3), 35), Int(0), Int(0), Int(1)});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind == ErrKind::precision);
  }
}
