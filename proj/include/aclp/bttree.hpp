#pragma once

// Bruhat-Tits tree of GL_2(Q_p): lattice classes in canonical Hermite form,
// the action of the even-valuation p-arithmetic unit group of a definite
// quaternion order through its splitting, and the finite bipartite quotient
// graph with stabilizer weights. Odd-valuation elements descend to an extra
// involution of the quotient. Certified against the class-number mass.

#include <array>
#include <optional>
#include <vector>

#include "aclp/quaternion.hpp"
#include "aclp/util.hpp"

namespace aclp {

using Mat2 = std::array<Int, 4>;  // row-major

// homothety class of the column span of [[p^a, b],[0, p^c]],
// 0 <= b < p^a, min(a, c, v_p(b)) = 0
struct VertexM {
  long a = 0, c = 0;
  Int b = 0;
  long det_val() const { return a + c; }
  bool operator==(const VertexM&) const = default;
};

inline bool operator<(const VertexM& x, const VertexM& y) {
  if (x.a != y.a) return x.a < y.a;
  if (x.c != y.c) return x.c < y.c;
  return x.b < y.b;
}

class BTContext {
 public:
  // prec bounds every valuation decision; keep it well above the largest
  // determinant valuation the walk will meet
  BTContext(const Order& E, long p, long prec);

  long p() const { return p_; }
  long prec() const { return prec_; }
  const Int& modulus() const { return pN_; }
  const Order& order() const { return E_; }
  const SplittingMap& iota() const { return iota_; }
  long nminus() const { return nminus_; }
  long nplus() const { return nplus_; }

  Mat2 vertex_matrix(const VertexM& v) const;
  Mat2 slot_matrix(long s) const;  // s in [0, p); s == p is the infinity slot
  VertexM canon(Mat2 X) const;
  VertexM neighbor(const VertexM& v, long s) const;
  Mat2 image_mod(const Quat& y) const;
  Mat2 mat_mul2(const Mat2& X, const Mat2& Y) const;
  VertexM act_canon(const Quat& y, const Mat2& X) const;

  // even-valuation group elements sending the class of v1 to the class of
  // v2, as primitive order elements up to sign; with all=false stops at the
  // first hit. Odd-valuation elements never appear here: they act on the
  // quotient as the extra involution, see QuotientGraph::map_edge.
  std::vector<Quat> transporters(const VertexM& v1, const VertexM& v2, bool all) const;
  std::optional<Quat> transporter(const VertexM& v1, const VertexM& v2) const;

  // order element of odd reduced norm valuation (smallest nrd = p^(2k+1))
  Quat odd_element(long kmax = 3) const;

 private:
  Order E_;
  long p_, prec_;
  SplittingMap iota_;
  Int pN_;
  long nminus_ = 1, nplus_ = 1;
};

struct QuotientSlot {
  long rep = -1;    // class of the child vertex
  Quat glue;        // transports the child class onto that representative
  long edge = -1;   // oriented edge class of (vertex -> child)
};

struct QuotientVertex {
  VertexM M;
  std::vector<Quat> stab;  // one representative per {+-y}
  Int w = 1;               // |stab|
  std::vector<VertexM> child_canon;
  std::vector<QuotientSlot> slots;
};

struct OrientedEdge {
  long src = -1, slot = -1;  // representative slot
  long orbit = 1;            // orbit size among the p+1 slots at src
  Int w = 1;                 // oriented edge stabilizer order
  long reverse = -1;
  long unoriented = -1;
  int sign = +1;             // +1 exactly on the chosen orientation
  bool self_reversed = false;
};

class QuotientGraph {
 public:
  explicit QuotientGraph(const BTContext& ctx);

  const BTContext& ctx() const { return *ctx_; }
  const std::vector<QuotientVertex>& vertices() const { return verts_; }
  const std::vector<OrientedEdge>& edges() const { return edges_; }
  long unoriented_count() const { return n_unor_; }
  Rat vertex_mass() const;

  // Translation by an arbitrary order element of norm p^k (odd k gives the
  // extra involution swapping the two parities).
  long map_vertex(const Quat& y, long v) const;
  long map_edge(const Quat& y, long e) const;  // oriented class to class

  // One step of a tree walk: the current tree vertex is the column span of
  // T, carried onto vertices()[rep] by glue. Returns the oriented edge class
  // of (T -> T N_s) and the child's (rep, glue).
  struct TreeStep {
    long edge = -1;
    int sign = +1;              // against the class representative direction
    long unoriented = -1;
    long child_rep = -1;
    Quat child_glue;
  };
  TreeStep step(long rep, const Quat& glue, const Mat2& T, long s) const;

 private:
  const BTContext* ctx_;
  std::vector<QuotientVertex> verts_;
  std::vector<OrientedEdge> edges_;
  long n_unor_ = 0;

  void certify() const;
};

}  // namespace aclp
