#pragma once

// Small dense exact linear algebra: rational elimination and integer
// lattice work (Hermite forms, kernels, kernels mod m). Dimensions here are
// tiny (rarely above 8 columns), so clarity wins over asymptotics.

#include <optional>
#include <vector>

#include "aclp/util.hpp"

namespace aclp {

using VecZ = std::vector<Int>;
using MatZ = std::vector<VecZ>;  // row-major
using VecQ = std::vector<Rat>;
using MatQ = std::vector<VecQ>;

inline MatZ mat_identity(size_t n) {
  MatZ I(n, VecZ(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline VecZ mat_apply(const MatZ& A, const VecZ& x) {
  VecZ y(A.size(), 0);
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  return y;
}

inline MatZ mat_mul(const MatZ& A, const MatZ& B) {
  size_t n = A.size(), m = B[0].size(), k = B.size();
  MatZ C(n, VecZ(m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t l = 0; l < k; ++l) {
      if (A[i][l] == 0) continue;
      for (size_t j = 0; j < m; ++j) C[i][j] += A[i][l] * B[l][j];
    }
  return C;
}

inline MatZ mat_transpose(const MatZ& A) {
  if (A.empty()) return {};
  MatZ T(A[0].size(), VecZ(A.size()));
  for (size_t i = 0; i < A.size(); ++i)
    for (size_t j = 0; j < A[i].size(); ++j) T[j][i] = A[i][j];
  return T;
}

// Row Hermite normal form. Returns the canonical basis of the row span:
// pivots positive, entries above each pivot reduced into [0, pivot), zero
// rows dropped. If U is given, it receives unimodular row operations applied
// to an identity alongside A (including the rows that map to zero).
inline MatZ row_hnf(MatZ A, MatZ* U = nullptr) {
  size_t rows = A.size();
  if (rows == 0) return A;
  size_t cols = A[0].size();
  MatZ T = mat_identity(rows);
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    // clear column c below row r by repeated Euclid
    while (true) {
      size_t best = rows;
      for (size_t i = r; i < rows; ++i)
        if (A[i][c] != 0 && (best == rows || cmp(abs(A[i][c]), abs(A[best][c])) < 0)) best = i;
      if (best == rows) break;
      std::swap(A[r], A[best]);
      std::swap(T[r], T[best]);
      bool clean = true;
      for (size_t i = r + 1; i < rows; ++i) {
        if (A[i][c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
        for (size_t j = 0; j < cols; ++j) A[i][j] -= q * A[r][j];
        for (size_t j = 0; j < rows; ++j) T[i][j] -= q * T[r][j];
        if (A[i][c] != 0) clean = false;
      }
      if (clean) break;
    }
    if (A[r][c] == 0) continue;
    if (A[r][c] < 0) {
      for (size_t j = 0; j < cols; ++j) A[r][j] = -A[r][j];
      for (size_t j = 0; j < rows; ++j) T[r][j] = -T[r][j];
    }
    for (size_t i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), A[i][c].get_mpz_t(), A[r][c].get_mpz_t());
      if (q == 0) continue;
      for (size_t j = 0; j < cols; ++j) A[i][j] -= q * A[r][j];
      for (size_t j = 0; j < rows; ++j) T[i][j] -= q * T[r][j];
    }
    ++r;
  }
  if (U) *U = T;
  A.resize(r);
  return A;
}

// Basis (as rows) of { x in Z^n : A x = 0 } for A with n columns.
inline MatZ kernel_int(const MatZ& A) {
  MatZ C = mat_transpose(A);  // rows indexed by x-coordinates
  size_t n = C.size();
  if (n == 0) return {};
  MatZ U;
  MatZ H = row_hnf(C, &U);
  // rows of U beyond rank(C) transform to zero rows: they span the kernel
  MatZ K;
  for (size_t i = H.size(); i < n; ++i) K.push_back(U[i]);
  return row_hnf(std::move(K));
}

// Basis (as rows, n x n) of { x in Z^n : A x = 0 (mod m) }.
inline MatZ kernel_mod(const MatZ& A, const Int& m) {
  require(m > 0, "linalg", "kernel_mod: positive modulus");
  size_t rows = A.size();
  size_t n = rows ? A[0].size() : 0;
  // augment: A x + m z = 0, project (x, z) -> x
  MatZ B(rows, VecZ(n + rows, 0));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < n; ++j) B[i][j] = A[i][j];
    B[i][n + i] = m;
  }
  MatZ K = kernel_int(B);
  MatZ proj;
  for (auto& row : K) proj.push_back(VecZ(row.begin(), row.begin() + static_cast<long>(n)));
  for (size_t i = 0; i < n; ++i) {
    VecZ e(n, 0);
    e[i] = m;
    proj.push_back(e);
  }
  MatZ H = row_hnf(std::move(proj));
  require(H.size() == n, "linalg", "kernel_mod: expected full rank");
  return H;
}

// ---------------------------------------------------------------------------
// Rational elimination.

// Reduced row echelon form in place; returns pivot column indices.
inline std::vector<size_t> rref(MatQ& A) {
  std::vector<size_t> pivots;
  size_t rows = A.size();
  if (rows == 0) return pivots;
  size_t cols = A[0].size(), r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = rows;
    for (size_t i = r; i < rows; ++i)
      if (A[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv == rows) continue;
    std::swap(A[r], A[piv]);
    Rat inv = 1 / A[r][c];
    for (size_t j = c; j < cols; ++j) A[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      Rat f = A[i][c];
      for (size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Basis (as rows) of the right kernel over Q.
inline MatQ kernel_q(MatQ A) {
  size_t cols = A.empty() ? 0 : A[0].size();
  std::vector<size_t> piv = rref(A);
  std::vector<bool> is_piv(cols, false);
  for (size_t c : piv) is_piv[c] = true;
  MatQ K;
  for (size_t c = 0; c < cols; ++c) {
    if (is_piv[c]) continue;
    VecQ v(cols, Rat(0));
    v[c] = 1;
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -A[i][c];
    K.push_back(std::move(v));
  }
  return K;
}

// Solve A x = b over Q; empty optional when inconsistent.
inline std::optional<VecQ> solve_q(MatQ A, const VecQ& b) {
  size_t rows = A.size(), cols = rows ? A[0].size() : 0;
  for (size_t i = 0; i < rows; ++i) A[i].push_back(b[i]);
  std::vector<size_t> piv = rref(A);
  if (!piv.empty() && piv.back() == cols) return std::nullopt;
  VecQ x(cols, Rat(0));
  for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = A[i][cols];
  return x;
}

inline Rat det_q(MatQ A) {
  size_t n = A.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = n;
    for (size_t i = c; i < n; ++i)
      if (A[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(A[c], A[piv]);
      det = -det;
    }
    det *= A[c][c];
    Rat inv = 1 / A[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (A[i][c] == 0) continue;
      Rat f = A[i][c] * inv;
      for (size_t j = c; j < n; ++j) A[i][j] -= f * A[c][j];
    }
  }
  return det;
}

inline Int det_z(const MatZ& A) {
  MatQ B(A.size());
  for (size_t i = 0; i < A.size(); ++i) B[i] = VecQ(A[i].begin(), A[i].end());
  Rat d = det_q(std::move(B));
  require(d.get_den() == 1, "linalg", "det_z: integer matrix has integer determinant");
  return d.get_num();
}

// Smith normal form of a square integer matrix: returns diagonal S with
// S = U * A * V, U and V unimodular, diagonal entries nonnegative with
// s_i | s_{i+1}.
inline MatZ smith(MatZ A, MatZ* Uout = nullptr, MatZ* Vout = nullptr) {
  size_t n = A.size();
  MatZ U = mat_identity(n), V = mat_identity(n);
  auto row_sub = [&](size_t i, size_t k, const Int& q) {
    for (size_t j = 0; j < n; ++j) {
      A[i][j] -= q * A[k][j];
      U[i][j] -= q * U[k][j];
    }
  };
  auto col_sub = [&](size_t j, size_t k, const Int& q) {
    for (size_t i = 0; i < n; ++i) {
      A[i][j] -= q * A[i][k];
      V[i][j] -= q * V[i][k];
    }
  };
  for (size_t t = 0; t < n; ++t) {
    while (true) {
      // move a minimal nonzero entry of the trailing block to (t, t)
      size_t bi = n, bj = n;
      for (size_t i = t; i < n; ++i)
        for (size_t j = t; j < n; ++j)
          if (A[i][j] != 0 && (bi == n || cmp(abs(A[i][j]), abs(A[bi][bj])) < 0)) bi = i, bj = j;
      if (bi == n) break;  // trailing block zero
      if (bi != t) {
        std::swap(A[t], A[bi]);
        std::swap(U[t], U[bi]);
      }
      if (bj != t)
        for (size_t i = 0; i < n; ++i) {
          std::swap(A[i][t], A[i][bj]);
          std::swap(V[i][t], V[i][bj]);
        }
      bool again = false;
      for (size_t i = t + 1; i < n; ++i)
        if (A[i][t] != 0) {
          Int q;
          mpz_fdiv_q(q.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
          row_sub(i, t, q);
          if (A[i][t] != 0) again = true;
        }
      for (size_t j = t + 1; j < n; ++j)
        if (A[t][j] != 0) {
          Int q;
          mpz_fdiv_q(q.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
          col_sub(j, t, q);
          if (A[t][j] != 0) again = true;
        }
      if (again) continue;
      // divisibility sweep: fold any offending entry into column t
      bool fixed = true;
      for (size_t i = t + 1; i < n && fixed; ++i)
        for (size_t j = t + 1; j < n && fixed; ++j)
          if (!mpz_divisible_p(A[i][j].get_mpz_t(), A[t][t].get_mpz_t())) {
            for (size_t jj = 0; jj < n; ++jj) {
              A[t][jj] += A[i][jj];
              U[t][jj] += U[i][jj];
            }
            fixed = false;
          }
      if (fixed) break;
    }
    if (A[t][t] < 0) {
      for (size_t j = 0; j < n; ++j) {
        A[t][j] = -A[t][j];
        U[t][j] = -U[t][j];
      }
    }
  }
  if (Uout) *Uout = U;
  if (Vout) *Vout = V;
  return A;
}

inline MatQ mat_to_q(const MatZ& A) {
  MatQ B(A.size());
  for (size_t i = 0; i < A.size(); ++i) B[i] = VecQ(A[i].begin(), A[i].end());
  return B;
}

inline MatQ mat_inverse_q(const MatQ& A) {
  size_t n = A.size();
  MatQ W(n, VecQ(2 * n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) W[i][j] = A[i][j];
    W[i][n + i] = 1;
  }
  std::vector<size_t> piv = rref(W);
  require(piv.size() == n && piv.back() == n - 1, "linalg", "mat_inverse_q: singular");
  MatQ R(n, VecQ(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) R[i][j] = W[i][n + j];
  return R;
}

// Adjugate of a nonsingular integer matrix: adj(A) = det(A) * A^{-1}.
inline MatZ mat_adjugate(const MatZ& A) {
  size_t n = A.size();
  Int d = det_z(A);
  require(d != 0, "linalg", "mat_adjugate: singular");
  MatQ inv = mat_inverse_q(mat_to_q(A));
  MatZ R(n, VecZ(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      Rat e = Rat(d) * inv[i][j];
      require(e.get_den() == 1, "linalg", "mat_adjugate: integrality");
      R[i][j] = e.get_num();
    }
  return R;
}

// Intersection of two full-rank row lattices (square bases, same n).
inline MatZ lattice_intersect(const MatZ& R1, const MatZ& R2) {
  Int d2 = det_z(R2);
  require(d2 != 0, "linalg", "lattice_intersect: degenerate");
  // row x = c R1 lies in L2 iff c R1 adj(R2) = 0 mod det(R2)
  MatZ D = mat_mul(R1, mat_adjugate(R2));
  MatZ K = kernel_mod(mat_transpose(D), abs(d2));
  return row_hnf(mat_mul(K, R1));
}

// Index [L1 : L2] of lattices given by square row bases; L2 must sit inside L1.
inline Int lattice_index(const MatZ& L1, const MatZ& L2) {
  Int d1 = det_z(L1), d2 = det_z(L2);
  require(d1 != 0 && d2 != 0, "linalg", "lattice_index: degenerate basis");
  Rat q = Rat(abs(d2)) / Rat(abs(d1));
  require(q.get_den() == 1, "linalg", "lattice_index: not a sublattice by determinant");
  return q.get_num();
}

}  // namespace aclp
