#pragma once

// Exact integer linear algebra on small dense matrices. Everything here
// is int64 arithmetic on matrices of size <= a few; no overflow guards
// beyond the smallness of the inputs.

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace f3conj {

using IVec = std::vector<int64_t>;
using IMat = std::vector<IVec>;  // row-major, rectangular

inline IMat imat_identity(int n) {
  IMat a(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) a[i][i] = 1;
  return a;
}

inline IMat imat_mul(const IMat& a, const IMat& b) {
  size_t m = a.size(), k = b.size(), n = b.empty() ? 0 : b[0].size();
  IMat c(m, IVec(n, 0));
  for (size_t i = 0; i < m; ++i)
    for (size_t t = 0; t < k; ++t) {
      int64_t av = a[i][t];
      if (av == 0) continue;
      for (size_t j = 0; j < n; ++j) c[i][j] += av * b[t][j];
    }
  return c;
}

// Row vector times matrix.
inline IVec ivec_mat(const IVec& v, const IMat& a) {
  size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  IVec r(n, 0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) r[j] += v[i] * a[i][j];
  return r;
}

// Matrix times column vector.
inline IVec mat_ivec(const IMat& a, const IVec& v) {
  size_t m = a.size(), n = a.empty() ? 0 : a[0].size();
  IVec r(m, 0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) r[i] += a[i][j] * v[j];
  return r;
}

inline int64_t ivec_dot(const IVec& a, const IVec& b) {
  int64_t s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline IMat imat_sub(IMat a, const IMat& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) a[i][j] -= b[i][j];
  return a;
}

inline int64_t imat_trace(const IMat& a) {
  int64_t t = 0;
  for (size_t i = 0; i < a.size(); ++i) t += a[i][i];
  return t;
}

inline IMat imat_pow(const IMat& a, int k) {
  if (k < 0) throw std::invalid_argument("negative matrix power");
  IMat r = imat_identity(static_cast<int>(a.size()));
  for (int i = 0; i < k; ++i) r = imat_mul(r, a);
  return r;
}

// Fraction-free Gaussian elimination (Bareiss).
inline int64_t imat_det(IMat a) {
  int n = static_cast<int>(a.size());
  if (n == 0) return 1;
  int64_t sign = 1, prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (a[k][k] == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (a[i][k] != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

struct ExtGcd {
  int64_t g, x, y;  // g = a*x + b*y, g >= 0
};

inline ExtGcd ext_gcd(int64_t a, int64_t b) {
  if (b == 0) {
    if (a < 0) return {-a, -1, 0};
    return {a, 1, 0};
  }
  ExtGcd r = ext_gcd(b, a % b);
  return {r.g, r.y, r.x - (a / b) * r.y};
}

// d = u * a * v with u, v unimodular, d diagonal, d[i] >= 0, d[i] | d[i+1].
struct Snf {
  IMat d, u, v;
};

inline Snf smith_normal_form(IMat a) {
  int m = static_cast<int>(a.size());
  int n = m == 0 ? 0 : static_cast<int>(a[0].size());
  IMat u = imat_identity(m), v = imat_identity(n);
  auto row_sub = [&](int i, int j, int64_t q) {  // row_i -= q*row_j
    for (int c = 0; c < n; ++c) a[i][c] -= q * a[j][c];
    for (int c = 0; c < m; ++c) u[i][c] -= q * u[j][c];
  };
  auto col_sub = [&](int i, int j, int64_t q) {  // col_i -= q*col_j
    for (int r = 0; r < m; ++r) a[r][i] -= q * a[r][j];
    for (int r = 0; r < n; ++r) v[r][i] -= q * v[r][j];
  };
  auto row_swap = [&](int i, int j) {
    std::swap(a[i], a[j]);
    std::swap(u[i], u[j]);
  };
  auto col_swap = [&](int i, int j) {
    for (int r = 0; r < m; ++r) std::swap(a[r][i], a[r][j]);
    for (int r = 0; r < n; ++r) std::swap(v[r][i], v[r][j]);
  };
  auto row_neg = [&](int i) {
    for (int c = 0; c < n; ++c) a[i][c] = -a[i][c];
    for (int c = 0; c < m; ++c) u[i][c] = -u[i][c];
  };

  int t = 0;
  while (t < m && t < n) {
    // Move a minimal-magnitude nonzero entry of the submatrix to (t,t).
    int pi = -1, pj = -1;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j)
        if (a[i][j] != 0 &&
            (pi < 0 || std::abs(a[i][j]) < std::abs(a[pi][pj]))) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    if (pi != t) row_swap(t, pi);
    if (pj != t) col_swap(t, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < m; ++i)
        if (a[i][t] != 0) {
          row_sub(i, t, a[i][t] / a[t][t]);
          if (a[i][t] != 0) {
            row_swap(i, t);
            clean = false;
          }
        }
      for (int j = t + 1; j < n; ++j)
        if (a[t][j] != 0) {
          col_sub(j, t, a[t][j] / a[t][t]);
          if (a[t][j] != 0) {
            col_swap(j, t);
            clean = false;
          }
        }
      if (clean) {
        // Pivot must divide the rest of the submatrix.
        for (int i = t + 1; i < m && clean; ++i)
          for (int j = t + 1; j < n && clean; ++j)
            if (a[i][j] % a[t][t] != 0) {
              row_sub(t, i, -1);  // row_t += row_i, reintroduces work
              clean = false;
            }
      }
    }
    if (a[t][t] < 0) row_neg(t);
    ++t;
  }
  return {a, u, v};
}

// Does v lie in the integer row lattice {x * m}? On success x gives one
// solution. On failure (z, mod) certifies it: m*z == 0 (mod mod) while
// v . z != 0 (mod mod).
struct RowSolve {
  bool solvable = false;
  IVec x;       // row vector, x * m == v
  IVec z;       // column vector certificate
  int64_t mod = 0;  // modulus for the certificate
};

inline RowSolve solve_row_lattice(const IMat& m, const IVec& v) {
  int rows = static_cast<int>(m.size());
  int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
  Snf s = smith_normal_form(m);
  IVec vv = ivec_mat(v, s.v);  // target in diagonal coordinates
  RowSolve r;
  IVec y(rows, 0);
  for (int i = 0; i < cols; ++i) {
    int64_t d = i < rows ? s.d[i][i] : 0;
    if (d != 0) {
      if (vv[i] % d != 0) {
        r.mod = d;
        r.z = IVec(cols, 0);
        for (int k = 0; k < cols; ++k) r.z[k] = s.v[k][i];
        return r;
      }
      y[i] = vv[i] / d;
    } else if (vv[i] != 0) {
      r.mod = std::abs(vv[i]) + 1;
      r.z = IVec(cols, 0);
      for (int k = 0; k < cols; ++k) r.z[k] = s.v[k][i];
      return r;
    }
  }
  r.solvable = true;
  r.x = ivec_mat(y, s.u);
  return r;
}

inline std::string to_string(const IMat& a) {
  std::string s = "[";
  for (size_t i = 0; i < a.size(); ++i) {
    s += i ? "; " : "";
    for (size_t j = 0; j < a[i].size(); ++j)
      s += (j ? "," : "") + std::to_string(a[i][j]);
  }
  return s + "]";
}

}  // namespace f3conj
