#pragma once

// Conjugacy and centralizers in GL(2,Z), exact and witnessed. Finite
// order and parabolic classes are settled by constructive canonical
// forms; infinite-order classes with irrational eigenvalues go through
// binary quadratic forms: conjugation corresponds to (anti-)equivalence
// of the associated forms, and proper equivalence of indefinite forms
// is decided on reduction cycles with tracked substitutions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "f3conj/intlin.hpp"

namespace f3conj {

struct FiniteOrderInput : std::runtime_error {
  explicit FiniteOrderInput(const std::string& w) : std::runtime_error(w) {}
};

struct M2 {
  int64_t a = 1, b = 0, c = 0, d = 1;  // [[a,b],[c,d]]

  static M2 ident() { return {}; }
  int64_t det() const { return a * d - b * c; }
  int64_t trace() const { return a + d; }
  M2 operator*(const M2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c,
            c * o.b + d * o.d};
  }
  M2 operator-() const { return {-a, -b, -c, -d}; }
  bool operator==(const M2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  bool operator!=(const M2& o) const { return !(*this == o); }
  M2 inverse() const {
    int64_t dt = det();
    if (dt == 1) return {d, -b, -c, a};
    if (dt == -1) return {-d, b, c, -a};
    throw std::invalid_argument("matrix not in GL(2,Z)");
  }
};

inline M2 m2_pow(M2 m, int k) {
  if (k < 0) {
    m = m.inverse();
    k = -k;
  }
  M2 r;
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

inline M2 m2_conj(const M2& m, const M2& c) { return c.inverse() * m * c; }

inline std::string to_string(const M2& m) {
  return "[" + std::to_string(m.a) + "," + std::to_string(m.b) + ";" +
         std::to_string(m.c) + "," + std::to_string(m.d) + "]";
}

inline std::optional<int> m2_order(const M2& m, int rmax = 12) {
  M2 p = m;
  for (int r = 1; r <= rmax; ++r) {
    if (p == M2::ident()) return r;
    p = p * m;
  }
  return std::nullopt;
}

enum class Gl2Kind {
  central,      // +-I
  finite,       // order 2 reflections, orders 3,4,6
  parabolic,    // det 1, |tr| = 2, not central
  hyperbolic,   // irrational real eigenvalues (incl. det -1, tr != 0)
};

inline Gl2Kind classify_gl2(const M2& m) {
  if (m == M2::ident() || m == -M2::ident()) return Gl2Kind::central;
  if (m2_order(m)) return Gl2Kind::finite;
  if (m.det() == 1 && (m.trace() == 2 || m.trace() == -2))
    return Gl2Kind::parabolic;
  return Gl2Kind::hyperbolic;
}

inline int64_t isqrt64(int64_t n) {
  if (n < 0) throw std::invalid_argument("isqrt of negative");
  auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline int64_t floor_div(int64_t x, int64_t y) {
  int64_t q = x / y, r = x % y;
  return (r != 0 && ((r < 0) != (y < 0))) ? q - 1 : q;
}

// --- binary quadratic forms -------------------------------------------------

struct QForm {
  int64_t a = 0, b = 0, c = 0;  // a x^2 + b xy + c y^2
  int64_t disc() const { return b * b - 4 * a * c; }
  bool operator==(const QForm& o) const {
    return a == o.a && b == o.b && c == o.c;
  }
  bool operator<(const QForm& o) const {
    if (a != o.a) return a < o.a;
    if (b != o.b) return b < o.b;
    return c < o.c;
  }
};

inline int64_t qform_eval(const QForm& f, int64_t x, int64_t y) {
  return f.a * x * x + f.b * x * y + f.c * y * y;
}

inline QForm qform_substitute(const QForm& f, const M2& s) {
  // variables (x,y) -> (s.a x + s.b y, s.c x + s.d y)
  QForm g;
  g.a = qform_eval(f, s.a, s.c);
  g.c = qform_eval(f, s.b, s.d);
  g.b = 2 * f.a * s.a * s.b + f.b * (s.a * s.d + s.b * s.c) +
        2 * f.c * s.c * s.d;
  return g;
}

// Form attached to a matrix: conjugation by det-1 matrices acts as proper
// substitution, det -1 conjugation additionally negates the form.
inline QForm matrix_form(const M2& m) { return {m.c, m.d - m.a, -m.b}; }

inline bool qform_reduced_indefinite(const QForm& f) {
  int64_t s = isqrt64(f.disc());
  return f.b >= 1 && f.b <= s && 2 * std::abs(f.a) + f.b >= s + 1 &&
         2 * std::abs(f.a) - f.b <= s;
}

// One step along the reduction/cycle operator, with its substitution.
inline std::pair<QForm, M2> qform_step(const QForm& f) {
  int64_t d = f.disc(), sd = isqrt64(d);
  int64_t cc = f.c;
  if (cc == 0) throw std::logic_error("square discriminant in form step");
  int64_t two_c = 2 * std::abs(cc);
  // r = -b mod 2|c| placed in the standard window
  int64_t hi = std::abs(cc) > sd ? std::abs(cc) : sd;
  int64_t r = -f.b + two_c * floor_div(hi + f.b, two_c);
  // now r is the largest value <= hi congruent to -b
  QForm g{cc, r, (r * r - d) / (4 * cc)};
  M2 s{0, -1, 1, (f.b + r) / (2 * cc)};
  return {g, s};
}

// Reduce to the cycle; returns (reduced form, substitution), f o S = reduced.
inline std::pair<QForm, M2> qform_reduce(QForm f) {
  M2 acc = M2::ident();
  for (int guard = 0; guard < 4096; ++guard) {
    if (qform_reduced_indefinite(f)) return {f, acc};
    auto [g, s] = qform_step(f);
    f = g;
    acc = acc * s;
  }
  throw std::logic_error("form reduction did not terminate");
}

// Search the cycle of `from` for `target`; both must be reduced. Returns
// the cumulative substitution Q with from o Q = target.
inline std::optional<M2> qform_cycle_search(const QForm& from,
                                            const QForm& target) {
  QForm cur = from;
  M2 acc = M2::ident();
  for (int guard = 0; guard < 100000; ++guard) {
    if (cur == target) return acc;
    auto [g, s] = qform_step(cur);
    cur = g;
    acc = acc * s;
    if (cur == from) return std::nullopt;  // cycle closed
  }
  throw std::logic_error("form cycle did not close");
}

// Proper equivalence with substitution: f o S = g, det S = 1.
inline std::optional<M2> qform_equivalent(const QForm& f, const QForm& g) {
  if (f.disc() != g.disc()) return std::nullopt;
  int64_t cf = std::gcd(std::gcd(f.a, f.b), f.c);
  int64_t cg = std::gcd(std::gcd(g.a, g.b), g.c);
  if (cf != cg) return std::nullopt;
  QForm fp{f.a / cf, f.b / cf, f.c / cf}, gp{g.a / cg, g.b / cg, g.c / cg};
  auto [rf, pf] = qform_reduce(fp);
  auto [rg, pg] = qform_reduce(gp);
  auto q = qform_cycle_search(rf, rg);
  if (!q) return std::nullopt;
  M2 s = pf * *q * pg.inverse();
  if (!(qform_substitute(f, s) == g)) throw std::logic_error("form witness");
  return s;
}

// --- canonical forms per class ----------------------------------------------

namespace gl2_detail {

// Primitive kernel vector of (m - I) for a reflection, as a column.
inline std::pair<int64_t, int64_t> plus_one_eigenvector(const M2& m) {
  int64_t r1a = m.a - 1, r1b = m.b;     // first row of m - I
  int64_t r2a = m.c, r2b = m.d - 1;     // second row
  int64_t x, y;
  if (r1a != 0 || r1b != 0) {
    x = r1b;
    y = -r1a;
  } else {
    x = r2b;
    y = -r2a;
  }
  int64_t g = std::gcd(std::abs(x), std::abs(y));
  if (g == 0) throw std::logic_error("reflection without eigenvector");
  return {x / g, y / g};
}

// Columns (v | w) with det 1.
inline M2 complete_basis(int64_t v1, int64_t v2) {
  auto e = ext_gcd(v1, v2);  // v1 x + v2 y = 1
  return {v1, -e.y, v2, e.x};
}

// C with C^-1 m C = [[1, k],[0,-1]], k in {0,1}.
inline std::pair<M2, int64_t> reflection_canonical(const M2& m) {
  auto [v1, v2] = plus_one_eigenvector(m);
  M2 c = complete_basis(v1, v2);
  M2 t = m2_conj(m, c);
  if (!(t.a == 1 && t.c == 0 && t.d == -1))
    throw std::logic_error("reflection canonicalization");
  int64_t k = t.b;
  int64_t kk = ((k % 2) + 2) % 2;
  int64_t shift = (k - kk) / 2;
  M2 shear{1, -shift, 0, 1};
  c = c * shear;
  t = m2_conj(m, c);
  if (!(t == M2{1, kk, 0, -1})) throw std::logic_error("reflection shear");
  return {c, kk};
}

// C with C^-1 m C the companion matrix of the characteristic polynomial;
// needs a primitive vector v with (v, m v) unimodular, which exists for
// the elliptic orders 3, 4, 6.
inline M2 companion_basis(const M2& m) {
  for (int64_t bound = 1; bound <= 64; ++bound) {
    for (int64_t p = -bound; p <= bound; ++p)
      for (int64_t q = -bound; q <= bound; ++q) {
        if (std::max(std::abs(p), std::abs(q)) != bound) continue;
        int64_t mp = m.a * p + m.b * q, mq = m.c * p + m.d * q;
        int64_t dt = p * mq - q * mp;
        if (dt == 1 || dt == -1) return {p, mp, q, mq};
      }
  }
  throw std::logic_error("no cyclic vector found");
}

// C (any det) with C^-1 m C = sigma I + k E12, k > 0.
inline std::tuple<M2, int64_t, int64_t> parabolic_canonical(const M2& m) {
  int64_t sigma = m.trace() / 2;
  M2 b{m.a - sigma, m.b, m.c, m.d - sigma};
  int64_t k = std::gcd(std::gcd(std::abs(b.a), std::abs(b.b)),
                       std::gcd(std::abs(b.c), std::abs(b.d)));
  // b = k * u * v^T with u, v primitive
  int64_t u1, u2;
  if (b.a / k != 0 || b.c / k != 0) {
    u1 = b.a / k;
    u2 = b.c / k;
  } else {
    u1 = b.b / k;
    u2 = b.d / k;
  }
  int64_t g = std::gcd(std::abs(u1), std::abs(u2));
  u1 /= g;
  u2 /= g;
  M2 c = complete_basis(u1, u2);
  M2 t = m2_conj(m, c);
  if (t.b < 0) c = c * M2{1, 0, 0, -1};
  t = m2_conj(m, c);
  if (!(t == M2{sigma, k, 0, sigma}))
    throw std::logic_error("parabolic canonicalization");
  return {c, sigma, k};
}

}  // namespace gl2_detail

// --- conjugacy decision -------------------------------------------------

struct Gl2Conjugacy {
  bool conjugate = false;
  M2 witness;                // witness^-1 * m * witness == n when conjugate
  std::string obstruction;   // human-readable separating invariant otherwise
};

inline Gl2Conjugacy gl2z_conjugate(const M2& m, const M2& n) {
  Gl2Conjugacy r;
  if (m.det() != n.det()) {
    r.obstruction = "determinant " + std::to_string(m.det()) + " vs " +
                    std::to_string(n.det());
    return r;
  }
  if (m.trace() != n.trace()) {
    r.obstruction = "trace " + std::to_string(m.trace()) + " vs " +
                    std::to_string(n.trace());
    return r;
  }
  Gl2Kind km = classify_gl2(m), kn = classify_gl2(n);
  if (km == Gl2Kind::central || kn == Gl2Kind::central) {
    if (m == n) {
      r.conjugate = true;
      r.witness = M2::ident();
    } else {
      r.obstruction = "central element equality";
    }
    return r;
  }
  if (km != kn) {  // parabolic vs hyperbolic cannot share det and trace
    r.obstruction = "class kind mismatch";
    return r;
  }
  switch (km) {
    case Gl2Kind::finite: {
      if (m.det() == -1) {  // order-2 reflections
        auto [cm, pm] = gl2_detail::reflection_canonical(m);
        auto [cn, pn] = gl2_detail::reflection_canonical(n);
        if (pm != pn) {
          r.obstruction = "reflection parity " + std::to_string(pm) + " vs " +
                          std::to_string(pn);
          return r;
        }
        r.conjugate = true;
        r.witness = cm * cn.inverse();
        break;
      }
      // orders 3, 4, 6: one class per characteristic polynomial
      M2 cm = gl2_detail::companion_basis(m);
      M2 cn = gl2_detail::companion_basis(n);
      r.conjugate = true;
      r.witness = cm * cn.inverse();
      break;
    }
    case Gl2Kind::parabolic: {
      auto [cm, sm, km2] = gl2_detail::parabolic_canonical(m);
      auto [cn, sn, kn2] = gl2_detail::parabolic_canonical(n);
      if (km2 != kn2) {  // sigma agrees through the trace
        r.obstruction = "unipotent divisibility " + std::to_string(km2) +
                        " vs " + std::to_string(kn2);
        return r;
      }
      r.conjugate = true;
      r.witness = cm * cn.inverse();
      break;
    }
    case Gl2Kind::hyperbolic: {
      QForm fm = matrix_form(m), fn = matrix_form(n);
      if (auto s = qform_equivalent(fm, fn)) {
        r.conjugate = true;
        r.witness = *s;
        break;
      }
      // det -1 conjugators negate the form after substitution
      QForm gm{-fm.a, fm.b, -fm.c};
      M2 flip{1, 0, 0, -1};
      if (auto s = qform_equivalent(gm, fn)) {
        r.conjugate = true;
        r.witness = flip * *s;
        break;
      }
      r.obstruction = "form class of " + to_string(m) + " vs " + to_string(n);
      return r;
    }
    default:
      throw std::logic_error("unreachable");
  }
  if (r.conjugate && !(m2_conj(m, r.witness) == n))
    throw std::logic_error("conjugacy witness verification failed");
  return r;
}

// --- centralizers ---------------------------------------------------------

namespace gl2_detail {

// Commutant basis element for a regular matrix: (m - a I) / g.
inline M2 commutant_generator(const M2& m) {
  int64_t g = std::gcd(std::gcd(std::abs(m.b), std::abs(m.c)),
                       std::abs(m.d - m.a));
  return {0, m.b / g, m.c / g, (m.d - m.a) / g};
}

inline double leading_eigenvalue(const M2& u) {
  double tr = static_cast<double>(u.trace());
  double rad =
      std::sqrt(std::max(0.0, tr * tr - 4.0 * static_cast<double>(u.det())));
  double lam1 = (tr + rad) / 2, lam2 = (tr - rad) / 2;
  return std::abs(lam1) >= std::abs(lam2) ? lam1 : lam2;
}

// Fundamental unit of {x I + y B : det = +-1}. The smallest |y| > 0 with
// a unit is realized by the fundamental one (|y| grows along powers once
// the leading eigenvalue exceeds the golden ratio, which integrality
// forces), so scan y upward and keep the minimal-eigenvalue candidate.
inline M2 fundamental_unit(const M2& b0) {
  int64_t tb = b0.trace(), db = b0.det();
  for (int64_t y = 1; y <= 20000000; ++y) {
    std::vector<M2> found;
    for (int64_t rhs : {int64_t{1}, int64_t{-1}}) {
      // det(xI + yB) = x^2 + tb x y + db y^2 = rhs
      int64_t disc = tb * tb * y * y - 4 * (db * y * y - rhs);
      if (disc < 0) continue;
      int64_t sq = isqrt64(disc);
      if (sq * sq != disc) continue;
      for (int64_t pm : {sq, -sq}) {
        int64_t num = -tb * y + pm;
        if (num % 2 != 0) continue;
        int64_t x = num / 2;
        M2 u{x + b0.a * y, b0.b * y, b0.c * y, x + b0.d * y};
        if (u.det() != 1 && u.det() != -1) continue;
        found.push_back(leading_eigenvalue(u) > 0 ? u : -u);
        if (pm == 0) break;
      }
    }
    if (found.empty()) continue;
    M2 best = found[0];
    for (const M2& u : found) {
      double lu = leading_eigenvalue(u), lb = leading_eigenvalue(best);
      if (lu < lb - 1e-9 ||
          (std::abs(lu - lb) <= 1e-9 &&
           std::tie(u.a, u.b, u.c, u.d) <
               std::tie(best.a, best.b, best.c, best.d)))
        best = u;
    }
    return best;
  }
  throw std::logic_error("fundamental unit not found");
}

}  // namespace gl2_detail

// Coset representatives of Centralizer(m) / <m> in GL(2,Z).
inline std::vector<M2> centralizer_cosets(const M2& m) {
  Gl2Kind kind = classify_gl2(m);
  if (kind == Gl2Kind::central || kind == Gl2Kind::finite)
    throw FiniteOrderInput("centralizer cosets need infinite order");
  std::vector<M2> reps;
  if (kind == Gl2Kind::parabolic) {
    // Centralizer is {+-shears} in the canonical basis; modulo <m> the
    // sign is absorbed exactly when sigma = -1.
    auto [c, sigma, k] = gl2_detail::parabolic_canonical(m);
    M2 cinv = c.inverse();
    for (int64_t j = 0; j < k * (sigma == 1 ? 1 : 2); ++j) {
      reps.push_back(c * M2{1, j, 0, 1} * cinv);
      if (sigma == 1) reps.push_back(c * (-M2{1, j, 0, 1}) * cinv);
    }
  } else {
    // hyperbolic-like: the centralizer is {+-eps^j}, m = sigma eps^s;
    // the exponent may be negative, in which case the generator flips.
    M2 b0 = gl2_detail::commutant_generator(m);
    M2 eps = gl2_detail::fundamental_unit(b0);
    int64_t cap = 8;
    for (int64_t e : {m.a, m.b, m.c, m.d}) cap = std::max(cap, 8 * std::abs(e));
    int s = 0, sigma = 0;
    M2 p = M2::ident(), pinv = M2::ident();
    M2 einv = eps.inverse();
    for (int j = 1; s == 0; ++j) {
      p = p * eps;
      pinv = pinv * einv;
      if (p == m || -p == m) {
        s = j;
        sigma = p == m ? 1 : -1;
      } else if (pinv == m || -pinv == m) {
        s = j;
        sigma = pinv == m ? 1 : -1;
        eps = einv;
      }
      if (s == 0 && std::max({std::abs(p.a), std::abs(p.b), std::abs(p.c),
                              std::abs(p.d)}) > cap)
        throw std::logic_error("matrix is not a power of the unit");
    }
    p = M2::ident();
    for (int r = 0; r < (sigma == 1 ? s : 2 * s); ++r) {
      reps.push_back(p);
      if (sigma == 1) reps.push_back(-p);
      p = p * eps;
    }
  }
  for (const M2& r : reps)
    if (!(r * m == m * r)) throw std::logic_error("centralizer rep check");
  return reps;
}

// Factor c into elementary matrices (shears [[1,q],[0,1]] / [[1,0],[q,1]],
// the sign flips diag(1,-1), -I, and the quarter turns [[0,1],[-1,0]],
// [[0,-1],[1,0]]); factors multiply left to right to give back c.
inline std::vector<M2> elementary_decomposition(const M2& c) {
  if (c.det() != 1 && c.det() != -1)
    throw std::invalid_argument("not in GL(2,Z)");
  std::vector<M2> ops;  // w = ops[last] * ... * ops[first] * c
  M2 w = c;
  auto apply = [&](const M2& op) {
    w = op * w;
    ops.push_back(op);
  };
  while (w.c != 0) {
    if (w.a == 0) {
      apply(M2{0, 1, -1, 0});  // rows (r1,r2) -> (r2,-r1)
      continue;
    }
    if (std::abs(w.c) >= std::abs(w.a)) {
      apply(M2{1, 0, -(w.c / w.a), 1});  // row2 -= q row1
      if (w.c != 0) apply(M2{0, 1, -1, 0});
    } else {
      apply(M2{0, 1, -1, 0});
    }
  }
  if (w.a < 0) apply(-M2::ident());
  if (w.b != 0) apply(M2{1, -w.b * w.d, 0, 1});  // row1 -= b/d row2
  if (w.d < 0) apply(M2{1, 0, 0, -1});
  if (!(w == M2::ident())) throw std::logic_error("elimination failed");
  // ops[k-1] ... ops[0] c = I, so c = ops[0]^-1 ... ops[k-1]^-1
  std::vector<M2> out;
  for (const M2& op : ops) out.push_back(op.inverse());
  M2 check = M2::ident();
  for (const M2& f : out) check = check * f;
  if (!(check == c)) throw std::logic_error("decomposition failed");
  return out;
}

}  // namespace f3conj
