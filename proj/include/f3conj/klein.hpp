#pragma once

// The Klein bottle group K = <a,t | t^-1 a t = a^-1> in its normal form
// a^m t^n, with exact multiplication, conjugacy, automorphisms, and the
// finite congruence quotients that separate the four outer classes. All
// of it is closed-form integer arithmetic.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace f3conj {

// a^m t^n; the product rule twists the a-exponent by the parity of n.
struct KleinElement {
  int64_t m = 0;
  int64_t n = 0;

  bool operator==(const KleinElement& o) const { return m == o.m && n == o.n; }
  bool operator<(const KleinElement& o) const {
    return m != o.m ? m < o.m : n < o.n;
  }
};

inline KleinElement kmul(const KleinElement& x, const KleinElement& y) {
  int64_t sign = (x.n % 2 == 0) ? 1 : -1;
  return {x.m + sign * y.m, x.n + y.n};
}

inline KleinElement kinv(const KleinElement& x) {
  int64_t sign = (x.n % 2 == 0) ? 1 : -1;
  return {-sign * x.m, -x.n};
}

inline KleinElement kconj(const KleinElement& x, const KleinElement& h) {
  return kmul(kmul(kinv(h), x), h);
}

inline KleinElement kpow(const KleinElement& x, int64_t k) {
  KleinElement r;
  KleinElement step = k >= 0 ? x : kinv(x);
  for (int64_t i = 0; i < (k >= 0 ? k : -k); ++i) r = kmul(r, step);
  return r;
}

// Conjugacy is parity-split: even t-exponent classes are {(m,n),(-m,n)},
// odd ones collect a full a-parity class {(m-2Z, n)}.
struct KleinConjugacy {
  bool conjugate = false;
  KleinElement witness;  // kconj(x, witness) == y when conjugate
};

inline KleinConjugacy klein_conjugate(const KleinElement& x,
                                      const KleinElement& y) {
  if (x.n != y.n) return {false, {}};
  if (x.n % 2 == 0) {
    if (y.m == x.m) return {true, {0, 0}};
    if (y.m == -x.m) return {true, {0, 1}};
    return {false, {}};
  }
  if (((x.m - y.m) % 2 + 2) % 2 != 0) return {false, {}};
  return {true, {(x.m - y.m) / 2, 0}};
}

// Automorphisms: a -> a^e1, t -> a^k t^e2 with e1, e2 = +-1. The twist
// relation is preserved automatically; these exhaust Aut(K).
struct KleinAut {
  int e1 = 1;
  int64_t k = 0;
  int e2 = 1;

  KleinElement apply(const KleinElement& x) const {
    return kmul(kpow({e1, 0}, x.m), kpow({k, e2}, x.n));
  }

  bool operator==(const KleinAut& o) const {
    return e1 == o.e1 && k == o.k && e2 == o.e2;
  }
  bool operator<(const KleinAut& o) const {
    if (e1 != o.e1) return e1 < o.e1;
    if (k != o.k) return k < o.k;
    return e2 < o.e2;
  }
};

inline KleinAut kcompose(const KleinAut& f, const KleinAut& g) {
  // x(fg) = (xf)g; compute images of a and t through g.
  KleinElement a2 = g.apply({f.e1, 0});
  KleinElement t2 = g.apply({f.k, f.e2});
  if (a2.n != 0 || (t2.n != 1 && t2.n != -1))
    throw std::logic_error("composite is not in automorphism form");
  return {static_cast<int>(a2.m), t2.m, static_cast<int>(t2.n)};
}

inline KleinAut kaut_inner(const KleinElement& h) {
  KleinElement a = kconj({1, 0}, h);
  KleinElement t = kconj({0, 1}, h);
  return {static_cast<int>(a.m), t.m, static_cast<int>(t.n)};
}

// Outer class: e1 and the even part of k die against inner conjugation by
// t and a; what survives is (k mod 2, e2).
inline std::pair<int, int> klein_outer_class(const KleinAut& f) {
  return {static_cast<int>(((f.k % 2) + 2) % 2), f.e2};
}

struct KleinOutGroup {
  std::vector<KleinAut> reps;                 // one per outer class
  std::map<std::pair<int, int>, int> index;   // class label -> rep position
};

// Out(K) has exactly four classes, represented by a -> a, t -> a^u t^eps.
inline KleinOutGroup klein_out_group() {
  KleinOutGroup o;
  for (int u : {0, 1})
    for (int eps : {1, -1}) {
      o.index[{u, eps}] = static_cast<int>(o.reps.size());
      o.reps.push_back({1, u, eps});
    }
  return o;
}

// Finite quotient K / <<a^2, t^s>> for even twisting: with a^2 = 1 the
// group abelianizes, so the quotient is Z/2 x Z/s. Elements are (m mod 2,
// n mod s).
struct KleinQuotient {
  int64_t s;
  std::pair<int, int> project(const KleinElement& x) const {
    return {static_cast<int>(((x.m % 2) + 2) % 2),
            static_cast<int>(((x.n % s) + s) % s)};
  }
};

struct MinkowskiKleinReport {
  bool t3_kernel_characteristic = false;  // the twist classes break it
  std::vector<std::pair<int, int>> t3_defect_classes;
  bool t6_injective = false;  // four distinct induced maps on Z/2 x Z/6
};

// Congruence separation of Out(K). The quotient by <<a^2, t^3>> is not
// functorial: (a -> a, t -> at) sends t^3 to a t^3, which is not in the
// kernel subgroup {(even, 3Z)}. Doubling the twist repairs it, and on
// Z/2 x Z/6 the four classes induce four distinct automorphisms.
inline MinkowskiKleinReport minkowski_check_klein() {
  MinkowskiKleinReport rep;
  KleinOutGroup out = klein_out_group();

  // Kernel membership for <<a^2, t^s>> with s even or odd: the normal
  // closure is {(even m, n in sZ)} either way (t-conjugates of a^2 only
  // flip signs, a-conjugates of t^s shift m by an even amount).
  auto in_kernel = [](const KleinElement& x, int64_t s) {
    return x.m % 2 == 0 && x.n % s == 0;
  };

  rep.t3_kernel_characteristic = true;
  for (const KleinAut& f : out.reps)
    for (const KleinElement& gen : {KleinElement{2, 0}, KleinElement{0, 3}})
      if (!in_kernel(f.apply(gen), 3)) {
        rep.t3_kernel_characteristic = false;
        rep.t3_defect_classes.push_back(klein_outer_class(f));
      }

  // The t^6 quotient: push each representative through and compare the
  // four induced maps on all twelve elements.
  KleinQuotient q{6};
  for (const KleinAut& f : out.reps)
    for (const KleinElement& gen : {KleinElement{2, 0}, KleinElement{0, 6}})
      if (!in_kernel(f.apply(gen), 6)) return rep;  // would not descend
  std::set<std::vector<std::pair<int, int>>> tables;
  for (const KleinAut& f : out.reps) {
    std::vector<std::pair<int, int>> table;
    for (int m = 0; m < 2; ++m)
      for (int n = 0; n < 6; ++n)
        table.push_back(q.project(f.apply({m, n})));
    tables.insert(table);
  }
  rep.t6_injective = tables.size() == out.reps.size();
  return rep;
}

// GL(2,Z) analogue: torsion injects into GL(2, Z/3) but not GL(2, Z/2),
// where -I dies.
inline bool minkowski_check_z2(int modulus) {
  using Mat2 = std::array<std::array<int64_t, 2>, 2>;
  // Every nontrivial torsion element of GL(2,Z) is conjugate to one of
  // these or to a power of one, and dying mod m is conjugation invariant,
  // so the finite sweep decides whether the congruence kernel is torsion
  // free.
  const std::vector<Mat2> torsion{
      {{{-1, 0}, {0, -1}}},  // order 2, central
      {{{1, 0}, {0, -1}}},   // order 2, reflection
      {{{0, 1}, {1, 0}}},    // order 2, swap
      {{{0, -1}, {1, -1}}},  // order 3
      {{{0, -1}, {1, 0}}},   // order 4
      {{{0, -1}, {1, 1}}},   // order 6
  };
  const Mat2 id{{{1 % modulus, 0}, {0, 1 % modulus}}};
  for (Mat2 m : torsion) {
    for (auto& row : m)
      for (auto& x : row) x = ((x % modulus) + modulus) % modulus;
    if (m == id) return false;
  }
  return true;
}

// Mixed Whitehead step for Klein peripherals: do two ordered tuples of
// conjugacy classes differ by an outer automorphism of K? Sweeps the four
// classes and solves the simultaneous conjugation exactly.
struct KleinMixedResult {
  bool equivalent = false;
  KleinAut outer;        // sweep representative
  KleinElement witness;  // kconj(x_i outer, witness) == y_i for all i
};

inline KleinMixedResult klein_mixed_whitehead(
    const std::vector<KleinElement>& xs, const std::vector<KleinElement>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("tuple size mismatch");
  for (const KleinAut& f : klein_out_group().reps) {
    // Solve conj-by-(p,q) constraints: for n even sigma*m_z = m_y, for n
    // odd sigma*(m_z - 2p) = m_y, with sigma = (-1)^q.
    for (int sigma : {1, -1}) {
      bool ok = true;
      std::optional<int64_t> p;
      for (size_t i = 0; ok && i < xs.size(); ++i) {
        KleinElement z = f.apply(xs[i]);
        if (z.n != ys[i].n) {
          ok = false;
        } else if (((z.n % 2) + 2) % 2 == 0) {
          ok = sigma * z.m == ys[i].m;
        } else {
          int64_t num = z.m - sigma * ys[i].m;
          if (num % 2 != 0) {
            ok = false;
          } else if (p && *p != num / 2) {
            ok = false;
          } else {
            p = num / 2;
          }
        }
      }
      if (!ok) continue;
      KleinElement h{p.value_or(0), sigma == 1 ? 0 : 1};
      bool verified = true;
      for (size_t i = 0; i < xs.size(); ++i)
        verified = verified && kconj(f.apply(xs[i]), h) == ys[i];
      if (verified) return {true, f, h};
    }
  }
  return {false, {}, {}};
}

}  // namespace f3conj
