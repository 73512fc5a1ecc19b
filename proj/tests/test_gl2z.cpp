#include "f3conj/gl2z.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

using namespace f3conj;

namespace {

std::vector<M2> gl2_with_entries_up_to(int64_t k) {
  std::vector<M2> out;
  for (int64_t a = -k; a <= k; ++a)
    for (int64_t b = -k; b <= k; ++b)
      for (int64_t c = -k; c <= k; ++c)
        for (int64_t d = -k; d <= k; ++d) {
          M2 m{a, b, c, d};
          if (m.det() == 1 || m.det() == -1) out.push_back(m);
        }
  return out;
}

// m p == p n with p in GL(2,Z) is the inverse-free conjugation test.
std::optional<M2> brute_conjugator(const M2& m, const M2& n, int64_t bound) {
  for (int64_t a = -bound; a <= bound; ++a)
    for (int64_t b = -bound; b <= bound; ++b)
      for (int64_t c = -bound; c <= bound; ++c)
        for (int64_t d = -bound; d <= bound; ++d) {
          M2 p{a, b, c, d};
          if (p.det() != 1 && p.det() != -1) continue;
          if (m * p == p * n) return p;
        }
  return std::nullopt;
}

M2 random_gl2(std::mt19937_64& rng, int moves, bool proper_only = false) {
  M2 m;
  for (int i = 0; i < moves; ++i) {
    auto q = static_cast<int64_t>(rng() % 5) - 2;
    switch (rng() % (proper_only ? 3 : 4)) {
      case 0:
        m = m * M2{1, q, 0, 1};
        break;
      case 1:
        m = m * M2{1, 0, q, 1};
        break;
      case 2:
        m = m * M2{0, 1, -1, 0};
        break;
      default:
        m = m * M2{1, 0, 0, -1};
        break;
    }
  }
  return m;
}

void check_against_oracle(const M2& m, const M2& n) {
  auto mine = gl2z_conjugate(m, n);
  auto brute = brute_conjugator(m, n, 3);
  if (brute) CHECK(mine.conjugate);
  if (mine.conjugate) {
    CHECK(m * mine.witness == mine.witness * n);
  } else {
    CHECK(!brute.has_value());
    CHECK(!mine.obstruction.empty());
  }
}

bool is_elementary_factor(const M2& f) {
  if (f == -M2::ident() || f == M2{1, 0, 0, -1}) return true;
  if (f == M2{0, 1, -1, 0} || f == M2{0, -1, 1, 0}) return true;
  return f.a == 1 && f.d == 1 && (f.b == 0 || f.c == 0);
}

}  // namespace

TEST_CASE("gl2 classification and orders") {
  CHECK(classify_gl2(M2::ident()) == Gl2Kind::central);
  CHECK(classify_gl2(-M2::ident()) == Gl2Kind::central);
  CHECK(m2_order(M2{0, -1, 1, 0}) == 4);
  CHECK(m2_order(M2{0, -1, 1, -1}) == 3);
  CHECK(m2_order(M2{0, -1, 1, 1}) == 6);
  CHECK(m2_order(M2{1, 0, 0, -1}) == 2);
  CHECK(m2_order(M2{0, 1, 1, 0}) == 2);
  CHECK(!m2_order(M2{1, 1, 0, 1}).has_value());
  CHECK(classify_gl2(M2{1, 3, 0, 1}) == Gl2Kind::parabolic);
  CHECK(classify_gl2(M2{-1, 1, 0, -1}) == Gl2Kind::parabolic);
  CHECK(classify_gl2(M2{2, 1, 1, 1}) == Gl2Kind::hyperbolic);
  CHECK(classify_gl2(M2{1, 1, 1, 0}) == Gl2Kind::hyperbolic);

  // det 1 torsion of order 2 is central
  for (const M2& m : gl2_with_entries_up_to(2))
    if (m.det() == 1 && m2_order(m) == 2) CHECK(m == -M2::ident());
}

TEST_CASE("conjugacy matches brute force on unit-entry matrices") {
  auto pool = gl2_with_entries_up_to(1);
  CHECK(pool.size() == 40);
  int yes = 0, no = 0;
  for (const M2& m : pool)
    for (const M2& n : pool) {
      if (m.det() != n.det() || m.trace() != n.trace()) {
        CHECK(!gl2z_conjugate(m, n).conjugate);
        continue;
      }
      check_against_oracle(m, n);
      ++(gl2z_conjugate(m, n).conjugate ? yes : no);
    }
  CHECK(yes >= static_cast<int>(pool.size()));
  CHECK(no > 0);
}

TEST_CASE("conjugacy matches brute force on sampled pairs") {
  auto pool = gl2_with_entries_up_to(2);
  std::map<std::pair<int64_t, int64_t>, std::vector<M2>> buckets;
  for (const M2& m : pool) buckets[{m.det(), m.trace()}].push_back(m);
  for (auto& [key, ms] : buckets) {
    size_t stride = std::max<size_t>(1, ms.size() / 6);
    std::vector<M2> reps;
    for (size_t i = 0; i < ms.size(); i += stride) reps.push_back(ms[i]);
    for (const M2& m : reps)
      for (const M2& n : reps) check_against_oracle(m, n);
  }
}

TEST_CASE("conjugates with large conjugators are recognized") {
  std::mt19937_64 rng(20260815);
  int rounds = 0;
  while (rounds < 60) {
    M2 m = random_gl2(rng, 4);
    Gl2Kind k = classify_gl2(m);
    if (k == Gl2Kind::central || k == Gl2Kind::finite) continue;
    M2 c = random_gl2(rng, 6);
    M2 n = m2_conj(m, c);
    auto res = gl2z_conjugate(m, n);
    REQUIRE(res.conjugate);
    CHECK(m2_conj(m, res.witness) == n);
    ++rounds;
  }
}

TEST_CASE("reflections split into two classes") {
  M2 diag{1, 0, 0, -1}, swap{0, 1, 1, 0};
  CHECK(!gl2z_conjugate(diag, swap).conjugate);
  CHECK(gl2z_conjugate(diag, M2{1, 2, 0, -1}).conjugate);
  CHECK(gl2z_conjugate(swap, M2{1, 1, 0, -1}).conjugate);
  // every small reflection lands in exactly one of the two classes
  for (const M2& m : gl2_with_entries_up_to(2)) {
    if (m.det() != -1 || m2_order(m) != 2) continue;
    bool in_diag = gl2z_conjugate(m, diag).conjugate;
    bool in_swap = gl2z_conjugate(m, swap).conjugate;
    CHECK(in_diag != in_swap);
  }
}

TEST_CASE("parabolic classes are separated by the shear invariant") {
  M2 u1{1, 1, 0, 1}, u2{1, 2, 0, 1};
  CHECK(!gl2z_conjugate(u1, u2).conjugate);
  CHECK(!gl2z_conjugate(u1, u2).obstruction.empty());
  CHECK(gl2z_conjugate(u1, M2{1, -1, 0, 1}).conjugate);
  CHECK(gl2z_conjugate(u1, M2{1, 0, 1, 1}).conjugate);
  CHECK(gl2z_conjugate(u2, M2{1, 0, 2, 1}).conjugate);
  CHECK(!gl2z_conjugate(u1, -u1).conjugate);  // traces differ
  CHECK(gl2z_conjugate(M2{-1, 3, 0, -1}, M2{-1, 0, 3, -1}).conjugate);
}

TEST_CASE("elliptic orders three four six form single classes") {
  auto pool = gl2_with_entries_up_to(2);
  for (int order : {3, 4, 6}) {
    std::vector<M2> torsion;
    for (const M2& m : pool)
      if (m2_order(m) == order) torsion.push_back(m);
    CHECK(torsion.size() > 1);
    for (const M2& m : torsion) {
      auto res = gl2z_conjugate(torsion.front(), m);
      REQUIRE(res.conjugate);
      CHECK(m2_conj(torsion.front(), res.witness) == m);
    }
  }
}

TEST_CASE("hyperbolic conjugacy through form classes") {
  M2 fib2{2, 1, 1, 1};
  CHECK(gl2z_conjugate(fib2, M2{1, 1, 1, 2}).conjugate);
  CHECK(gl2z_conjugate(fib2, M2{2, -1, -1, 1}).conjugate);
  // same det and trace, distinct form classes of discriminant 40
  M2 p{0, 1, 1, 6}, q{1, 3, 2, 5};
  REQUIRE(classify_gl2(p) == Gl2Kind::hyperbolic);
  REQUIRE(classify_gl2(q) == Gl2Kind::hyperbolic);
  CHECK(p.det() == q.det());
  CHECK(p.trace() == q.trace());
  auto res = gl2z_conjugate(p, q);
  CHECK(!res.conjugate);
  CHECK(!res.obstruction.empty());
  CHECK(!brute_conjugator(p, q, 4).has_value());
}

TEST_CASE("centralizer cosets of the fibonacci square") {
  M2 m{2, 1, 1, 1}, f{1, 1, 1, 0};
  auto reps = centralizer_cosets(m);
  std::set<std::tuple<int64_t, int64_t, int64_t, int64_t>> got, want;
  for (const M2& r : reps) got.insert({r.a, r.b, r.c, r.d});
  for (const M2& r : {M2::ident(), -M2::ident(), f, -f})
    want.insert({r.a, r.b, r.c, r.d});
  CHECK(got == want);
}

TEST_CASE("centralizer cosets cover and are disjoint") {
  for (const M2& m : {M2{2, 1, 1, 1}, M2{1, 1, 1, 0}, M2{1, 2, 0, 1},
                      M2{1, 0, 2, 1}, M2{-1, 3, 0, -1}, M2{-2, -1, -1, -1}}) {
    auto reps = centralizer_cosets(m);
    // distinct modulo powers of m
    for (size_t i = 0; i < reps.size(); ++i)
      for (size_t j = i + 1; j < reps.size(); ++j)
        for (int k = -6; k <= 6; ++k)
          CHECK(reps[i].inverse() * reps[j] != m2_pow(m, k));
    // every small commuting matrix lies in some coset
    for (const M2& p : gl2_with_entries_up_to(8)) {
      if (!(p * m == m * p)) continue;
      bool covered = false;
      for (const M2& r : reps)
        for (int k = -9; k <= 9 && !covered; ++k)
          covered = p == r * m2_pow(m, k);
      CHECK(covered);
    }
  }
}

TEST_CASE("centralizer cosets reject finite order") {
  CHECK_THROWS_AS(centralizer_cosets(M2{0, -1, 1, 0}), FiniteOrderInput);
  CHECK_THROWS_AS(centralizer_cosets(M2::ident()), FiniteOrderInput);
  CHECK_THROWS_AS(centralizer_cosets(M2{0, 1, 1, 0}), FiniteOrderInput);
}

TEST_CASE("elementary decomposition rebuilds the input") {
  CHECK(elementary_decomposition(M2::ident()).empty());
  std::mt19937_64 rng(4242);
  for (int t = 0; t < 100; ++t) {
    M2 m = random_gl2(rng, 1 + static_cast<int>(rng() % 8));
    auto factors = elementary_decomposition(m);
    M2 prod = M2::ident();
    for (const M2& f : factors) {
      CHECK(is_elementary_factor(f));
      prod = prod * f;
    }
    CHECK(prod == m);
  }
  CHECK_THROWS_AS(elementary_decomposition(M2{2, 0, 0, 1}),
                  std::invalid_argument);
}

TEST_CASE("indefinite form reduction and equivalence") {
  std::mt19937_64 rng(7177);
  int rounds = 0;
  while (rounds < 80) {
    M2 m = random_gl2(rng, 5);
    if (classify_gl2(m) != Gl2Kind::hyperbolic) continue;
    QForm fm = matrix_form(m);
    auto [red, sub] = qform_reduce(fm);
    CHECK(qform_reduced_indefinite(red));
    CHECK(sub.det() == 1);
    CHECK(qform_substitute(fm, sub) == red);
    CHECK(red.disc() == fm.disc());

    M2 s = random_gl2(rng, 5, /*proper_only=*/true);
    REQUIRE(s.det() == 1);
    QForm g = qform_substitute(fm, s);
    CHECK(g.disc() == fm.disc());
    auto wit = qform_equivalent(fm, g);
    REQUIRE(wit.has_value());
    CHECK(qform_substitute(fm, *wit) == g);
    ++rounds;
  }
}
