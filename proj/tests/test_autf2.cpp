#include "f3conj/autf2.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gens.hpp"

using namespace f3conj;

namespace {
const Word a({1}), b({2});

M2 random_gl2(std::mt19937_64& rng, int moves) {
  M2 m;
  for (int i = 0; i < moves; ++i) {
    auto q = static_cast<int64_t>(rng() % 5) - 2;
    switch (rng() % 4) {
      case 0: m = m * M2{1, q, 0, 1}; break;
      case 1: m = m * M2{1, 0, q, 1}; break;
      case 2: m = m * M2{0, 1, -1, 0}; break;
      default: m = m * M2{1, 0, 0, -1}; break;
    }
  }
  return m;
}
}  // namespace

TEST_CASE("abelianization to gl2z") {
  CHECK(to_gl2z(FreeMap(2, {a * b, a})) == M2{1, 1, 1, 0});
  CHECK(to_gl2z(FreeMap(2, {a, b * a})) == M2{1, 0, 1, 1});
  CHECK(to_gl2z(FreeMap::identity(2)) == M2::ident());
  CHECK_THROWS_AS(to_gl2z(FreeMap::identity(3)), std::invalid_argument);
}

TEST_CASE("lifting gl2z matrices to automorphisms") {
  CHECK(lift_gl2z(M2{1, 3, 0, 1}).image(1) == a * pow(b, 3));
  std::mt19937_64 rng(515);
  for (int t = 0; t < 120; ++t) {
    M2 m = random_gl2(rng, 1 + static_cast<int>(rng() % 7));
    FreeMap f = lift_gl2z(m);
    CHECK(to_gl2z(f) == m);
    CHECK(is_automorphism(f));
  }
  // functorial: lift of a product conjugates like the product
  M2 m1{1, 2, 0, 1}, m2{0, 1, -1, 0};
  CHECK(to_gl2z(compose(lift_gl2z(m1), lift_gl2z(m2))) == m1 * m2);
}

TEST_CASE("centralizer reps lift with inner discrepancy") {
  FreeMap phi(2, {a * b, b});  // parabolic abelianization
  for (const auto& rep : abelian_centralizer_reps(phi)) {
    FreeMap lhs = conjugate_map(phi, rep.rho);
    FreeMap rhs = compose(phi, FreeMap::inner(2, rep.d));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("planted aut conjugacy instances are recovered") {
  std::mt19937_64 rng(20260816);
  int rounds = 0;
  while (rounds < 25) {
    FreeMap phi = testgen::random_automorphism(rng, 2, 5);
    Gl2Kind k = classify_gl2(to_gl2z(phi));
    if (k == Gl2Kind::central || k == Gl2Kind::finite) continue;
    FreeMap chi = testgen::random_automorphism(rng, 2, 4);
    FreeMap psi = conjugate_map(phi, chi);
    auto res = aut_f2_conjugate(phi, psi);
    REQUIRE(res.verdict == Verdict::yes);
    CHECK(conjugate_map(phi, res.witness) == psi);
    ++rounds;
  }
}

TEST_CASE("gl2z obstructions propagate to aut conjugacy") {
  FreeMap u1(2, {a * b, b}), u2(2, {a * b * b, b});
  auto res = aut_f2_conjugate(u1, u2);
  CHECK(res.verdict == Verdict::no);
  CHECK(!res.reason.empty());
  FreeMap hyp(2, {a * b, a});
  CHECK(aut_f2_conjugate(u1, hyp).verdict == Verdict::no);
}

TEST_CASE("finite-order abelianization is rejected") {
  FreeMap swap(2, {b, a});
  CHECK_THROWS_AS(aut_f2_conjugate(swap, swap), FiniteOrderInput);
  CHECK_THROWS_AS(aut_f2_conjugate(FreeMap::identity(2), FreeMap::identity(2)),
                  FiniteOrderInput);
}

TEST_CASE("same abelianization decided through twisted instances") {
  FreeMap phi(2, {a * b, b});
  // conjugating by an inner map always works
  FreeMap psi = conjugate_map(phi, FreeMap::inner(2, a * b * a));
  auto res = aut_f2_conjugate(phi, psi);
  REQUIRE(res.verdict == Verdict::yes);
  CHECK(conjugate_map(phi, res.witness) == psi);
  // decisions are symmetric when both directions resolve
  FreeMap rho(2, {a * b, b * a * b});
  auto fwd = aut_f2_conjugate(phi, rho);
  auto bwd = aut_f2_conjugate(rho, phi);
  if (fwd.verdict != Verdict::unknown && bwd.verdict != Verdict::unknown)
    CHECK(fwd.verdict == bwd.verdict);
}
