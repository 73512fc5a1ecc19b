#include "f3conj/pipeline.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gens.hpp"

using namespace f3conj;

namespace {
const Word a({1}), b({2}), c({3});

const FreeMap quad(3, {a, b * a, c * b});        // polynomial, degree 2
const FreeMap toral(3, {a, b * a, c * a});       // polynomial, degree 1
const FreeMap expo(3, {a * b, a, c * a});        // exponential, rank-2 carrier

FreeMap planted(std::mt19937_64& rng, const FreeMap& f, int moves) {
  FreeMap chi = testgen::random_automorphism(rng, 3, moves);
  Word g = testgen::random_word(rng, 3, 3);
  return compose(conjugate_map(f, chi), FreeMap::inner(3, g));
}
}  // namespace

TEST_CASE("characteristic polynomials come out exact") {
  CHECK(char_poly(quad.abelianization()) ==
        std::vector<int64_t>{-1, 3, -3, 1});
  CHECK(char_poly(FreeMap::identity(3).abelianization()) ==
        std::vector<int64_t>{-1, 3, -3, 1});
  // a->b, b->c, c->ab has companion-like abelianization.
  FreeMap rot(3, {b, c, a * b});
  CHECK(char_poly(rot.abelianization()) ==
        std::vector<int64_t>{-1, -1, 0, 1});
  CHECK(poly_text(char_poly(quad.abelianization())) ==
        "x^3 - 3*x^2 + 3*x - 1");
  CHECK(poly_text(std::vector<int64_t>{0, 0, 0, 1}) == "x^3");
}

TEST_CASE("profiles certify the three reference classes") {
  DecideBudget budget;

  InvariantProfile pq = profile(quad, budget);
  REQUIRE(pq.has_growth);
  CHECK(pq.growth_type == GrowthType::polynomial);
  CHECK(pq.growth_degree == 2);
  REQUIRE(pq.factor.has_value());
  SubgroupGraph ab(3, {a, b});
  CHECK(pq.factor->factor.conjugacy_key() == ab.conjugacy_key());

  InvariantProfile pt = profile(toral, budget);
  REQUIRE(pt.has_growth);
  CHECK(pt.growth_type == GrowthType::polynomial);
  CHECK(pt.growth_degree == 1);
  CHECK_FALSE(pt.factor.has_value());

  InvariantProfile pe = profile(expo, budget);
  REQUIRE(pe.has_growth);
  CHECK(pe.growth_type == GrowthType::exponential);
  REQUIRE(pe.carrier_rank == 2);
  REQUIRE(pe.carrier_basis.size() == 2);
  // The alignment map really sends the carrier onto <a,b>.
  SubgroupGraph aligned(3, {pe.carrier_align.apply(pe.carrier_basis[0]),
                            pe.carrier_align.apply(pe.carrier_basis[1])});
  CHECK(aligned.conjugacy_key() == ab.conjugacy_key());
  CHECK(pe.peripherals_populated);
}

TEST_CASE("profiles are conjugation invariants") {
  std::mt19937_64 rng(60100);
  for (const FreeMap& f : {quad, toral, expo}) {
    InvariantProfile base = profile(f);
    for (int round = 0; round < 4; ++round) {
      FreeMap g = planted(rng, f, 3);
      InvariantProfile p = profile(g);
      CHECK(p.char_poly == base.char_poly);
      CHECK(p.snf_shift == base.snf_shift);
      if (p.has_growth && base.has_growth) {
        CHECK(p.growth_type == base.growth_type);
        if (p.growth_type == GrowthType::polynomial)
          CHECK(p.growth_degree == base.growth_degree);
      }
      if (p.carrier_rank != 0 && base.carrier_rank != 0)
        CHECK(p.carrier_rank == base.carrier_rank);
    }
  }
}

TEST_CASE("planted conjugates come back yes with verified witnesses") {
  std::mt19937_64 rng(60200);
  struct Case {
    const FreeMap* f;
    const char* branch;
  };
  for (const Case& cs : {Case{&quad, "quadratic"},
                         Case{&expo, "exponential, rank-2 carrier"}}) {
    for (int round = 0; round < 5; ++round) {
      FreeMap g = planted(rng, *cs.f, 2);
      DecideResult r = decide(*cs.f, g);
      REQUIRE(r.verdict == Verdict::yes);
      CHECK(r.branch == cs.branch);
      CHECK(is_inner(compose(inverse(conjugate_map(*cs.f, r.witness)), g)));
    }
  }
}

TEST_CASE("the identity fast path catches inner twins") {
  DecideResult r = decide(quad, compose(quad, FreeMap::inner(3, b * a)));
  CHECK(r.verdict == Verdict::yes);
  CHECK(r.branch == "identical outer class");
}

TEST_CASE("cross-class pairs separate on named invariants") {
  DecideResult r1 = decide(quad, expo);
  CHECK(r1.verdict == Verdict::no);
  CHECK(r1.invariant == "growth type");
  CHECK(r1.left_value == "polynomial degree 2");
  CHECK(r1.right_value == "exponential");

  DecideResult r2 = decide(quad, toral);
  CHECK(r2.verdict == Verdict::no);
  CHECK(r2.invariant == "polynomial growth degree");

  DecideResult r3 = decide(quad, FreeMap::identity(3));
  CHECK(r3.verdict == Verdict::no);
  CHECK(r3.invariant == "polynomial growth degree");
  CHECK(r3.left_value == "polynomial degree 2");
  CHECK(r3.right_value == "polynomial degree 0");

  FreeMap other_ab(3, {a, b * a, c * b * b});
  DecideResult r4 = decide(quad, other_ab);
  CHECK(r4.verdict == Verdict::no);
  CHECK(r4.invariant == "Smith form of (abelianization - identity)");

  // Same growth type on both sides, so the verdict has to come from the
  // abelianization: x^3 - x - 1 against (x - 1)(x^2 - x - 1).
  FreeMap rot(3, {b, c, a * b});
  DecideResult r5 = decide(expo, rot);
  CHECK(r5.verdict == Verdict::no);
  CHECK(r5.invariant == "abelianization characteristic polynomial");
}

TEST_CASE("the quadratic branch inherits relative verdicts") {
  // Same abelianization data, decided inside Out(F_3, <a,b>); the direct
  // triple decision is the oracle for the piped result.
  FreeMap f4(3, {a, b * a, c * b * a});
  F3KResult oracle = decide_conjugacy_f3k(to_triple(quad), to_triple(f4));
  DecideResult piped = decide(quad, f4);
  CHECK(piped.branch == "quadratic");
  CHECK(piped.verdict == oracle.verdict);
  if (piped.verdict == Verdict::no)
    CHECK(piped.invariant ==
          "relative conjugacy class over the invariant factor");
  if (piped.verdict == Verdict::yes)
    CHECK(is_inner(compose(inverse(conjugate_map(quad, piped.witness)), f4)));
}

TEST_CASE("verdicts are symmetric in kind") {
  std::mt19937_64 rng(60300);
  std::vector<FreeMap> pool{quad, toral, expo, planted(rng, quad, 2),
                            FreeMap::identity(3)};
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i + 1; j < pool.size(); ++j) {
      DecideResult lr = decide(pool[i], pool[j]);
      DecideResult rl = decide(pool[j], pool[i]);
      CHECK(lr.verdict == rl.verdict);
    }
}

TEST_CASE("subquadratic and full-support fallbacks stay honest") {
  // Linear pair: either a verified yes or an unknown naming the backend.
  FreeMap t2(3, {a, b * a, c * a.inverse()});
  DecideResult r = decide(toral, t2);
  CHECK(r.branch == "subquadratic");
  if (r.verdict == Verdict::yes)
    CHECK(is_inner(compose(inverse(conjugate_map(toral, r.witness)), t2)));
  else
    CHECK(r.unknown_reason.find("not implemented") != std::string::npos);
  CHECK(r.verdict != Verdict::no);

  // Irreducible-looking exponential pair, distinct classes of same data:
  // never an unverified no.
  FreeMap rot(3, {b, c, a * b});
  FreeMap rot2(3, {b, c, a.inverse() * b.inverse()});
  if (char_poly(rot.abelianization()) == char_poly(rot2.abelianization())) {
    DecideResult r2 = decide(rot, rot2);
    if (r2.verdict == Verdict::yes)
      CHECK(is_inner(compose(inverse(conjugate_map(rot, r2.witness)), rot2)));
  }
}

TEST_CASE("starved budgets degrade to unknown, never to a wrong verdict") {
  std::mt19937_64 rng(60400);
  FreeMap g = planted(rng, quad, 4);
  DecideBudget tiny;
  tiny.rep_nodes = 1;
  tiny.search_nodes = 16;
  tiny.search_depth = 1;
  DecideResult r = decide(quad, g, tiny);
  CHECK(r.verdict != Verdict::no);
  if (r.verdict == Verdict::unknown) {
    CHECK_FALSE(r.unknown_reason.empty());
    CHECK_FALSE(r.transcript.empty());
  }
}

TEST_CASE("bounded conjugator search finds short conjugators both ways") {
  std::mt19937_64 rng(60500);
  for (int round = 0; round < 6; ++round) {
    FreeMap chi = testgen::random_automorphism(rng, 3, 1);
    FreeMap g = conjugate_map(toral, chi);
    auto found = bounded_conjugator_search(toral, g, 2, 800);
    REQUIRE(found.has_value());
    CHECK(is_inner(compose(inverse(conjugate_map(toral, *found)), g)));
    auto back = bounded_conjugator_search(g, toral, 2, 800);
    REQUIRE(back.has_value());
    CHECK(is_inner(compose(inverse(conjugate_map(g, *back)), toral)));
  }
}

TEST_CASE("every verdict leaves a transcript") {
  for (const auto& pair :
       {std::pair<FreeMap, FreeMap>{quad, expo},
        std::pair<FreeMap, FreeMap>{toral, toral},
        std::pair<FreeMap, FreeMap>{expo, expo}}) {
    DecideResult r = decide(pair.first, pair.second);
    CHECK_FALSE(r.transcript.empty());
    CHECK_FALSE(r.branch.empty());
    if (r.verdict == Verdict::no) {
      CHECK_FALSE(r.invariant.empty());
      CHECK_FALSE(r.left_value.empty());
      CHECK_FALSE(r.right_value.empty());
    }
  }
}
