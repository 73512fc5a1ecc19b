#include "f3conj/word.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "support/gens.hpp"

using namespace f3conj;

namespace {
Word W(std::initializer_list<Letter> ls) { return Word(std::vector<Letter>(ls)); }
}  // namespace

TEST_CASE("free reduction") {
  CHECK(W({1, -1}).empty());
  CHECK(W({1, 2, -2, -1}).empty());
  CHECK(W({1, 2, -2, 3}) == W({1, 3}));
  CHECK((W({1, 2}) * W({-2, -1})).empty());
  CHECK(W({1, 1, -1}) == Word::gen(1));
}

TEST_CASE("inverse and concatenation") {
  Word w = W({1, 2, -1});
  CHECK(w.inverse() == W({1, -2, -1}));
  CHECK((w * w.inverse()).empty());
  CHECK((w.inverse() * w).empty());
  CHECK(to_string(w) == "abA");
  CHECK(to_string(Word()) == "1");
}

TEST_CASE("powers and conjugation") {
  Word a = Word::gen(1), b = Word::gen(2);
  CHECK(pow(a, 3) == W({1, 1, 1}));
  CHECK(pow(a, -2) == W({-1, -1}));
  CHECK(conj(a, b) == W({-2, 1, 2}));
  CHECK(commutator(a, b) == W({-1, -2, 1, 2}));
}

TEST_CASE("cyclic split strips matched conjugating ends") {
  Word p, c;
  cyclic_split(W({1, 2, 3, -2, -1}), p, c);
  CHECK(p == W({1, 2}));
  CHECK(c == Word::gen(3));
  cyclic_split(W({1, 2}), p, c);
  CHECK(p.empty());
  CHECK(c == W({1, 2}));
  // A single letter never strips to nothing.
  cyclic_split(Word::gen(1), p, c);
  CHECK(c == Word::gen(1));
}

TEST_CASE("cyclic word canonical rotation") {
  // Letter order: a < A < b < B.
  CHECK(CyclicWord(W({2, 1})) == CyclicWord(W({1, 2})));
  CHECK(CyclicWord(W({2, 1})).letters() == std::vector<Letter>({1, 2}));
  CHECK(CyclicWord(W({-1, 2, 1})) == CyclicWord(Word::gen(2)));
  CHECK(CyclicWord(W({2, -1})).letters() == std::vector<Letter>({-1, 2}));
  CHECK(cyclic_length(W({1, 2, -1})) == 1);
  CHECK(cyclic_length(W({1, 2})) == 2);
}

TEST_CASE("conjugacy in the free group with witness") {
  // a^-1 b a ~ b via h = a^-1
  auto h = conjugate_in_free(W({-1, 2, 1}), Word::gen(2));
  REQUIRE(h.has_value());
  CHECK(*h == W({-1}));
  CHECK(conj(W({-1, 2, 1}), *h) == Word::gen(2));

  // abab ~ baba via h = a
  auto h2 = conjugate_in_free(W({1, 2, 1, 2}), W({2, 1, 2, 1}));
  REQUIRE(h2.has_value());
  CHECK(*h2 == Word::gen(1));
  CHECK(conj(W({1, 2, 1, 2}), *h2) == W({2, 1, 2, 1}));

  CHECK_FALSE(conjugate_in_free(Word::gen(1), Word::gen(2)).has_value());
  CHECK_FALSE(conjugate_in_free(W({1, 1}), W({1, 2})).has_value());
  CHECK(conjugate_in_free(Word(), Word()).has_value());
}

TEST_CASE("conjugacy witness property on random words") {
  testgen::Rng rng(20260815);
  for (int t = 0; t < 200; ++t) {
    Word x = testgen::random_word(rng, 3, 1 + static_cast<int>(rng() % 8));
    Word g = testgen::random_word(rng, 3, static_cast<int>(rng() % 6));
    Word y = conj(x, g);
    auto h = conjugate_in_free(x, y);
    REQUIRE(h.has_value());
    CHECK(conj(x, *h) == y);
  }
}

TEST_CASE("distinct cyclic words are never reported conjugate") {
  testgen::Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    Word x = testgen::random_word(rng, 2, 1 + static_cast<int>(rng() % 6));
    Word y = testgen::random_word(rng, 2, 1 + static_cast<int>(rng() % 6));
    bool same_class = CyclicWord(x) == CyclicWord(y);
    CHECK(conjugate_in_free(x, y).has_value() == same_class);
  }
}

TEST_CASE("exponent vectors") {
  CHECK(exponent_vector(W({1, 2, -1, 2}), 3) ==
        std::vector<int64_t>({0, 2, 0}));
  CHECK(exponent_vector(Word(), 2) == std::vector<int64_t>({0, 0}));
}
