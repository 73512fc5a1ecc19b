#include "f3conj/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/gens.hpp"

using namespace f3conj;

namespace {
const Word a({1}), b({2}), c({3});
}

TEST_CASE("words parse from the documented grammar") {
  CHECK(parse_word("1", 3) == Word());
  CHECK(parse_word("a", 3) == a);
  CHECK(parse_word("A", 3) == a.inverse());
  CHECK(parse_word("a^-1", 3) == a.inverse());
  CHECK(parse_word("b*a", 3) == b * a);
  CHECK(parse_word("ba", 3) == b * a);
  CHECK(parse_word("  c * B ", 3) == c * b.inverse());
  CHECK(parse_word("a^3", 3) == Word({1, 1, 1}));
  CHECK(parse_word("a^-2", 3) == Word({-1, -1}));
  CHECK(parse_word("A^-1", 3) == a);
  CHECK(parse_word("a*A", 3) == Word());
  CHECK(parse_word("a^0", 3) == Word());
}

TEST_CASE("word parse errors carry a column") {
  auto col_of = [](const std::string& s, int rank) {
    try {
      parse_word(s, rank);
    } catch (const ParseError& e) {
      return e.col;
    }
    return -1;
  };
  CHECK(col_of("a$b", 3) == 2);
  CHECK(col_of("d", 3) == 1);
  CHECK(col_of("a^", 3) == 2);
  CHECK(col_of("a*", 3) == 3);
  CHECK(col_of("1a", 3) == 2);
  CHECK(col_of("a2", 3) == 2);
}

TEST_CASE("image lists parse and reject malformed input") {
  FreeMap f = parse_images("a->a, b->b*a, c->c*b", 3);
  CHECK(f == FreeMap(3, {a, b * a, c * b}));
  // Order is free, spacing is free, uppercase inverses allowed.
  CHECK(parse_images("c ->C, a-> b,b ->a", 3) ==
        FreeMap(3, {b, a, c.inverse()}));

  CHECK_THROWS_AS(parse_images("a->a, b->b", 3), ParseError);
  CHECK_THROWS_AS(parse_images("a->a, a->b, c->c", 3), ParseError);
  CHECK_THROWS_AS(parse_images("a->a, b->b, c->d", 3), ParseError);
  CHECK_THROWS_AS(parse_images("a=b", 3), ParseError);
  CHECK_THROWS_AS(parse_images("ab->a, b->b, c->c", 3), ParseError);
}

TEST_CASE("automorphisms round-trip through the envelope") {
  std::mt19937_64 rng(50100);
  for (int round = 0; round < 50; ++round) {
    FreeMap f = testgen::random_automorphism(rng, 3, 5);
    FreeMapEnvelope env =
        free_map_from_json(free_map_to_json(f, "round trip"));
    CHECK(env.map == f);
    CHECK(env.comment == "round trip");
  }
  // Words rendered back out re-parse to themselves.
  for (int round = 0; round < 50; ++round) {
    Word w = testgen::random_word(rng, 3, 12);
    CHECK(parse_word(word_text(w), 3) == w);
  }
}

TEST_CASE("envelope validation catches schema problems") {
  nlohmann::json good = {{"schema_version", 1},
                         {"rank", 3},
                         {"images", "a->a, b->b, c->c"}};
  CHECK(free_map_from_json(good).map == FreeMap::identity(3));

  nlohmann::json j = good;
  j.erase("schema_version");
  CHECK_THROWS_AS(free_map_from_json(j), ParseError);
  j = good;
  j["schema_version"] = 2;
  CHECK_THROWS_AS(free_map_from_json(j), ParseError);
  j = good;
  j.erase("rank");
  CHECK_THROWS_AS(free_map_from_json(j), ParseError);
  j = good;
  j["rank"] = 0;
  CHECK_THROWS_AS(free_map_from_json(j), ParseError);
  j = good;
  j.erase("images");
  CHECK_THROWS_AS(free_map_from_json(j), ParseError);
  CHECK_THROWS_AS(parse_free_map_text("{nope"), ParseError);
  CHECK_THROWS_AS(free_map_from_json(nlohmann::json::array()), ParseError);
}

TEST_CASE("broken JSON reports the offending line") {
  try {
    parse_free_map_text("{\n  \"schema_version\": 1,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("free maps survive a disk round-trip") {
  FreeMap f(3, {a, b * a, c * b});
  std::string path = "io_roundtrip.json";
  save_free_map(path, f, "worked example");
  FreeMapEnvelope env = load_free_map(path);
  CHECK(env.map == f);
  CHECK(env.comment == "worked example");
  std::remove(path.c_str());
  CHECK_THROWS(load_free_map("definitely_missing.json"));
}

TEST_CASE("graph maps round-trip through JSON") {
  std::mt19937_64 rng(50200);
  // Rose maps from random automorphisms.
  for (int round = 0; round < 20; ++round) {
    FreeMap f = testgen::random_automorphism(rng, 3, 4);
    GraphMap gm = GraphMap::rose_map(f);
    GraphMap back = graph_map_from_json(graph_map_to_json(gm));
    CHECK(back.graph().vertex_count() == 1);
    CHECK(back.graph().edge_count() == 3);
    for (int e = 1; e <= 3; ++e) CHECK(back.image_of(e) == gm.image_of(e));
    CHECK(back.induced_outer() == gm.induced_outer());
  }

  // A two-vertex graph with a tree edge.
  MarkedGraph g(2, {{0, 1}, {0, 0}, {1, 1}});
  GraphMap gm(g, {0, 1}, {EdgePath{1}, EdgePath{2, 1, 3, -1}, EdgePath{3}});
  GraphMap back = graph_map_from_json(graph_map_to_json(gm));
  CHECK(back.graph().edge_count() == 3);
  CHECK(back.vertex_image(0) == 0);
  CHECK(back.image_of(2) == gm.image_of(2));
  CHECK(back.graph().is_tree_edge(1));

  nlohmann::json j = graph_map_to_json(gm);
  j["marking_tree"] = {2};
  CHECK_THROWS_AS(graph_map_from_json(j), ParseError);
  j = graph_map_to_json(gm);
  j.erase("edge_images");
  CHECK_THROWS_AS(graph_map_from_json(j), ParseError);
}
