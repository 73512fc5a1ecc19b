#pragma once

// Text and JSON input/output. Automorphisms travel as a small JSON envelope
//
//   { "schema_version": 1, "rank": 3, "images": "a->a, b->b*a, c->c*b",
//     "comment": "optional" }
//
// where a word is factors joined by optional '*', a factor is a letter with
// an optional caret exponent, and an inverse is an uppercase letter or
// ^-1. "1" is the empty word. Graph maps get a sibling envelope carrying
// vertices, edge endpoints, edge-image paths, and the marking tree.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "f3conj/automorphism.hpp"
#include "f3conj/graph_map.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ": " + what_),
        line(line_),
        col(col_) {}
};

namespace io_detail {

// Column numbers are 1-based offsets into the images string; the envelope
// is a single JSON string so the line is always 1.
inline void fail(size_t col, const std::string& msg) {
  throw ParseError(1, static_cast<int>(col) + 1, msg);
}

inline std::pair<int, int> line_col(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace io_detail

inline Word parse_word(const std::string& s, int rank, size_t base_col = 0) {
  if (rank < 1 || rank > 26)
    throw std::invalid_argument("text form supports ranks 1 to 26");
  Word w;
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
  };
  skip_ws();
  if (i < s.size() && s[i] == '1') {
    ++i;
    skip_ws();
    if (i != s.size()) io_detail::fail(base_col + i, "junk after '1'");
    return w;
  }
  bool want_factor = true;
  while (i < s.size()) {
    char ch = s[i];
    if (!std::isalpha(static_cast<unsigned char>(ch)))
      io_detail::fail(base_col + i, std::string("expected a letter, got '") +
                                        ch + "'");
    int idx = std::tolower(static_cast<unsigned char>(ch)) - 'a' + 1;
    if (idx > rank)
      io_detail::fail(base_col + i, std::string("letter '") + ch +
                                        "' exceeds rank " +
                                        std::to_string(rank));
    Letter x = std::isupper(static_cast<unsigned char>(ch))
                   ? static_cast<Letter>(-idx)
                   : static_cast<Letter>(idx);
    ++i;
    int64_t exp = 1;
    if (i < s.size() && s[i] == '^') {
      size_t caret = i++;
      bool neg = false;
      if (i < s.size() && (s[i] == '-' || s[i] == '+')) neg = s[i++] == '-';
      size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        ++i;
      if (i == start) io_detail::fail(base_col + caret, "bare '^'");
      exp = std::stoll(s.substr(start, i - start));
      if (neg) exp = -exp;
    }
    Letter step = exp >= 0 ? x : -x;
    for (int64_t r = 0; r < (exp >= 0 ? exp : -exp); ++r) w.push(step);
    want_factor = false;
    skip_ws();
    if (i < s.size() && s[i] == '*') {
      ++i;
      skip_ws();
      want_factor = true;
    }
  }
  if (want_factor)
    io_detail::fail(base_col + s.size(), "dangling '*'");
  return w;
}

inline std::string word_text(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter x : w.letters()) {
    if (!s.empty()) s += '*';
    s += letter_name(x);
  }
  return s;
}

inline std::string images_text(const FreeMap& f) {
  std::string s;
  for (int i = 1; i <= f.rank(); ++i) {
    if (i > 1) s += ", ";
    s += letter_name(i);
    s += "->";
    s += word_text(f.image(i));
  }
  return s;
}

// "a->a, b->b*a, c->c*b": every generator assigned exactly once, any order.
inline FreeMap parse_images(const std::string& s, int rank) {
  if (rank < 1 || rank > 26)
    throw std::invalid_argument("text form supports ranks 1 to 26");
  std::vector<Word> images(rank);
  std::vector<bool> seen(rank, false);
  size_t pos = 0;
  while (true) {
    size_t comma = s.find(',', pos);
    std::string clause =
        s.substr(pos, comma == std::string::npos ? comma : comma - pos);
    size_t arrow = clause.find("->");
    if (arrow == std::string::npos)
      io_detail::fail(pos, "expected 'gen->word'");
    size_t l = 0, r = arrow;
    while (l < r && std::isspace(static_cast<unsigned char>(clause[l]))) ++l;
    while (r > l && std::isspace(static_cast<unsigned char>(clause[r - 1])))
      --r;
    if (r - l != 1 ||
        !std::islower(static_cast<unsigned char>(clause[l])))
      io_detail::fail(pos + l, "left side must be a single generator");
    int idx = clause[l] - 'a' + 1;
    if (idx > rank)
      io_detail::fail(pos + l, std::string("letter '") + clause[l] +
                                   "' exceeds rank " + std::to_string(rank));
    if (seen[idx - 1])
      io_detail::fail(pos + l, std::string("generator '") + clause[l] +
                                   "' assigned twice");
    seen[idx - 1] = true;
    images[idx - 1] =
        parse_word(clause.substr(arrow + 2), rank, pos + arrow + 2);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (int i = 0; i < rank; ++i)
    if (!seen[i])
      io_detail::fail(s.size(), std::string("generator '") +
                                    static_cast<char>('a' + i) +
                                    "' has no image");
  return FreeMap(rank, images);
}

inline constexpr int kSchemaVersion = 1;

struct FreeMapEnvelope {
  FreeMap map;
  std::string comment;
};

inline FreeMapEnvelope free_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError(1, 1, "envelope must be an object");
  if (!j.contains("schema_version") ||
      !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw ParseError(1, 1, "schema_version must be 1");
  if (!j.contains("rank") || !j["rank"].is_number_integer())
    throw ParseError(1, 1, "missing integer rank");
  int rank = j["rank"].get<int>();
  if (rank < 1 || rank > 26) throw ParseError(1, 1, "rank out of range");
  if (!j.contains("images") || !j["images"].is_string())
    throw ParseError(1, 1, "missing images string");
  FreeMapEnvelope env;
  env.map = parse_images(j["images"].get<std::string>(), rank);
  if (j.contains("comment") && j["comment"].is_string())
    env.comment = j["comment"].get<std::string>();
  return env;
}

inline nlohmann::ordered_json free_map_to_json(const FreeMap& f,
                                               const std::string& comment =
                                                   "") {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["rank"] = f.rank();
  j["images"] = images_text(f);
  if (!comment.empty()) j["comment"] = comment;
  return j;
}

inline FreeMapEnvelope parse_free_map_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = io_detail::line_col(text, e.byte ? e.byte - 1 : 0);
    throw ParseError(line, col, "invalid JSON");
  }
  return free_map_from_json(j);
}

inline FreeMapEnvelope load_free_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_free_map_text(buf.str());
}

inline void save_free_map(const std::string& path, const FreeMap& f,
                          const std::string& comment = "") {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << free_map_to_json(f, comment).dump(2) << "\n";
}

// Graph maps carry their combinatorics explicitly; the marking tree is
// stored for the file to be self-describing and re-derived plus compared
// on load so a file cannot silently disagree with the loader's marking.
inline nlohmann::ordered_json graph_map_to_json(const GraphMap& gm) {
  const MarkedGraph& g = gm.graph();
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["vertices"] = g.vertex_count();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (int e = 1; e <= g.edge_count(); ++e)
    edges.push_back({g.src(e), g.dst(e)});
  j["edges"] = edges;
  nlohmann::ordered_json vm = nlohmann::ordered_json::array();
  for (int v = 0; v < g.vertex_count(); ++v) vm.push_back(gm.vertex_image(v));
  j["vertex_map"] = vm;
  nlohmann::ordered_json imgs = nlohmann::ordered_json::array();
  for (int e = 1; e <= g.edge_count(); ++e) {
    nlohmann::ordered_json path = nlohmann::ordered_json::array();
    for (EdgeRef d : gm.image_of(e)) path.push_back(d);
    imgs.push_back(path);
  }
  j["edge_images"] = imgs;
  nlohmann::ordered_json tree = nlohmann::ordered_json::array();
  for (int e = 1; e <= g.edge_count(); ++e)
    if (g.is_tree_edge(e)) tree.push_back(e);
  j["marking_tree"] = tree;
  return j;
}

inline GraphMap graph_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError(1, 1, "envelope must be an object");
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw ParseError(1, 1, "schema_version must be 1");
  for (const char* key : {"vertices", "edges", "vertex_map", "edge_images"})
    if (!j.contains(key))
      throw ParseError(1, 1, std::string("missing field ") + key);
  int nv = j["vertices"].get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j["edges"])
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  MarkedGraph g(nv, edges);
  std::vector<int> vmap = j["vertex_map"].get<std::vector<int>>();
  std::vector<EdgePath> imgs;
  for (const auto& p : j["edge_images"])
    imgs.push_back(p.get<std::vector<EdgeRef>>());
  if (j.contains("marking_tree")) {
    std::vector<int> tree = j["marking_tree"].get<std::vector<int>>();
    std::vector<int> mine;
    for (int e = 1; e <= g.edge_count(); ++e)
      if (g.is_tree_edge(e)) mine.push_back(e);
    if (tree != mine)
      throw ParseError(1, 1, "marking tree disagrees with the edge order");
  }
  return GraphMap(g, vmap, imgs);
}

}  // namespace f3conj
