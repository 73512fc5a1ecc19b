#pragma once

// Whitehead moves, cyclic-length minimization, primitivity, and free
// factor support of finite families of conjugacy classes. Minimization
// is greedy strict descent (some type II move shrinks any non-minimal
// family); the minimal level is then searched breadth-first with
// length-preserving moves to minimize the letter support.

#include <optional>
#include <set>

#include "automorphism.hpp"
#include "subgroup_graph.hpp"
#include "word.hpp"

namespace f3conj {
namespace whitehead {

// Signed permutations of the generators, identity included.
inline std::vector<FreeMap> type_one_moves(int rank) {
  std::vector<int> perm(rank);
  for (int i = 0; i < rank; ++i) perm[i] = i + 1;
  std::vector<FreeMap> out;
  do {
    for (int mask = 0; mask < (1 << rank); ++mask) {
      std::vector<Word> im(rank);
      for (int i = 0; i < rank; ++i) {
        Letter x = perm[i];
        if (mask & (1 << i)) x = -x;
        im[i] = Word({x});
      }
      out.push_back(FreeMap(rank, im));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// (A, m) with m in A, m^-1 not in A: y -> (m^-1 if y^-1 in A) y (m if y in A)
// for y != m, and m -> m. Identities (A = {m}) are dropped.
inline std::vector<FreeMap> type_two_moves(int rank) {
  std::vector<FreeMap> out;
  std::vector<Letter> letters;
  for (int g = 1; g <= rank; ++g) {
    letters.push_back(g);
    letters.push_back(-g);
  }
  for (Letter m : letters) {
    std::vector<Letter> rest;
    for (Letter y : letters)
      if (std::abs(y) != std::abs(m)) rest.push_back(y);
    int k = static_cast<int>(rest.size());
    for (int mask = 1; mask < (1 << k); ++mask) {
      std::set<Letter> a{m};
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) a.insert(rest[i]);
      std::vector<Word> im(rank);
      for (int g = 1; g <= rank; ++g) {
        if (g == std::abs(m)) {
          im[g - 1] = Word::gen(g);
          continue;
        }
        std::vector<Letter> w;
        if (a.count(-g)) w.push_back(-m);
        w.push_back(g);
        if (a.count(g)) w.push_back(m);
        im[g - 1] = Word(w);
      }
      out.push_back(FreeMap(rank, im));
    }
  }
  return out;
}

// All distinct Whitehead moves of both types.
inline std::vector<FreeMap> all_moves(int rank) {
  std::set<FreeMap> seen;
  std::vector<FreeMap> out;
  for (const auto& ms : {type_one_moves(rank), type_two_moves(rank)})
    for (const FreeMap& m : ms)
      if (seen.insert(m).second) out.push_back(m);
  return out;
}

inline size_t family_length(const FreeMap& alpha, const std::vector<Word>& ws) {
  size_t s = 0;
  for (const Word& w : ws) s += cyclic_length(alpha.apply(w));
  return s;
}

struct Minimized {
  FreeMap alpha;             // family_length(alpha, input) is minimal
  std::vector<Word> words;   // apply(alpha, input), one per input word
  size_t total_length = 0;
};

inline Minimized minimize_cyclic(int rank, const std::vector<Word>& ws) {
  const auto moves = type_two_moves(rank);
  Minimized r{FreeMap::identity(rank), ws, family_length(FreeMap::identity(rank), ws)};
  for (auto& w : r.words) w = Word(CyclicWord(w).letters());
  bool improved = true;
  while (improved) {
    improved = false;
    for (const FreeMap& m : moves) {
      size_t l = 0;
      for (const Word& w : r.words) l += cyclic_length(m.apply(w));
      if (l < r.total_length) {
        r.alpha = compose(r.alpha, m);
        for (auto& w : r.words) w = Word(CyclicWord(m.apply(w)).letters());
        r.total_length = l;
        improved = true;
        break;
      }
    }
  }
  return r;
}

inline bool is_primitive(int rank, const Word& w) {
  return minimize_cyclic(rank, {w}).total_length == 1;
}

namespace detail {

inline std::vector<Letter> family_key(const std::vector<Word>& ws) {
  std::vector<Letter> k;
  for (const Word& w : ws) {
    CyclicWord c(w);
    for (Letter x : c.letters()) k.push_back(x);
    k.push_back(0);
  }
  return k;
}

inline std::set<int> letter_support(const std::vector<Word>& ws) {
  std::set<int> s;
  for (const Word& w : ws)
    for (Letter x : w.letters()) s.insert(std::abs(x));
  return s;
}

}  // namespace detail

struct Support {
  int rank;             // rank of the minimal carrying free factor
  FreeMap to_standard;  // carries every input into <x1..x_rank> up to conj
  SubgroupGraph carrier;  // to_standard^-1(<x1..x_rank>), the carrier class
  bool exhaustive;      // level orbit fully searched within budget
};

// Minimal free factor (up to conjugacy) carrying every input class. The
// minimal Whitehead level is searched for the form with fewest letters;
// a form with r letters certifies a rank-r carrier, and exhausting the
// level orbit certifies minimality.
inline Support free_factor_support(int rank, const std::vector<Word>& ws,
                                   size_t node_budget = 20000) {
  Minimized m = minimize_cyclic(rank, ws);
  if (m.total_length == 0) {
    return {0, FreeMap::identity(rank), SubgroupGraph(rank, {}), true};
  }
  const auto moves = all_moves(rank);
  std::set<std::vector<Letter>> visited{detail::family_key(m.words)};
  std::deque<std::pair<std::vector<Word>, FreeMap>> q;
  q.push_back({m.words, m.alpha});
  std::vector<Word> best_words = m.words;
  FreeMap best_alpha = m.alpha;
  size_t best_support = detail::letter_support(m.words).size();
  bool exhaustive = true;
  while (!q.empty()) {
    auto [words, alpha] = q.front();
    q.pop_front();
    for (const FreeMap& mv : moves) {
      std::vector<Word> nws;
      size_t l = 0;
      for (const Word& w : words) {
        Word nw(CyclicWord(mv.apply(w)).letters());
        l += nw.size();
        nws.push_back(nw);
      }
      if (l != m.total_length) continue;  // descent already finished
      auto key = detail::family_key(nws);
      if (!visited.insert(key).second) continue;
      FreeMap nalpha = compose(alpha, mv);
      size_t sup = detail::letter_support(nws).size();
      if (sup < best_support) {
        best_support = sup;
        best_words = nws;
        best_alpha = nalpha;
      }
      if (visited.size() >= node_budget) {
        exhaustive = false;
        q.clear();
        break;
      }
      q.push_back({nws, nalpha});
    }
  }

  // Relabel the support onto the first best_support generators.
  std::set<int> sup = detail::letter_support(best_words);
  std::vector<Word> perm_im(rank);
  int slot = 1;
  for (int g : sup) perm_im[g - 1] = Word::gen(slot++);
  for (int g = 1; g <= rank; ++g)
    if (!sup.count(g)) perm_im[g - 1] = Word::gen(slot++);
  FreeMap perm(rank, perm_im);
  FreeMap beta = compose(best_alpha, perm);
  FreeMap beta_inv = inverse(beta);
  std::vector<Word> carrier_gens;
  for (int i = 1; i <= static_cast<int>(sup.size()); ++i)
    carrier_gens.push_back(beta_inv.apply(Word::gen(i)));
  SubgroupGraph carrier(rank, carrier_gens);
  for (const Word& w : ws)
    if (!carrier.contains_up_to_conjugacy(w))
      throw std::logic_error("support carrier verification failed");
  return {static_cast<int>(sup.size()), beta, carrier, exhaustive};
}

}  // namespace whitehead
}  // namespace f3conj
