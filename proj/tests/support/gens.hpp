#pragma once

// Deterministic random generators shared by the test suites.

#include <random>

#include "f3conj/automorphism.hpp"
#include "f3conj/word.hpp"

namespace testgen {

using f3conj::FreeMap;
using f3conj::Letter;
using f3conj::Word;

using Rng = std::mt19937_64;

// Freely reduced word of exactly len letters (non-backtracking walk).
inline Word random_word(Rng& rng, int rank, int len) {
  std::vector<Letter> ls;
  for (int i = 0; i < len; ++i) {
    while (true) {
      int g = static_cast<int>(rng() % rank) + 1;
      Letter x = (rng() & 1) ? g : -g;
      if (!ls.empty() && ls.back() == -x) continue;
      ls.push_back(x);
      break;
    }
  }
  return Word(ls);
}

// Automorphism assembled from nmoves random elementary Nielsen maps.
inline FreeMap random_automorphism(Rng& rng, int rank, int nmoves) {
  FreeMap f = FreeMap::identity(rank);
  for (int t = 0; t < nmoves; ++t) {
    int i = static_cast<int>(rng() % rank) + 1;
    std::vector<Word> im;
    for (int g = 1; g <= rank; ++g) im.push_back(Word::gen(g));
    int kind = rank == 1 ? 0 : static_cast<int>(rng() % 3);
    if (kind == 0) {
      im[i - 1] = Word({static_cast<Letter>(-i)});
    } else {
      int j = i;
      while (j == i) j = static_cast<int>(rng() % rank) + 1;
      Letter s = (rng() & 1) ? j : -j;
      im[i - 1] = kind == 1 ? Word({static_cast<Letter>(i), s})
                            : Word({s, static_cast<Letter>(i)});
    }
    f = compose(f, FreeMap(rank, im));
  }
  return f;
}

}  // namespace testgen
