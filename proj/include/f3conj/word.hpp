#pragma once

// Free-group words over a fixed finite rank. Letters are nonzero signed
// ints: +k is the k-th generator, -k its inverse (1-based). A Word is
// always freely reduced; a CyclicWord is additionally cyclically reduced
// and stored as its canonical rotation.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace f3conj {

using Letter = int32_t;

inline Letter inv(Letter x) { return -x; }

// Letter order used for all canonical forms: a < a^-1 < b < b^-1 < ...
inline int letter_key(Letter x) {
  return 2 * (std::abs(x) - 1) + (x < 0 ? 1 : 0);
}

class Word {
 public:
  Word() = default;

  // Reduces on construction; input may be arbitrary.
  explicit Word(std::vector<Letter> letters) {
    ls_.reserve(letters.size());
    for (Letter x : letters) push(x);
  }

  static Word one() { return Word(); }
  static Word gen(int i) { return Word({static_cast<Letter>(i)}); }

  // Appends a letter, cancelling against the tail.
  void push(Letter x) {
    if (x == 0) throw std::invalid_argument("zero letter");
    if (!ls_.empty() && ls_.back() == -x)
      ls_.pop_back();
    else
      ls_.push_back(x);
  }

  void append(const Word& w) {
    for (Letter x : w.ls_) push(x);
  }

  Word inverse() const {
    Word r;
    r.ls_.reserve(ls_.size());
    for (auto it = ls_.rbegin(); it != ls_.rend(); ++it) r.ls_.push_back(-*it);
    return r;
  }

  bool empty() const { return ls_.empty(); }
  size_t size() const { return ls_.size(); }
  Letter at(size_t i) const { return ls_[i]; }
  const std::vector<Letter>& letters() const { return ls_; }

  bool operator==(const Word& o) const { return ls_ == o.ls_; }
  bool operator!=(const Word& o) const { return !(*this == o); }
  bool operator<(const Word& o) const {
    if (ls_.size() != o.ls_.size()) return ls_.size() < o.ls_.size();
    for (size_t i = 0; i < ls_.size(); ++i)
      if (ls_[i] != o.ls_[i]) return letter_key(ls_[i]) < letter_key(o.ls_[i]);
    return false;
  }

  // Max |letter| appearing, 0 for the empty word.
  int max_gen() const {
    int m = 0;
    for (Letter x : ls_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::vector<Letter> ls_;
};

inline Word operator*(const Word& a, const Word& b) {
  Word r = a;
  r.append(b);
  return r;
}

inline Word pow(const Word& w, int k) {
  Word base = k >= 0 ? w : w.inverse();
  int n = std::abs(k);
  Word r;
  for (int i = 0; i < n; ++i) r.append(base);
  return r;
}

// g^h = h^-1 g h.
inline Word conj(const Word& g, const Word& h) {
  return h.inverse() * g * h;
}

inline Word commutator(const Word& a, const Word& b) {
  return a.inverse() * b.inverse() * a * b;
}

// Splits w = p * core * p^-1 with core cyclically reduced.
inline void cyclic_split(const Word& w, Word& prefix, Word& core) {
  std::vector<Letter> ls = w.letters();
  size_t lo = 0, hi = ls.size();
  std::vector<Letter> pre;
  while (hi - lo >= 2 && ls[lo] == -ls[hi - 1]) {
    pre.push_back(ls[lo]);
    ++lo;
    --hi;
  }
  prefix = Word(pre);
  core = Word(std::vector<Letter>(ls.begin() + lo, ls.begin() + hi));
}

// Cyclically reduced word stored as the rotation least in letter_key order.
class CyclicWord {
 public:
  CyclicWord() = default;

  explicit CyclicWord(const Word& w) {
    Word p, c;
    cyclic_split(w, p, c);
    ls_ = c.letters();
    canonicalize();
  }

  bool empty() const { return ls_.empty(); }
  size_t size() const { return ls_.size(); }
  const std::vector<Letter>& letters() const { return ls_; }

  bool operator==(const CyclicWord& o) const { return ls_ == o.ls_; }
  bool operator!=(const CyclicWord& o) const { return !(*this == o); }
  bool operator<(const CyclicWord& o) const {
    if (ls_.size() != o.ls_.size()) return ls_.size() < o.ls_.size();
    for (size_t i = 0; i < ls_.size(); ++i)
      if (ls_[i] != o.ls_[i]) return letter_key(ls_[i]) < letter_key(o.ls_[i]);
    return false;
  }

 private:
  void canonicalize() {
    if (ls_.empty()) return;
    size_t n = ls_.size(), best = 0;
    auto less_rot = [&](size_t i, size_t j) {
      for (size_t k = 0; k < n; ++k) {
        int a = letter_key(ls_[(i + k) % n]), b = letter_key(ls_[(j + k) % n]);
        if (a != b) return a < b;
      }
      return false;
    };
    for (size_t i = 1; i < n; ++i)
      if (less_rot(i, best)) best = i;
    std::rotate(ls_.begin(), ls_.begin() + best, ls_.end());
  }

  std::vector<Letter> ls_;
};

inline size_t cyclic_length(const Word& w) { return CyclicWord(w).size(); }

// Conjugacy in the free group: returns h with x^h = y if the classes agree.
inline std::optional<Word> conjugate_in_free(const Word& x, const Word& y) {
  Word p, xc, q, yc;
  cyclic_split(x, p, xc);
  cyclic_split(y, q, yc);
  if (xc.size() != yc.size()) return std::nullopt;
  if (xc.empty()) return Word();
  size_t n = xc.size();
  for (size_t r = 0; r < n; ++r) {
    bool ok = true;
    for (size_t k = 0; k < n && ok; ++k)
      ok = xc.at((r + k) % n) == yc.at(k);
    if (!ok) continue;
    // x = p u v p^-1 with v u = core(y); h = p u q^-1.
    Word u(std::vector<Letter>(xc.letters().begin(), xc.letters().begin() + r));
    Word h = p * u * q.inverse();
    return h;
  }
  return std::nullopt;
}

// Exponent vector of w in Z^rank.
inline std::vector<int64_t> exponent_vector(const Word& w, int rank) {
  std::vector<int64_t> v(rank, 0);
  for (Letter x : w.letters()) {
    int i = std::abs(x) - 1;
    if (i >= rank) throw std::out_of_range("letter beyond rank");
    v[i] += x > 0 ? 1 : -1;
  }
  return v;
}

// Printing: generators a,b,c,... with X = x^-1 for ASCII round-tripping.
inline std::string letter_name(Letter x) {
  int i = std::abs(x) - 1;
  std::string s;
  if (i < 26)
    s.push_back(static_cast<char>((x > 0 ? 'a' : 'A') + i));
  else {
    s = "g" + std::to_string(i + 1);
    if (x < 0) s += "^-1";
  }
  return s;
}

inline std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter x : w.letters()) s += letter_name(x);
  return s;
}

inline std::string to_string(const CyclicWord& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Letter x : w.letters()) s += letter_name(x);
  return s;
}

}  // namespace f3conj
