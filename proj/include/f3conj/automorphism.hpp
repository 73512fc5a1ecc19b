#pragma once

// Endomorphisms of a free group given by generator images, with exact
// inversion (Nielsen descent) and exact inner-ness testing. Composition
// is the right action throughout: apply(compose(f,g), w) == apply(g, apply(f, w)).

#include <deque>
#include <optional>
#include <set>
#include <stdexcept>

#include "intlin.hpp"
#include "word.hpp"

namespace f3conj {

struct NotInvertible : std::runtime_error {
  explicit NotInvertible(const std::string& what) : std::runtime_error(what) {}
};

class FreeMap {
 public:
  FreeMap() : rank_(0) {}

  FreeMap(int rank, std::vector<Word> images)
      : rank_(rank), images_(std::move(images)) {
    if (static_cast<int>(images_.size()) != rank)
      throw std::invalid_argument("image count != rank");
    for (const Word& w : images_)
      if (w.max_gen() > rank)
        throw std::invalid_argument("image uses letter beyond rank");
  }

  static FreeMap identity(int rank) {
    std::vector<Word> im;
    for (int i = 1; i <= rank; ++i) im.push_back(Word::gen(i));
    return FreeMap(rank, im);
  }

  // x |-> g^-1 x g
  static FreeMap inner(int rank, const Word& g) {
    std::vector<Word> im;
    for (int i = 1; i <= rank; ++i) im.push_back(conj(Word::gen(i), g));
    return FreeMap(rank, im);
  }

  int rank() const { return rank_; }
  const Word& image(int i) const { return images_[i - 1]; }  // 1-based
  const std::vector<Word>& images() const { return images_; }

  Word apply(const Word& w) const {
    Word r;
    for (Letter x : w.letters()) {
      const Word& im = images_[std::abs(x) - 1];
      if (x > 0)
        r.append(im);
      else
        r.append(im.inverse());
    }
    return r;
  }

  bool operator==(const FreeMap& o) const {
    return rank_ == o.rank_ && images_ == o.images_;
  }
  bool operator!=(const FreeMap& o) const { return !(*this == o); }
  bool operator<(const FreeMap& o) const {
    if (rank_ != o.rank_) return rank_ < o.rank_;
    return images_ < o.images_;
  }

  bool is_identity() const {
    for (int i = 1; i <= rank_; ++i)
      if (!(image(i) == Word::gen(i))) return false;
    return true;
  }

  size_t total_image_length() const {
    size_t s = 0;
    for (const Word& w : images_) s += w.size();
    return s;
  }

  // Row i = exponent vector of the image of generator i, so the map
  // compose -> matrix product is a homomorphism.
  IMat abelianization() const {
    IMat a(rank_, IVec(rank_, 0));
    for (int i = 0; i < rank_; ++i) a[i] = exponent_vector(images_[i], rank_);
    return a;
  }

 private:
  int rank_;
  std::vector<Word> images_;
};

inline FreeMap compose(const FreeMap& f, const FreeMap& g) {
  std::vector<Word> im;
  for (int i = 1; i <= f.rank(); ++i) im.push_back(g.apply(f.image(i)));
  return FreeMap(f.rank(), im);
}

namespace detail {

// Elementary Nielsen moves on an image tuple. Replacing w_i by w_i^-1,
// w_i * w_j^s, or w_j^s * w_i equals pre-composition with the elementary
// automorphism written in nu().
struct NielsenMove {
  int kind;  // 0: invert i; 1: i |-> i*j; 2: i |-> j*i (j a signed letter)
  int i;
  Letter j;
};

inline FreeMap nielsen_nu(int rank, const NielsenMove& m) {
  std::vector<Word> im;
  for (int g = 1; g <= rank; ++g) im.push_back(Word::gen(g));
  switch (m.kind) {
    case 0:
      im[m.i - 1] = Word({-m.i});
      break;
    case 1:
      im[m.i - 1] = Word({m.i, m.j});
      break;
    case 2:
      im[m.i - 1] = Word({m.j, m.i});
      break;
  }
  return FreeMap(rank, im);
}

inline std::vector<NielsenMove> nielsen_moves(int rank) {
  std::vector<NielsenMove> ms;
  for (int i = 1; i <= rank; ++i) ms.push_back({0, i, 0});
  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j) {
      if (i == j) continue;
      for (Letter s : {j, -j}) {
        ms.push_back({1, i, s});
        ms.push_back({2, i, s});
      }
    }
  return ms;
}

using Tuple = std::vector<Word>;

inline Tuple move_applied(const Tuple& t, const NielsenMove& m) {
  Tuple r = t;
  const Word& wi = t[m.i - 1];
  if (m.kind == 0) {
    r[m.i - 1] = wi.inverse();
  } else {
    const Word& wj = t[std::abs(m.j) - 1];
    Word f = m.j > 0 ? wj : wj.inverse();
    r[m.i - 1] = m.kind == 1 ? wi * f : f * wi;
  }
  return r;
}

inline size_t tuple_length(const Tuple& t) {
  size_t s = 0;
  for (const Word& w : t) s += w.size();
  return s;
}

inline std::vector<Letter> tuple_key(const Tuple& t) {
  std::vector<Letter> k;
  for (const Word& w : t) {
    for (Letter x : w.letters()) k.push_back(x);
    k.push_back(0);
  }
  return k;
}

inline bool is_signed_perm(const Tuple& t) {
  std::set<int> seen;
  for (const Word& w : t) {
    if (w.size() != 1) return false;
    seen.insert(std::abs(w.at(0)));
  }
  return seen.size() == t.size();
}

}  // namespace detail

// Inverse automorphism, or nullopt if the images are not a basis.
// Greedy length descent over Nielsen moves, with breadth-first search
// across equal-length plateaus; by the Nielsen non-increasing-path
// theorem an exhausted plateau with no descent certifies a non-basis.
inline std::optional<FreeMap> try_inverse(const FreeMap& f) {
  int n = f.rank();
  if (n == 0) return FreeMap(0, {});
  int64_t d = imat_det(f.abelianization());
  if (d != 1 && d != -1) return std::nullopt;

  const auto moves = detail::nielsen_moves(n);
  detail::Tuple cur = f.images();
  std::vector<detail::NielsenMove> path;
  constexpr size_t kPlateauCap = 200000;

  while (!detail::is_signed_perm(cur)) {
    size_t plen = detail::tuple_length(cur);
    std::set<std::vector<Letter>> visited{detail::tuple_key(cur)};
    std::deque<std::pair<detail::Tuple, std::vector<detail::NielsenMove>>> q;
    q.push_back({cur, {}});
    bool advanced = false;
    while (!q.empty() && !advanced) {
      auto [t, p] = q.front();
      q.pop_front();
      for (const auto& m : moves) {
        detail::Tuple t2 = detail::move_applied(t, m);
        size_t l2 = detail::tuple_length(t2);
        if (l2 > plen) continue;
        if (l2 < plen || detail::is_signed_perm(t2)) {
          cur = t2;
          for (const auto& mm : p) path.push_back(mm);
          path.push_back(m);
          advanced = true;
          break;
        }
        auto key = detail::tuple_key(t2);
        if (visited.insert(key).second) {
          auto p2 = p;
          p2.push_back(m);
          q.push_back({t2, std::move(p2)});
        }
      }
      if (visited.size() > kPlateauCap)
        throw std::runtime_error("nielsen plateau budget exceeded");
    }
    if (!advanced) return std::nullopt;
  }

  // cur is a signed permutation tuple pi; f = pi o nu_m^-1 o ... o nu_1^-1,
  // so f^-1 = compose(...compose(pi^-1, nu_m)..., nu_1).
  std::vector<Word> pinv(n);
  for (int i = 1; i <= n; ++i) {
    Letter x = cur[i - 1].at(0);
    pinv[std::abs(x) - 1] = Word({x > 0 ? i : -i});
  }
  FreeMap inv(n, pinv);
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    inv = compose(inv, detail::nielsen_nu(n, *it));

  if (!compose(f, inv).is_identity() || !compose(inv, f).is_identity())
    throw std::logic_error("inverse verification failed");
  return inv;
}

inline FreeMap inverse(const FreeMap& f) {
  auto r = try_inverse(f);
  if (!r) throw NotInvertible("images are not a basis");
  return *r;
}

inline bool is_automorphism(const FreeMap& f) { return try_inverse(f).has_value(); }

inline FreeMap pow(const FreeMap& f, int k) {
  FreeMap base = k >= 0 ? f : inverse(f);
  FreeMap r = FreeMap::identity(f.rank());
  for (int i = 0; i < std::abs(k); ++i) r = compose(r, base);
  return r;
}

// f^g = compose(inverse(g), f, g), the conjugate automorphism.
inline FreeMap conjugate_map(const FreeMap& f, const FreeMap& g) {
  return compose(compose(inverse(g), f), g);
}

// Exact: returns g with f == inner(g), if one exists. Solutions of
// x1^g = f(x1) form the coset <x1>*h, and the remaining generator
// equations bound the exponent.
inline std::optional<Word> inner_word(const FreeMap& f) {
  int n = f.rank();
  if (n == 0) return Word();
  Word x1 = Word::gen(1);
  auto h = conjugate_in_free(x1, f.image(1));
  if (!h) return std::nullopt;
  if (n == 1) {
    if (f.is_identity()) return Word();
    return std::nullopt;
  }
  int64_t bound = 2;
  for (int i = 2; i <= n; ++i) {
    int64_t bi =
        (static_cast<int64_t>(f.image(i).size()) + 1 + 2 * h->size()) / 2 + 2;
    bound = std::max(bound, bi);
  }
  for (int64_t k = 0; k <= bound; ++k) {
    for (int64_t s : {k, -k}) {
      if (s == 0 && k != 0) continue;
      Word g = pow(x1, static_cast<int>(s)) * *h;
      bool ok = true;
      for (int i = 1; i <= n && ok; ++i)
        ok = conj(Word::gen(i), g) == f.image(i);
      if (ok) return g;
      if (k == 0) break;
    }
  }
  return std::nullopt;
}

inline bool is_inner(const FreeMap& f) { return inner_word(f).has_value(); }

// Least r <= rmax with f^r = id, if the powers stay small enough to tell.
inline std::optional<int> order_in_aut(const FreeMap& f, int rmax = 24,
                                       size_t length_cap = 4096) {
  FreeMap g = f;
  for (int r = 1; r <= rmax; ++r) {
    if (g.is_identity()) return r;
    if (g.total_image_length() > length_cap) return std::nullopt;
    g = compose(g, f);
  }
  return std::nullopt;
}

inline std::string to_string(const FreeMap& f) {
  std::string s;
  for (int i = 1; i <= f.rank(); ++i) {
    if (i > 1) s += ", ";
    s += letter_name(i) + "->" + to_string(f.image(i));
  }
  return s;
}

}  // namespace f3conj
