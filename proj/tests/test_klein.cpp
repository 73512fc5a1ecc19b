#include "f3conj/klein.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <functional>
#include <map>
#include <set>

using namespace f3conj;

TEST_CASE("klein arithmetic satisfies the defining relation") {
  KleinElement a{1, 0}, t{0, 1};
  CHECK(kconj(a, t) == KleinElement{-1, 0});
  CHECK(kmul(kinv(t), kmul(a, t)) == kinv(a));
  // a^m t^n . a^p t^q = a^{m + (-1)^n p} t^{n+q}
  CHECK(kmul({2, 1}, {3, 2}) == KleinElement{-1, 3});
  CHECK(kmul({2, 2}, {3, 1}) == KleinElement{5, 3});
  CHECK(kpow({1, 1}, 2) == KleinElement{0, 2});  // (at)^2 = t^2
  for (int64_t m = -3; m <= 3; ++m)
    for (int64_t n = -3; n <= 3; ++n) {
      KleinElement x{m, n};
      CHECK(kmul(x, kinv(x)) == KleinElement{0, 0});
      CHECK(kmul(kinv(x), x) == KleinElement{0, 0});
    }
}

TEST_CASE("conjugacy matches the brute-force sweep") {
  auto brute = [](const KleinElement& x, const KleinElement& y) {
    for (int64_t p = -6; p <= 6; ++p)
      for (int64_t q = -6; q <= 6; ++q)
        if (kconj(x, {p, q}) == y) return true;
    return false;
  };
  for (int64_t mx = -3; mx <= 3; ++mx)
    for (int64_t nx = -3; nx <= 3; ++nx)
      for (int64_t my = -3; my <= 3; ++my)
        for (int64_t ny = -3; ny <= 3; ++ny) {
          KleinElement x{mx, nx}, y{my, ny};
          KleinConjugacy c = klein_conjugate(x, y);
          CHECK(c.conjugate == brute(x, y));
          if (c.conjugate) CHECK(kconj(x, c.witness) == y);
        }
}

TEST_CASE("automorphism composition and inner forms") {
  KleinAut f{1, 1, 1};   // a -> a, t -> at
  KleinAut g{-1, 0, 1};  // a -> a^-1, t -> t
  CHECK(f.apply({0, 1}) == KleinElement{1, 1});
  CHECK(f.apply({0, 3}) == KleinElement{1, 3});  // (at)^3 = a t^3
  KleinAut fg = kcompose(f, g);
  for (int64_t m = -2; m <= 2; ++m)
    for (int64_t n = -2; n <= 2; ++n)
      CHECK(fg.apply({m, n}) == g.apply(f.apply({m, n})));
  CHECK(kaut_inner({0, 1}) == KleinAut{-1, 0, 1});  // conj by t
  CHECK(kaut_inner({1, 0}) == KleinAut{1, -2, 1});  // conj by a
}

TEST_CASE("out group has exactly four classes") {
  // Oracle: enumerate automorphisms with |k| <= 4 and merge any two that
  // differ by an inner conjugation, staying inside the enumeration box.
  std::vector<KleinAut> all;
  std::map<KleinAut, int> id;
  for (int e1 : {1, -1})
    for (int64_t k = -4; k <= 4; ++k)
      for (int e2 : {1, -1}) {
        id[{e1, k, e2}] = static_cast<int>(all.size());
        all.push_back({e1, k, e2});
      }
  std::vector<int> parent(all.size());
  for (size_t i = 0; i < all.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (size_t i = 0; i < all.size(); ++i)
    for (KleinElement h : {KleinElement{1, 0}, KleinElement{-1, 0},
                           KleinElement{0, 1}}) {
      KleinAut g = kcompose(kaut_inner(h), all[i]);
      auto it = id.find(g);
      if (it != id.end()) parent[find(static_cast<int>(i))] = find(it->second);
    }
  std::set<int> classes;
  for (size_t i = 0; i < all.size(); ++i) classes.insert(find(static_cast<int>(i)));
  CHECK(classes.size() == 4);

  KleinOutGroup out = klein_out_group();
  REQUIRE(out.reps.size() == 4);
  std::set<std::pair<int, int>> labels;
  for (const KleinAut& f : out.reps) {
    CHECK(f.e1 == 1);
    labels.insert(klein_outer_class(f));
  }
  CHECK(labels.size() == 4);
  // Outer class is inner invariant.
  for (const KleinAut& f : out.reps)
    CHECK(klein_outer_class(kcompose(kaut_inner({1, 1}), f)) ==
          klein_outer_class(f));
}

TEST_CASE("the t^3 congruence defect is exactly the twist classes") {
  // (a^u t^eps)^3 = a^u t^{3 eps} for u odd, so both u = 1 classes push
  // t^3 outside the kernel and the t^3 quotient is not functorial.
  MinkowskiKleinReport rep = minkowski_check_klein();
  CHECK_FALSE(rep.t3_kernel_characteristic);
  REQUIRE(rep.t3_defect_classes.size() == 2);
  CHECK(rep.t3_defect_classes[0] == std::make_pair(1, 1));
  CHECK(rep.t3_defect_classes[1] == std::make_pair(1, -1));
  CHECK(rep.t6_injective);
}

TEST_CASE("torsion congruence works mod 3 and fails mod 2") {
  CHECK(minkowski_check_z2(3));
  CHECK_FALSE(minkowski_check_z2(2));
}

TEST_CASE("mixed whitehead solves planted tuples") {
  std::vector<KleinElement> xs{{1, 2}, {0, 1}, {3, 0}};
  KleinOutGroup out = klein_out_group();
  for (const KleinAut& f : out.reps)
    for (int64_t p = -3; p <= 3; ++p)
      for (int64_t q : {0, 1}) {
        std::vector<KleinElement> ys;
        for (const KleinElement& x : xs) ys.push_back(kconj(f.apply(x), {p, q}));
        KleinMixedResult r = klein_mixed_whitehead(xs, ys);
        REQUIRE(r.equivalent);
        for (size_t i = 0; i < xs.size(); ++i)
          CHECK(kconj(r.outer.apply(xs[i]), r.witness) == ys[i]);
      }
}

TEST_CASE("mixed whitehead refuses unrelated tuples") {
  std::vector<KleinElement> xs{{1, 2}, {0, 1}};
  CHECK_FALSE(klein_mixed_whitehead(xs, {{1, 2}, {0, 2}}).equivalent);
  CHECK_FALSE(klein_mixed_whitehead(xs, {{2, 2}, {0, 1}}).equivalent);
  // Oracle cross-check: no outer rep and small conjugator matches.
  for (const KleinAut& f : klein_out_group().reps)
    for (int64_t p = -5; p <= 5; ++p)
      for (int64_t q = -2; q <= 2; ++q) {
        bool all = kconj(f.apply(xs[0]), {p, q}) == KleinElement{2, 2};
        all = all && kconj(f.apply(xs[1]), {p, q}) == KleinElement{0, 1};
        CHECK_FALSE(all);
      }
}
