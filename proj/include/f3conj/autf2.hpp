#pragma once

// Conjugacy in Aut(F_2) through GL(2,Z): the abelianization map is an
// isomorphism on outer classes, so a conjugator is assembled from a GL(2,Z)
// witness, a lift of each centralizer coset, and one twisted-conjugacy
// instance per coset that absorbs the leftover inner part.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "f3conj/automorphism.hpp"
#include "f3conj/gl2z.hpp"
#include "f3conj/twisted.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

inline M2 to_gl2z(const FreeMap& f) {
  if (f.rank() != 2) throw std::invalid_argument("rank-2 map expected");
  IMat a = f.abelianization();
  return {a[0][0], a[0][1], a[1][0], a[1][1]};
}

// Standard lifts of the elementary matrices; composing them in factor
// order matches the matrix product because abelianization is functorial.
inline FreeMap lift_gl2z(const M2& m) {
  const Word a({1}), b({2});
  auto lift_factor = [&](const M2& f) -> FreeMap {
    if (f == -M2::ident()) return FreeMap(2, {a.inverse(), b.inverse()});
    if (f == M2{1, 0, 0, -1}) return FreeMap(2, {a, b.inverse()});
    if (f == M2{0, 1, -1, 0}) return FreeMap(2, {b, a.inverse()});
    if (f == M2{0, -1, 1, 0}) return FreeMap(2, {b.inverse(), a});
    if (f.a == 1 && f.d == 1 && f.c == 0)
      return FreeMap(2, {a * pow(b, static_cast<int>(f.b)), b});
    if (f.a == 1 && f.d == 1 && f.b == 0)
      return FreeMap(2, {a, b * pow(a, static_cast<int>(f.c))});
    throw std::logic_error("unexpected elementary factor");
  };
  FreeMap out = FreeMap::identity(2);
  for (const M2& f : elementary_decomposition(m))
    out = compose(out, lift_factor(f));
  if (to_gl2z(out) != m) throw std::logic_error("lift does not abelianize back");
  return out;
}

// Lifted representatives of Centralizer(abel(phi)) / <abel(phi)>, each with
// the inner discrepancy word d: conjugating phi by the lift gives phi Ad(d).
struct CentralizerRep {
  FreeMap rho;
  Word d;
};

inline std::vector<CentralizerRep> abelian_centralizer_reps(const FreeMap& phi) {
  std::vector<CentralizerRep> out;
  for (const M2& r : centralizer_cosets(to_gl2z(phi))) {
    CentralizerRep rep{lift_gl2z(r), Word()};
    FreeMap delta = compose(inverse(phi), conjugate_map(phi, rep.rho));
    auto d = inner_word(delta);
    if (!d) throw std::logic_error("abelian-trivial map is not inner");
    rep.d = *d;
    out.push_back(std::move(rep));
  }
  return out;
}

struct AutConjugacy {
  Verdict verdict = Verdict::unknown;
  FreeMap witness = FreeMap::identity(2);  // yes: witness^-1 phi witness == psi
  std::string reason;
  // per-coset twisted obstructions when the no came from the coset scan
  std::vector<TwistedCertificate> certificates;
};

inline AutConjugacy aut_f2_conjugate(const FreeMap& phi, const FreeMap& psi,
                                     const SearchBudget& budget = {}) {
  if (phi.rank() != 2 || psi.rank() != 2)
    throw std::invalid_argument("rank-2 maps expected");
  AutConjugacy res;
  M2 m = to_gl2z(phi), n = to_gl2z(psi);
  Gl2Kind kind = classify_gl2(m);
  if (kind == Gl2Kind::central || kind == Gl2Kind::finite)
    throw FiniteOrderInput("finite-order abelianization is out of scope");
  auto accept = [&](const FreeMap& chi) {
    if (!(conjugate_map(phi, chi) == psi))
      throw std::logic_error("aut conjugacy witness verification failed");
    res.verdict = Verdict::yes;
    res.witness = chi;
    return res;
  };
  if (phi == psi) return accept(FreeMap::identity(2));

  Gl2Conjugacy g = gl2z_conjugate(m, n);
  if (!g.conjugate) {
    res.verdict = Verdict::no;
    res.reason = "abelianizations not conjugate in GL(2,Z): " + g.obstruction;
    return res;
  }
  FreeMap chi1 = lift_gl2z(g.witness);
  FreeMap phi_p = conjugate_map(phi, chi1);
  FreeMap delta = compose(inverse(phi_p), psi);
  auto g0 = inner_word(delta);
  if (!g0) throw std::logic_error("abelian-trivial map is not inner");

  bool saw_unknown = false;
  for (const CentralizerRep& rep : abelian_centralizer_reps(phi_p)) {
    TwistedResult t = twisted_conjugate(phi_p, *g0, rep.d, budget);
    if (t.verdict == Verdict::yes) {
      FreeMap tau = compose(rep.rho, FreeMap::inner(2, t.witness));
      return accept(compose(chi1, tau));
    }
    if (t.verdict == Verdict::unknown)
      saw_unknown = true;
    else
      res.certificates.push_back(t.certificate);
  }
  if (saw_unknown) {
    res.verdict = Verdict::unknown;
    res.reason = "twisted instances undecided within budget";
    res.certificates.clear();
    return res;
  }
  res.verdict = Verdict::no;
  res.reason = "every centralizer coset is obstructed";
  return res;
}

}  // namespace f3conj
