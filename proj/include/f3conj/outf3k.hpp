#pragma once

// Out(F_3, K) for the rank-2 free factor K = <a,b>: every outer class has a
// unique representative acting on K as an automorphism chi0 and sending c to
// g c^eps with g in K, so the group is a calculus of triples (eps, chi0, g).
// Conjugacy between triples whose restrictions have infinite order in
// Out(F_2) reduces to finitely many twisted-conjugacy instances, one or two
// per centralizer coset of the restriction.

#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "f3conj/autf2.hpp"
#include "f3conj/subgroup_graph.hpp"

namespace f3conj {

struct NotKInvariant : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FiniteOrderRestriction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutF3KTriple {
  int eps = 1;
  FreeMap chi0 = FreeMap::identity(2);
  Word g;

  bool operator==(const OutF3KTriple& o) const {
    return eps == o.eps && chi0 == o.chi0 && g == o.g;
  }
  bool operator!=(const OutF3KTriple& o) const { return !(*this == o); }
};

inline OutF3KTriple identity_triple() { return {}; }

// The order-two lift (a, b, c^-1); conjugating by it absorbs the sign of a
// general conjugator, so conjugacy searches only sweep eps = +1 conjugators.
inline OutF3KTriple iota_triple() { return {-1, FreeMap::identity(2), Word()}; }

inline FreeMap from_triple(const OutF3KTriple& t) {
  Word c = t.g * (t.eps == 1 ? Word::gen(3) : Word::gen(3).inverse());
  return FreeMap(3, {t.chi0.image(1), t.chi0.image(2), c});
}

// Normal form of an automorphism whose <a,b>-image is conjugate to <a,b>:
// shift by the folding stem so K maps to itself, then by the tail of the
// c-image so c lands in K c^eps. The result depends only on the outer class.
inline OutF3KTriple to_triple(const FreeMap& f) {
  if (f.rank() != 3) throw std::invalid_argument("rank-3 map expected");
  SubgroupGraph image(3, {f.image(1), f.image(2)});
  SubgroupGraph k(3, {Word::gen(1), Word::gen(2)});
  auto stem = image.conjugate_into(k);
  if (!stem) throw NotKInvariant("<a,b> image does not conjugate into <a,b>");
  SubgroupGraph back(3, {conj(f.image(1), *stem), conj(f.image(2), *stem)});
  if (!back.contains(Word::gen(1)) || !back.contains(Word::gen(2)))
    throw NotKInvariant("<a,b> image conjugates into a proper subgroup");
  FreeMap f1 = compose(f, FreeMap::inner(3, *stem));

  const std::vector<Letter>& cs = f1.image(3).letters();
  int pos = -1, eps = 0;
  for (size_t i = 0; i < cs.size(); ++i) {
    if (std::abs(cs[i]) != 3) continue;
    if (pos >= 0) throw NotKInvariant("c image has several c syllables");
    pos = static_cast<int>(i);
    eps = cs[i] > 0 ? 1 : -1;
  }
  if (pos < 0) throw NotKInvariant("c image has no c syllable");
  Word u(std::vector<Letter>(cs.begin(), cs.begin() + pos));
  Word v(std::vector<Letter>(cs.begin() + pos + 1, cs.end()));

  FreeMap f2 = compose(f1, FreeMap::inner(3, v.inverse()));
  OutF3KTriple t;
  t.eps = eps;
  t.chi0 = FreeMap(2, {f2.image(1), f2.image(2)});
  t.g = v * u;
  if (!is_automorphism(t.chi0))
    throw NotInvertible("restriction to <a,b> is not invertible");
  return t;
}

inline OutF3KTriple compose_triples(const OutF3KTriple& t1,
                                    const OutF3KTriple& t2) {
  OutF3KTriple r;
  if (t1.eps == 1) {
    r.eps = t2.eps;
    r.chi0 = compose(t1.chi0, t2.chi0);
    r.g = t2.chi0.apply(t1.g) * t2.g;
  } else {
    // c -> (u t2) c^-eps2 g2^-1; renormalizing by Ad(g2) restores the form.
    r.eps = -t2.eps;
    r.chi0 = compose(compose(t1.chi0, t2.chi0), FreeMap::inner(2, t2.g));
    r.g = t2.g.inverse() * t2.chi0.apply(t1.g);
  }
  return r;
}

inline OutF3KTriple invert_triple(const OutF3KTriple& t) {
  OutF3KTriple r;
  FreeMap inv = inverse(t.chi0);
  if (t.eps == 1) {
    r.eps = 1;
    r.chi0 = inv;
    r.g = inv.apply(t.g.inverse());
  } else {
    Word v = inv.apply(t.g);
    r.eps = -1;
    r.chi0 = compose(inv, FreeMap::inner(2, v.inverse()));
    r.g = v;
  }
  return r;
}

inline OutF3KTriple conjugate_triple(const OutF3KTriple& phi,
                                     const OutF3KTriple& chi) {
  return compose_triples(compose_triples(invert_triple(chi), phi), chi);
}

struct F3KCertificate {
  std::string kind;   // epsilon-mismatch | outer-class-mismatch | twisted-no
  std::string where;  // conjugator family and coset that was ruled out
  TwistedCertificate twisted;  // machine-checkable core for twisted-no
};

struct F3KResult {
  Verdict verdict = Verdict::unknown;
  OutF3KTriple witness;  // yes: conjugate_triple(phi, witness) == psi
  std::vector<F3KCertificate> certificates;
  std::string reason;
};

namespace f3k_detail {

// chi, e with phi0^chi = psi0 Ad(e), or nullopt when the outer classes of
// phi0 and psi0 already differ in GL(2,Z).
inline std::optional<std::pair<FreeMap, Word>> align_outer(
    const FreeMap& phi0, const FreeMap& psi0, std::string* obstruction) {
  M2 mp = to_gl2z(phi0), mq = to_gl2z(psi0);
  FreeMap chi = FreeMap::identity(2);
  if (mp != mq) {
    Gl2Conjugacy g = gl2z_conjugate(mp, mq);
    if (!g.conjugate) {
      *obstruction = g.obstruction;
      return std::nullopt;
    }
    chi = lift_gl2z(g.witness);
  }
  FreeMap delta = compose(inverse(psi0), conjugate_map(phi0, chi));
  auto e = inner_word(delta);
  if (!e) throw std::logic_error("abelian-trivial discrepancy is not inner");
  return std::make_pair(chi, *e);
}

// Conjugators (1, chi0, h) with chi0 centralizing the common restriction:
// one twisted instance per liftable centralizer coset.
inline F3KResult case_plus(const OutF3KTriple& phi, const OutF3KTriple& psi,
                           const SearchBudget& budget) {
  F3KResult out;
  AutConjugacy a = aut_f2_conjugate(phi.chi0, psi.chi0, budget);
  if (a.verdict == Verdict::no) {
    out.verdict = Verdict::no;
    if (a.certificates.empty()) {
      out.certificates.push_back(
          {"outer-class-mismatch", "restrictions: " + a.reason, {}});
    } else {
      int c = 0;
      for (const TwistedCertificate& cert : a.certificates)
        out.certificates.push_back(
            {"twisted-no", "restriction coset " + std::to_string(c++), cert});
    }
    return out;
  }
  if (a.verdict == Verdict::unknown) {
    out.reason = "restriction conjugacy undecided: " + a.reason;
    return out;
  }
  OutF3KTriple d1{1, a.witness, Word()};
  OutF3KTriple phi1 = conjugate_triple(phi, d1);
  if (phi1.chi0 != psi.chi0)
    throw std::logic_error("restriction alignment failed");

  const FreeMap& p0 = psi.chi0;
  bool saw_unknown = false;
  int coset = 0;
  for (const CentralizerRep& rep : abelian_centralizer_reps(p0)) {
    std::string tag = "coset " + std::to_string(coset++);
    // The coset contains honest centralizer elements iff d ~ 1 twisted.
    TwistedResult lift = twisted_conjugate(p0, Word(), rep.d, budget);
    if (lift.verdict == Verdict::unknown) {
      saw_unknown = true;
      continue;
    }
    if (lift.verdict == Verdict::no) {
      out.certificates.push_back(
          {"twisted-no", tag + " lift", lift.certificate});
      continue;
    }
    FreeMap rho = compose(rep.rho, FreeMap::inner(2, lift.witness));
    if (!(conjugate_map(p0, rho) == p0))
      throw std::logic_error("centralizer lift verification failed");
    TwistedResult t = twisted_conjugate(p0, rho.apply(phi1.g), psi.g, budget);
    if (t.verdict == Verdict::yes) {
      OutF3KTriple chi =
          compose_triples(d1, OutF3KTriple{1, rho, t.witness.inverse()});
      if (conjugate_triple(phi, chi) != psi)
        throw std::logic_error("triple witness verification failed");
      out.verdict = Verdict::yes;
      out.witness = chi;
      return out;
    }
    if (t.verdict == Verdict::unknown)
      saw_unknown = true;
    else
      out.certificates.push_back({"twisted-no", tag, t.certificate});
  }
  out.verdict = saw_unknown ? Verdict::unknown : Verdict::no;
  if (saw_unknown) out.reason = "twisted instances undecided within budget";
  return out;
}

// Conjugators (1, chi0, h) against eps = -1 triples: chi0 normalizes the
// restriction up to inner, h is pinned by the second entry, and the third
// entry gives two twisted instances against the squared restriction.
inline F3KResult case_minus(const OutF3KTriple& phi, const OutF3KTriple& psi,
                            const SearchBudget& budget) {
  F3KResult out;
  std::string obstruction;
  auto al = align_outer(phi.chi0, psi.chi0, &obstruction);
  if (!al) {
    out.verdict = Verdict::no;
    out.certificates.push_back(
        {"outer-class-mismatch", "restrictions: " + obstruction, {}});
    return out;
  }
  OutF3KTriple d1{1, al->first, al->second.inverse()};
  OutF3KTriple phi1 = conjugate_triple(phi, d1);
  if (phi1.chi0 != psi.chi0)
    throw std::logic_error("restriction alignment failed");

  const FreeMap& p0 = psi.chi0;
  FreeMap p0sq = compose(p0, p0);
  bool saw_unknown = false;
  int coset = 0;
  for (const CentralizerRep& rep : abelian_centralizer_reps(p0)) {
    std::string tag = "coset " + std::to_string(coset++);
    OutF3KTriple dj{1, rep.rho, Word()};
    Word uj = rep.rho.apply(phi1.g);
    Word base = p0.apply(rep.d) * rep.d * uj;
    for (int dexp = 0; dexp < 2; ++dexp) {
      Word lhs = dexp ? p0.apply(base) : base;
      TwistedResult t = twisted_conjugate(p0sq, lhs, psi.g, budget);
      if (t.verdict == Verdict::yes) {
        Word x = t.witness.inverse();
        Word dk = dexp ? p0.apply(rep.d) : rep.d;
        Word h = x.inverse() * dk.inverse() * p0.apply(x);
        FreeMap c0 = compose(pow(p0, dexp), FreeMap::inner(2, x));
        OutF3KTriple chi = compose_triples(compose_triples(d1, dj),
                                           OutF3KTriple{1, c0, h});
        if (conjugate_triple(phi, chi) != psi)
          throw std::logic_error("triple witness verification failed");
        out.verdict = Verdict::yes;
        out.witness = chi;
        return out;
      }
      if (t.verdict == Verdict::unknown) {
        saw_unknown = true;
      } else {
        out.certificates.push_back(
            {"twisted-no", tag + " power " + std::to_string(dexp),
             t.certificate});
      }
    }
  }
  out.verdict = saw_unknown ? Verdict::unknown : Verdict::no;
  if (saw_unknown) out.reason = "twisted instances undecided within budget";
  return out;
}

}  // namespace f3k_detail

namespace f3k_detail {

inline F3KResult decide_swept(const OutF3KTriple& phi, const OutF3KTriple& psi,
                              const SearchBudget& budget) {
  F3KResult out;
  bool saw_unknown = false;
  for (int branch = 0; branch < 2; ++branch) {
    OutF3KTriple base =
        branch ? conjugate_triple(phi, iota_triple()) : phi;
    F3KResult r = phi.eps == 1 ? case_plus(base, psi, budget)
                               : case_minus(base, psi, budget);
    if (r.verdict == Verdict::yes) {
      OutF3KTriple chi =
          branch ? compose_triples(iota_triple(), r.witness) : r.witness;
      if (conjugate_triple(phi, chi) != psi)
        throw std::logic_error("triple witness verification failed");
      out.verdict = Verdict::yes;
      out.witness = chi;
      return out;
    }
    std::string side = branch ? "eps3=-1: " : "eps3=+1: ";
    for (F3KCertificate& c : r.certificates) {
      c.where = side + c.where;
      out.certificates.push_back(std::move(c));
    }
    if (r.verdict == Verdict::unknown) {
      saw_unknown = true;
      if (!r.reason.empty()) out.reason = side + r.reason;
    }
  }
  out.verdict = saw_unknown ? Verdict::unknown : Verdict::no;
  return out;
}

}  // namespace f3k_detail

inline F3KResult decide_conjugacy_f3k(const OutF3KTriple& phi,
                                      const OutF3KTriple& psi,
                                      const SearchBudget& budget = {}) {
  auto infinite_order = [](const FreeMap& m) {
    Gl2Kind k = classify_gl2(to_gl2z(m));
    return k == Gl2Kind::parabolic || k == Gl2Kind::hyperbolic;
  };
  if (!infinite_order(phi.chi0) || !infinite_order(psi.chi0))
    throw FiniteOrderRestriction(
        "restrictions to <a,b> must have infinite order in Out(F_2)");

  if (phi.eps != psi.eps) {
    F3KResult out;
    out.verdict = Verdict::no;
    out.certificates.push_back(
        {"epsilon-mismatch", "conjugation preserves the sign on c", {}});
    return out;
  }

  // The search aligns everything to the second triple, so orient it toward
  // the smaller one and invert the witness when the roles were swapped.
  auto size_of = [](const OutF3KTriple& t) {
    return t.g.size() + t.chi0.image(1).size() + t.chi0.image(2).size();
  };
  bool swapped = size_of(psi) > size_of(phi);
  F3KResult out = swapped ? f3k_detail::decide_swept(psi, phi, budget)
                          : f3k_detail::decide_swept(phi, psi, budget);
  if (out.verdict == Verdict::yes && swapped) {
    out.witness = invert_triple(out.witness);
    if (conjugate_triple(phi, out.witness) != psi)
      throw std::logic_error("triple witness verification failed");
  }
  return out;
}

}  // namespace f3conj
