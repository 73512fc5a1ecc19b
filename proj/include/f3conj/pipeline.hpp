#pragma once

// Conjugacy decision pipeline for rank 3. Each input gets an invariant
// profile (certified growth, abelianization invariants, lamination carrier,
// peripheral bookkeeping), then the pair follows the branch both profiles
// dictate. A No always names a verified invariant separating the inputs; a
// Yes always carries a conjugator re-verified by the inner check; anything
// resting on a backend this library does not implement is an honest
// Unknown naming that backend.

#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "f3conj/automorphism.hpp"
#include "f3conj/intlin.hpp"
#include "f3conj/mapping_torus.hpp"
#include "f3conj/outf3k.hpp"
#include "f3conj/traintrack.hpp"
#include "f3conj/twisted.hpp"
#include "f3conj/whitehead.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

struct DecideBudget {
  SearchBudget twisted{};
  std::size_t rep_nodes = 6000;      // validated representative search
  std::size_t support_nodes = 20000; // factor and carrier searches
  std::size_t search_nodes = 1500;   // bounded conjugator fallback
  int search_depth = 3;

  DecideBudget scaled(double f) const {
    DecideBudget b;
    b.twisted = twisted.scaled(f);
    b.rep_nodes = std::max<std::size_t>(
        64, static_cast<std::size_t>(static_cast<double>(rep_nodes) * f));
    b.support_nodes = std::max<std::size_t>(
        64, static_cast<std::size_t>(static_cast<double>(support_nodes) * f));
    b.search_nodes = std::max<std::size_t>(
        16, static_cast<std::size_t>(static_cast<double>(search_nodes) * f));
    b.search_depth = std::max(1, static_cast<int>(std::lround(search_depth * f)));
    return b;
  }
};

// Monic characteristic polynomial, ascending coefficients, leading 1 last.
// Faddeev-LeVerrier; every division is exact over the integers.
inline std::vector<int64_t> char_poly(const IMat& a) {
  const int n = static_cast<int>(a.size());
  auto trace = [n](const IMat& m) {
    int64_t t = 0;
    for (int i = 0; i < n; ++i) t += m[i][i];
    return t;
  };
  std::vector<int64_t> cs(n + 1, 0);
  cs[n] = 1;
  IMat mk = a;
  for (int k = 1; k <= n; ++k) {
    int64_t ck = -trace(mk) / k;
    cs[n - k] = ck;
    if (k == n) break;
    IMat shifted = mk;
    for (int i = 0; i < n; ++i) shifted[i][i] += ck;
    mk = imat_mul(a, shifted);
  }
  return cs;
}

inline std::string poly_text(const std::vector<int64_t>& cs) {
  std::string s;
  for (int d = static_cast<int>(cs.size()) - 1; d >= 0; --d) {
    int64_t c = cs[d];
    if (c == 0) continue;
    if (!s.empty()) s += c > 0 ? " + " : " - ";
    else if (c < 0) s += "-";
    int64_t m = c > 0 ? c : -c;
    std::string term;
    if (m != 1 || d == 0) term += std::to_string(m);
    if (d >= 1) {
      if (m != 1) term += "*";
      term += "x";
      if (d >= 2) term += "^" + std::to_string(d);
    }
    s += term;
  }
  return s.empty() ? "0" : s;
}

inline std::vector<int64_t> snf_diagonal(const IMat& m) {
  Snf s = smith_normal_form(m);
  std::vector<int64_t> d;
  for (size_t i = 0; i < s.d.size(); ++i) d.push_back(s.d[i][i]);
  return d;
}

inline std::string vec_text(const std::vector<int64_t>& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

struct InvariantProfile {
  std::vector<int64_t> char_poly;     // of the abelianization
  std::vector<int64_t> snf_shift;     // Smith diagonal of (abelianization - I)
  bool has_growth = false;
  GrowthType growth_type = GrowthType::polynomial;
  int growth_degree = -1;             // polynomial classes only
  int rep_power = 1;                  // power that admitted a validated rose
  std::string growth_provenance;
  std::optional<InvariantFactor> factor;  // quadratic classes
  int carrier_rank = 0;               // exponential: 2 or 3 when certified
  std::vector<Word> carrier_basis;    // rank 2: basis in input coordinates
  Word carrier_witness;               // (carrier) phi ^ witness <= carrier
  FreeMap carrier_align;              // maps the carrier onto <a,b> exactly
  std::string carrier_provenance;
  bool peripherals_populated = false;
  PeripheralProfile peripherals;      // advisory: polynomial-subsystem loops
  std::string notes;
};

inline std::string growth_text(const InvariantProfile& p) {
  if (!p.has_growth) return "unknown";
  if (p.growth_type == GrowthType::exponential) return "exponential";
  return "polynomial degree " + std::to_string(p.growth_degree);
}

inline InvariantProfile profile(const FreeMap& phi,
                                const DecideBudget& budget = {}) {
  if (phi.rank() != 3) throw std::invalid_argument("rank-3 map expected");
  InvariantProfile p;
  IMat ab = phi.abelianization();
  p.char_poly = char_poly(ab);
  p.snf_shift = snf_diagonal(imat_sub(ab, imat_identity(3)));

  auto rep = find_validated_representative(phi, budget.rep_nodes);
  if (!rep) {
    p.notes = "no validated rose representative within budget";
    return p;
  }
  p.has_growth = true;
  p.growth_type = rep->growth.type;
  p.rep_power = rep->power;
  p.growth_provenance =
      "validated rose representative of power " + std::to_string(rep->power);

  if (p.growth_type == GrowthType::polynomial) {
    p.growth_degree = rep->growth.degree;
    if (p.growth_degree == 2)
      p.factor = invariant_rank2_factor(phi, budget.support_nodes);
    return p;
  }

  FreeMap back = inverse(rep->chi);
  if (rep->rtt.strata.eg_count == 1) {
    LaminationSupport ls =
        lamination_support(rep->gm, rep->rtt);
    if (ls.stabilized && ls.rank == 3) {
      p.carrier_rank = 3;
      p.carrier_provenance = "lamination support saturated the whole group";
    } else if (ls.stabilized && ls.rank == 2) {
      std::vector<Word> basis;
      for (const Word& w : ls.carrier.basis()) basis.push_back(back.apply(w));
      SubgroupGraph k(3, basis);
      SubgroupGraph image(3, {phi.apply(basis[0]), phi.apply(basis[1])});
      if (auto g = image.conjugate_into(k)) {
        // Rank-2 free factor landing in a rank-2 free factor is onto it.
        p.carrier_rank = 2;
        p.carrier_basis = basis;
        p.carrier_witness = *g;
        p.carrier_align = compose(rep->chi, ls.to_standard);
        p.carrier_provenance =
            "stabilized lamination support, invariance re-verified";
      } else {
        p.notes = "carrier candidate failed the invariance re-check";
      }
    } else {
      p.notes = "lamination support did not stabilize within budget";
    }
  }

  // Loops of the polynomially growing edges, pulled back to the input's
  // coordinates; classification is advisory (candidates, not a census).
  std::vector<std::vector<Word>> cands;
  for (int e = 1; e <= 3; ++e)
    if (rep->growth.edge_degree[e] >= 0)
      cands.push_back({back.apply(Word::gen(e))});
  p.peripherals = classify_peripherals(phi, cands, 12);
  p.peripherals_populated = true;
  return p;
}

struct DecideResult {
  Verdict verdict = Verdict::unknown;
  FreeMap witness = FreeMap::identity(3);  // yes: conjugate_map(phi, witness) ~ psi
  std::string invariant;                   // no: the separating invariant
  std::string left_value, right_value;
  std::string unknown_reason;              // unknown: the missing backend
  std::string branch;
  std::vector<std::string> transcript;
  InvariantProfile left, right;
};

// Breadth-first over Whitehead move compositions, both orientations tried.
// Returns chi with conjugate_map(phi, chi) inner-equal to psi.
inline std::optional<FreeMap> bounded_conjugator_search(
    const FreeMap& phi, const FreeMap& psi, int depth, std::size_t nodes) {
  auto matches = [&](const FreeMap& c) -> std::optional<FreeMap> {
    if (is_inner(compose(inverse(conjugate_map(phi, c)), psi))) return c;
    FreeMap ci = inverse(c);
    if (is_inner(compose(inverse(conjugate_map(phi, ci)), psi))) return ci;
    return std::nullopt;
  };
  const std::vector<FreeMap> moves = whitehead::all_moves(phi.rank());
  std::set<std::string> seen;
  std::deque<std::pair<FreeMap, int>> queue;
  FreeMap id = FreeMap::identity(phi.rank());
  seen.insert(to_string(id));
  queue.emplace_back(id, 0);
  while (!queue.empty()) {
    auto [c, d] = queue.front();
    queue.pop_front();
    if (auto w = matches(c)) return w;
    if (d >= depth || seen.size() >= nodes) continue;
    for (const FreeMap& m : moves) {
      FreeMap next = compose(c, m);
      if (next.total_image_length() > 30) continue;
      if (!seen.insert(to_string(next)).second) continue;
      queue.emplace_back(next, d + 1);
      if (seen.size() >= nodes) break;
    }
  }
  return std::nullopt;
}

namespace pipeline_detail {

inline DecideResult no_verdict(DecideResult r, const std::string& invariant,
                               const std::string& lv, const std::string& rv) {
  r.verdict = Verdict::no;
  r.invariant = invariant;
  r.left_value = lv;
  r.right_value = rv;
  r.transcript.push_back("verdict: no; " + invariant + " separates (" + lv +
                         " vs " + rv + ")");
  return r;
}

inline DecideResult unknown_verdict(DecideResult r, const std::string& why) {
  r.verdict = Verdict::unknown;
  r.unknown_reason = why;
  r.transcript.push_back("verdict: unknown; " + why);
  return r;
}

inline DecideResult yes_verdict(DecideResult r, const FreeMap& phi,
                                const FreeMap& psi, const FreeMap& chi) {
  if (!is_inner(compose(inverse(conjugate_map(phi, chi)), psi)))
    throw std::logic_error("conjugator failed the inner re-verification");
  r.verdict = Verdict::yes;
  r.witness = chi;
  r.transcript.push_back("verdict: yes; witness re-verified by inner check");
  return r;
}

// Shared tail for the two reducible branches: rho_l and rho_r conjugate
// each side into the <a,b>-preserving subgroup, where triples decide.
inline DecideResult f3k_tail(DecideResult r, const FreeMap& phi,
                             const FreeMap& psi, const FreeMap& rho_l,
                             const FreeMap& rho_r, const DecideBudget& budget,
                             const std::string& uniqueness_note) {
  FreeMap lp = conjugate_map(phi, rho_l);
  FreeMap rp = conjugate_map(psi, rho_r);
  try {
    OutF3KTriple tl = to_triple(lp);
    OutF3KTriple tr = to_triple(rp);
    r.transcript.push_back("aligned both maps to preserve <a,b>; deciding "
                           "relative conjugacy");
    F3KResult res = decide_conjugacy_f3k(tl, tr, budget.twisted);
    if (res.verdict == Verdict::yes) {
      FreeMap chi =
          compose(compose(rho_l, from_triple(res.witness)), inverse(rho_r));
      return yes_verdict(std::move(r), phi, psi, chi);
    }
    if (res.verdict == Verdict::no) {
      r.transcript.push_back("certificate: " + res.reason);
      r.transcript.push_back(uniqueness_note);
      auto triple_text = [](const OutF3KTriple& t) {
        return "eps=" + std::to_string(t.eps) + ", chi0=(" +
               to_string(t.chi0) + "), g=" + to_string(t.g);
      };
      return no_verdict(std::move(r),
                        "relative conjugacy class over the invariant factor",
                        triple_text(tl), triple_text(tr));
    }
    return unknown_verdict(std::move(r),
                           "relative decision exhausted its budget: " +
                               res.reason);
  } catch (const NotKInvariant& e) {
    return unknown_verdict(std::move(r),
                           std::string("factor alignment failed: ") +
                               e.what());
  } catch (const FiniteOrderRestriction& e) {
    return unknown_verdict(std::move(r),
                           std::string("restriction has finite order: ") +
                               e.what());
  } catch (const NotInvertible& e) {
    return unknown_verdict(std::move(r),
                           std::string("factor alignment failed: ") +
                               e.what());
  }
}

inline std::string peripheral_text(const PeripheralProfile& p) {
  int torus = 0, klein = 0, other = 0;
  for (const PeripheralEntry& e : p.entries) {
    if (e.kind == PeripheralKind::torus) ++torus;
    else if (e.kind == PeripheralKind::klein) ++klein;
    else ++other;
  }
  return std::to_string(torus) + " torus / " + std::to_string(klein) +
         " klein / " + std::to_string(other) + " unresolved";
}

}  // namespace pipeline_detail

inline DecideResult decide(const FreeMap& phi, const FreeMap& psi,
                           const DecideBudget& budget = {}) {
  using namespace pipeline_detail;
  if (phi.rank() != 3 || psi.rank() != 3)
    throw std::invalid_argument("rank-3 maps expected");
  if (!is_automorphism(phi) || !is_automorphism(psi))
    throw std::invalid_argument("inputs must be automorphisms");

  DecideResult r;
  if (is_inner(compose(inverse(phi), psi))) {
    r.branch = "identical outer class";
    r.transcript.push_back("inputs agree up to an inner map");
    return yes_verdict(std::move(r), phi, psi, FreeMap::identity(3));
  }

  r.left = profile(phi, budget);
  r.right = profile(psi, budget);
  r.transcript.push_back("left growth: " + growth_text(r.left));
  r.transcript.push_back("right growth: " + growth_text(r.right));

  // Values rendered from r are hoisted before each move of r below: argument
  // evaluation may construct the moved parameter before its siblings run.
  if (r.left.has_growth && r.right.has_growth) {
    const std::string lv = growth_text(r.left), rv = growth_text(r.right);
    if (r.left.growth_type != r.right.growth_type) {
      r.branch = "growth comparison";
      return no_verdict(std::move(r), "growth type", lv, rv);
    }
    if (r.left.growth_type == GrowthType::polynomial &&
        r.left.growth_degree != r.right.growth_degree) {
      r.branch = "growth comparison";
      return no_verdict(std::move(r), "polynomial growth degree", lv, rv);
    }
  }

  if (r.left.char_poly != r.right.char_poly) {
    r.branch = "abelianization comparison";
    const std::string lv = poly_text(r.left.char_poly);
    const std::string rv = poly_text(r.right.char_poly);
    return no_verdict(std::move(r), "abelianization characteristic polynomial",
                      lv, rv);
  }
  if (r.left.snf_shift != r.right.snf_shift) {
    r.branch = "abelianization comparison";
    const std::string lv = vec_text(r.left.snf_shift);
    const std::string rv = vec_text(r.right.snf_shift);
    return no_verdict(std::move(r),
                      "Smith form of (abelianization - identity)", lv, rv);
  }

  if (!r.left.has_growth || !r.right.has_growth) {
    r.branch = "growth certification";
    return unknown_verdict(std::move(r),
                           "no validated rose representative within budget");
  }

  if (r.left.growth_type == GrowthType::polynomial) {
    if (r.left.growth_degree == 2) {
      r.branch = "quadratic";
      r.transcript.push_back("both quadratic: aligning invariant rank-2 "
                             "factors");
      if (!r.left.factor || !r.right.factor)
        return unknown_verdict(std::move(r),
                               "quadratic normal form search exhausted "
                               "without an invariant factor");
      // form.chi sends the factor onto <a,b>: the factor is chi^-1<a,b>.
      const FreeMap rho_l = r.left.factor->form.chi;
      const FreeMap rho_r = r.right.factor->form.chi;
      return f3k_tail(std::move(r), phi, psi, rho_l, rho_r, budget,
                      "the invariant factor of a quadratic class is unique "
                      "up to conjugacy, so the relative verdict is absolute");
    }
    r.branch = "subquadratic";
    r.transcript.push_back(
        "both polynomial of degree at most 1: bounded conjugator search");
    if (auto chi = bounded_conjugator_search(phi, psi, budget.search_depth,
                                             budget.search_nodes))
      return yes_verdict(std::move(r), phi, psi, *chi);
    return unknown_verdict(std::move(r),
                           "exact conjugacy for growth degree 0 or 1 "
                           "(unipotent normal forms) is not implemented");
  }

  if (r.left.carrier_rank == 2 && r.right.carrier_rank == 2) {
    r.branch = "exponential, rank-2 carrier";
    r.transcript.push_back("both carriers have rank 2: aligning to <a,b>");
    const FreeMap rho_l = r.left.carrier_align;
    const FreeMap rho_r = r.right.carrier_align;
    return f3k_tail(std::move(r), phi, psi, rho_l, rho_r, budget,
                    "the carrier of the attracting lamination is unique up "
                    "to conjugacy, so the relative verdict is absolute");
  }

  r.branch = "exponential, full support";
  if (r.left.peripherals_populated && r.right.peripherals_populated)
    r.transcript.push_back(
        "peripheral candidates (advisory): left " +
        peripheral_text(r.left.peripherals) + ", right " +
        peripheral_text(r.right.peripherals));
  if (auto chi = bounded_conjugator_search(phi, psi, budget.search_depth,
                                           budget.search_nodes))
    return yes_verdict(std::move(r), phi, psi, *chi);
  if (r.left.carrier_rank != r.right.carrier_rank &&
      r.left.carrier_rank != 0 && r.right.carrier_rank != 0)
    return unknown_verdict(
        std::move(r),
        "carrier ranks 2 and 3 suggest non-conjugacy, but certifying the "
        "full-support side needs the irreducibility test, which is not "
        "implemented");
  return unknown_verdict(std::move(r),
                         "conjugacy of irreducible or almost-toral "
                         "exponential classes needs the train-track and "
                         "relatively-hyperbolic backends, which are not "
                         "implemented");
}

}  // namespace f3conj
