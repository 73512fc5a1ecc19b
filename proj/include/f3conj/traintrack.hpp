#pragma once

// Filtered strata analysis of graph self maps and the growth invariants
// built on it. Strata are the strongly connected components of the edge
// transition digraph, listed so images only descend; a stratum is
// exponential exactly when its transition matrix is irreducible and not a
// permutation (an irreducible nonnegative integer matrix has spectral
// radius 1 only when it is a single cycle). Validation additionally closes
// the taken turns under the direction map: a degenerate-free closure means
// no iterate of any edge image ever cancels, so transition counts are true
// lengths and the polynomial degree recursion is exact, not an estimate.

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "f3conj/automorphism.hpp"
#include "f3conj/graph_map.hpp"
#include "f3conj/intlin.hpp"
#include "f3conj/subgroup_graph.hpp"
#include "f3conj/whitehead.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

enum class StratumKind { zero, neg, eg };

struct Stratum {
  std::vector<int> edges;  // positive edge ids
  StratumKind kind = StratumKind::zero;
  IMat matrix;  // unsigned transition counts within the stratum
};

struct StrataReport {
  std::vector<Stratum> strata;  // filtration order, images never ascend
  std::vector<int> stratum_of;  // edge id -> stratum index
  int eg_count = 0;
};

namespace traintrack_detail {

// Tarjan over positive edges; completion order puts a component after
// everything its images reach, which is exactly the filtration order.
struct Scc {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> index, low, comp;
  std::vector<int> stack;
  std::vector<bool> on;
  int next = 0, ncomp = 0;

  explicit Scc(const std::vector<std::vector<int>>& a)
      : adj(a), index(a.size(), -1), low(a.size(), 0), comp(a.size(), -1),
        on(a.size(), false) {
    for (size_t v = 0; v < a.size(); ++v)
      if (index[v] < 0) dfs(static_cast<int>(v));
  }

  void dfs(int v) {
    index[v] = low[v] = next++;
    stack.push_back(v);
    on[v] = true;
    for (int w : adj[v]) {
      if (index[w] < 0) {
        dfs(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      while (true) {
        int w = stack.back();
        stack.pop_back();
        on[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  }
};

}  // namespace traintrack_detail

inline StrataReport analyze_strata(const GraphMap& gm) {
  const int ne = gm.graph().edge_count();
  std::vector<std::vector<int>> adj(ne);
  for (int e = 1; e <= ne; ++e) {
    std::set<int> deps;
    for (EdgeRef x : gm.edge_image(e)) deps.insert(std::abs(x) - 1);
    adj[e - 1].assign(deps.begin(), deps.end());
  }
  traintrack_detail::Scc scc(adj);
  StrataReport r;
  r.strata.resize(scc.ncomp);
  r.stratum_of.assign(ne + 1, -1);
  for (int e = 1; e <= ne; ++e) {
    r.stratum_of[e] = scc.comp[e - 1];
    r.strata[scc.comp[e - 1]].edges.push_back(e);
  }
  for (int s = 0; s < scc.ncomp; ++s) {
    Stratum& st = r.strata[s];
    const int k = static_cast<int>(st.edges.size());
    st.matrix.assign(k, IVec(k, 0));
    for (int i = 0; i < k; ++i)
      for (EdgeRef x : gm.edge_image(st.edges[i]))
        for (int j = 0; j < k; ++j)
          if (std::abs(x) == st.edges[j]) st.matrix[i][j]++;
    bool zero = true, branching = false;
    for (int i = 0; i < k; ++i) {
      int64_t row = 0;
      for (int j = 0; j < k; ++j) row += st.matrix[i][j];
      if (row > 0) zero = false;
      if (row > 1) branching = true;
    }
    st.kind = zero ? StratumKind::zero
                   : (branching ? StratumKind::eg : StratumKind::neg);
    if (st.kind == StratumKind::eg) r.eg_count++;
  }
  // Filtration sanity: every image edge sits in the same or a lower stratum.
  for (int e = 1; e <= ne; ++e)
    for (EdgeRef x : gm.edge_image(e))
      if (r.stratum_of[std::abs(x)] > r.stratum_of[e])
        throw std::logic_error("stratum order violates the filtration");
  return r;
}

inline bool check_one_eg(const GraphMap& gm) {
  return analyze_strata(gm).eg_count <= 1;
}

// Turn bookkeeping. A direction is a signed edge; a turn is an unordered
// pair of directions based at one vertex, degenerate when equal. The
// direction map sends d to the first edge of its image path.
struct RttReport {
  bool valid = false;
  StrataReport strata;
  std::vector<EdgePath> neg_suffix;  // per edge: u with f(E) = E.u, neg strata only
  std::vector<std::string> failures;
};

inline RttReport validate_rtt(const GraphMap& gm) {
  RttReport rep;
  rep.strata = analyze_strata(gm);
  const int ne = gm.graph().edge_count();
  rep.neg_suffix.assign(ne + 1, {});
  for (int e = 1; e <= ne; ++e)
    if (gm.edge_image(e).empty())
      rep.failures.push_back("edge " + std::to_string(e) + " is collapsed");
  if (!rep.failures.empty()) return rep;

  auto first_dir = [&](EdgeRef d) { return gm.image_of(d).front(); };

  for (const Stratum& st : rep.strata.strata) {
    if (st.kind == StratumKind::neg) {
      // Single edge in the form f(E) = E.u with u strictly lower.
      for (int e : st.edges) {
        const EdgePath& p = gm.edge_image(e);
        bool ok = p.front() == e;
        for (size_t i = 1; ok && i < p.size(); ++i)
          ok = rep.strata.stratum_of[std::abs(p[i])] < rep.strata.stratum_of[e];
        if (st.edges.size() > 1 || !ok) {
          rep.failures.push_back("edge " + std::to_string(e) +
                                 " misses the E.u form");
        } else {
          rep.neg_suffix[e] = EdgePath(p.begin() + 1, p.end());
        }
      }
    } else if (st.kind == StratumKind::eg) {
      for (int e : st.edges)
        for (EdgeRef d : {e, -e})
          if (rep.strata.stratum_of[std::abs(first_dir(d))] !=
              rep.strata.stratum_of[e])
            rep.failures.push_back("direction " + std::to_string(d) +
                                   " exits its exponential stratum");
    }
  }

  // Seed: turns crossed by edge images plus each edge's own wrap turn, then
  // close under the direction map. Wrap turns of all iterates are covered
  // because wrap(f^k(E)) is the (k-1)-st image of wrap(f(E)).
  auto turn_of = [](EdgeRef a, EdgeRef b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  };
  std::set<std::pair<EdgeRef, EdgeRef>> turns;
  std::deque<std::pair<EdgeRef, EdgeRef>> work;
  auto add = [&](EdgeRef a, EdgeRef b) {
    auto t = turn_of(a, b);
    if (turns.insert(t).second) work.push_back(t);
  };
  for (int e = 1; e <= ne; ++e) {
    const EdgePath& p = gm.edge_image(e);
    for (size_t i = 0; i + 1 < p.size(); ++i) add(-p[i], p[i + 1]);
    add(-e, e);
  }
  while (!work.empty()) {
    auto [a, b] = work.front();
    work.pop_front();
    EdgeRef fa = first_dir(a), fb = first_dir(b);
    if (fa == fb) {
      rep.failures.push_back("turn (" + std::to_string(a) + "," +
                             std::to_string(b) + ") degenerates under iteration");
      break;
    }
    add(fa, fb);
  }

  rep.valid = rep.failures.empty();
  return rep;
}

enum class GrowthType { polynomial, exponential };

struct GrowthReport {
  GrowthType type = GrowthType::polynomial;
  int degree = 0;                // max finite edge degree, polynomial maps
  std::vector<int> edge_degree;  // per edge, -1 once exponential strata enter
  int witness_stratum = -1;      // an exponential stratum when type says so
};

// Exact degrees for validated maps: no iterate ever cancels, so the length
// of f^k(E) telescopes and deg(E.u) = 1 + max over u, while an edge mapped
// entirely lower inherits the max of its image. A map whose outer class is
// trivial is growth 0 regardless of its representative.
inline GrowthReport growth_degrees(const GraphMap& gm, const RttReport& rtt) {
  if (!rtt.valid)
    throw std::invalid_argument("growth degrees need a validated map");
  const int ne = gm.graph().edge_count();
  GrowthReport g;
  g.edge_degree.assign(ne + 1, 0);
  for (size_t s = 0; s < rtt.strata.strata.size(); ++s) {
    const Stratum& st = rtt.strata.strata[s];
    for (int e : st.edges) {
      if (st.kind == StratumKind::eg) {
        g.edge_degree[e] = -1;
        g.type = GrowthType::exponential;
        g.witness_stratum = static_cast<int>(s);
        continue;
      }
      const EdgePath rest = st.kind == StratumKind::neg
                                ? rtt.neg_suffix[e]
                                : gm.edge_image(e);
      int d = 0;
      bool exp = false;
      for (EdgeRef x : rest) {
        int dd = g.edge_degree[std::abs(x)];
        if (dd < 0) exp = true;
        d = std::max(d, dd);
      }
      if (exp) {
        g.edge_degree[e] = -1;
        g.type = GrowthType::exponential;
      } else {
        g.edge_degree[e] = st.kind == StratumKind::neg && !rest.empty() ? d + 1 : d;
      }
    }
  }
  for (int e = 1; e <= ne; ++e) g.degree = std::max(g.degree, g.edge_degree[e]);
  if (g.type == GrowthType::polynomial && g.degree > 0 &&
      is_inner(gm.induced_outer()))
    g.degree = 0;
  return g;
}

struct LaminationSupport {
  bool stabilized = false;
  int rank = 0;                   // of the carrying free factor
  SubgroupGraph carrier;          // defined when stabilized
  FreeMap to_standard;            // carrier = to_standard^-1(<x1..x_rank>)
  std::vector<Word> leaf_loops;   // the sampled loops, outer images of gamma
};

// Support of the attracting lamination: glue a loop gamma from a leaf
// segment (an edge image iterate that repeats an oriented stratum edge),
// then take the smallest free factor carrying an accumulating run of its
// forward images. Stability for three consecutive steps is accepted.
inline LaminationSupport lamination_support(const GraphMap& gm,
                                            const RttReport& rtt,
                                            int budget = 50) {
  if (!rtt.valid || rtt.strata.eg_count != 1)
    throw std::invalid_argument(
        "lamination support needs a validated map with one exponential stratum");
  LaminationSupport out{false, 0, SubgroupGraph(gm.graph().rank(), {}),
                        FreeMap::identity(gm.graph().rank()), {}};
  const Stratum* eg = nullptr;
  for (const Stratum& st : rtt.strata.strata)
    if (st.kind == StratumKind::eg) eg = &st;
  std::set<int> eg_edges(eg->edges.begin(), eg->edges.end());

  // Iterates of an exponential map grow geometrically; the caps below turn
  // a runaway family into an honest unstabilized report.
  constexpr size_t kLengthCap = 8000;
  EdgePath seg{eg->edges.front()};
  std::optional<EdgePath> gamma;
  for (int it = 0; it < budget && !gamma && seg.size() < kLengthCap; ++it) {
    seg = gm.path_image(seg);
    std::map<EdgeRef, size_t> first_at;
    for (size_t i = 0; i < seg.size(); ++i) {
      EdgeRef x = seg[i];
      if (!eg_edges.count(std::abs(x))) continue;
      auto it2 = first_at.find(x);
      if (it2 != first_at.end()) {
        gamma = EdgePath(seg.begin() + it2->second, seg.begin() + i);
        break;
      }
      first_at[x] = i;
    }
  }
  if (!gamma) return out;

  const int rank = gm.graph().rank();
  EdgePath cur = *gamma;
  std::vector<Word> family;
  int streak = 0;
  std::optional<whitehead::Support> sup;
  for (int it = 0; it < budget && cur.size() < kLengthCap; ++it) {
    Word w = gm.graph().path_class(cur);
    if (cyclic_length(w) > 0) family.push_back(Word(CyclicWord(w).letters()));
    out.leaf_loops.push_back(w);
    whitehead::Support s = whitehead::free_factor_support(rank, family);
    bool same = sup && s.rank == sup->rank &&
                s.carrier.conjugacy_key() == sup->carrier.conjugacy_key();
    streak = same ? streak + 1 : 0;
    sup = s;
    if (streak >= 3 || s.rank == rank) {
      out.stabilized = true;
      out.rank = s.rank;
      out.carrier = s.carrier;
      out.to_standard = s.to_standard;
      return out;
    }
    cur = gm.path_image(cur);
  }
  return out;
}

// Basis change search: best-first over Whitehead conjugations and inner
// twists, scored by total image length, admitting maps that pass a
// caller-supplied test. Twists leave the witness alone, so the found map
// equals conjugate_map(input, chi) only up to an inner factor; consumers
// read outer data off the map itself or reverify transported subgroups up
// to conjugacy, and both tolerate the slack.
struct ShapedMap {
  FreeMap map;     // conjugate_map(input, chi) up to an inner twist
  FreeMap chi;     // witness
};

template <typename Pred>
inline std::optional<ShapedMap> search_basis_change(const FreeMap& phi,
                                                    Pred&& good,
                                                    size_t node_budget = 20000) {
  const auto moves = whitehead::all_moves(phi.rank());
  std::vector<FreeMap> twists;
  for (int i = 1; i <= phi.rank(); ++i) {
    twists.push_back(FreeMap::inner(phi.rank(), Word::gen(i)));
    twists.push_back(FreeMap::inner(phi.rank(), Word::gen(-i)));
  }
  auto score = [](const FreeMap& f) { return f.total_image_length(); };
  std::set<std::vector<Word>> seen;
  auto cmp = [&](const std::pair<size_t, std::pair<FreeMap, FreeMap>>& a,
                 const std::pair<size_t, std::pair<FreeMap, FreeMap>>& b) {
    return a.first > b.first;
  };
  std::vector<std::pair<size_t, std::pair<FreeMap, FreeMap>>> heap;
  auto push = [&](const FreeMap& f, const FreeMap& chi) {
    if (!seen.insert(f.images()).second) return;
    heap.push_back({score(f), {f, chi}});
    std::push_heap(heap.begin(), heap.end(), cmp);
  };
  push(phi, FreeMap::identity(phi.rank()));
  size_t expanded = 0;
  // Expansion cost scales with image length, so long inputs also spend a
  // length-weighted budget; this keeps worst-case time flat across powers.
  size_t spent = 0;
  const size_t length_budget = node_budget * 64;
  while (!heap.empty() && expanded < node_budget && spent < length_budget) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    auto [sc, node] = heap.back();
    heap.pop_back();
    ++expanded;
    spent += sc;
    if (good(node.first)) return ShapedMap{node.first, node.second};
    if (sc > score(phi) + 24) continue;  // admission window around the input
    for (const FreeMap& m : moves)
      push(conjugate_map(node.first, m), compose(node.second, m));
    for (const FreeMap& t : twists) push(compose(node.first, t), node.second);
  }
  return std::nullopt;
}

struct ValidatedRep {
  GraphMap gm;        // rose map representing conjugate_map(phi^power, chi)
  FreeMap chi;        // witness up to an inner twist of gm's defining map
  int power = 1;
  RttReport rtt;
  GrowthReport growth;
};

// Certified growth of an outer class: scan small powers and Whitehead
// conjugates of each for a rose representative that validates. Growth type
// is power invariant and the polynomial degree is unchanged, so any hit
// classifies the input.
inline std::optional<ValidatedRep> find_validated_representative(
    const FreeMap& phi, size_t node_budget = 6000) {
  const std::vector<int> powers{1, 2, 3, 4, 6, 12};
  for (int j : powers) {
    if (!is_inner(pow(phi, j))) continue;
    // Finite order: the identity rose map represents the trivial power.
    GraphMap gm = GraphMap::rose_map(FreeMap::identity(phi.rank()));
    RttReport rtt = validate_rtt(gm);
    GrowthReport g = growth_degrees(gm, rtt);
    return ValidatedRep{std::move(gm), FreeMap::identity(phi.rank()), j,
                        std::move(rtt), std::move(g)};
  }
  // Powers whose images already blew past the cap cannot shrink back under
  // the admission window, so they are skipped rather than searched in vain.
  constexpr size_t kPowerCap = 2500;
  FreeMap p = FreeMap::identity(phi.rank());
  int have = 0;
  for (int j : powers) {
    while (have < j && p.total_image_length() <= kPowerCap) {
      p = compose(p, phi);
      ++have;
    }
    if (have < j || p.total_image_length() > kPowerCap) break;
    auto hit = search_basis_change(
        p, [](const FreeMap& f) { return validate_rtt(GraphMap::rose_map(f)).valid; },
        node_budget);
    if (!hit) continue;
    GraphMap gm = GraphMap::rose_map(hit->map);
    RttReport rtt = validate_rtt(gm);
    GrowthReport g = growth_degrees(gm, rtt);
    return ValidatedRep{std::move(gm), hit->chi, j, std::move(rtt), std::move(g)};
  }
  return std::nullopt;
}

struct UpgNormalForm {
  FreeMap chi;   // shaped below = conjugate_map(phi^power, chi) up to inner
  FreeMap shaped;
  int power = 1;
  int k = 0;     // second image is b.a^k
  Word u, v;     // third image is u.c.v with u, v in <a,b>
};

namespace traintrack_detail {

inline bool unipotent(const IMat& a) {
  const int n = static_cast<int>(a.size());
  IMat d = imat_sub(a, imat_identity(n));
  IMat p = d;
  for (int i = 1; i < n; ++i) p = imat_mul(p, d);
  for (const IVec& row : p)
    for (int64_t x : row)
      if (x != 0) return false;
  return true;
}

inline std::optional<int> upg_power(const FreeMap& phi) {
  // Polynomial classes have abelianizations whose eigenvalues are roots of
  // unity of order dividing 12 in GL(3,Z), so one of these powers works.
  for (int j : {1, 2, 3, 4, 6, 12})
    if (unipotent(pow(phi, j).abelianization())) return j;
  return std::nullopt;
}

inline bool triangular_shape(const FreeMap& f, int* k, Word* u, Word* v) {
  if (f.rank() != 3) return false;
  if (!(f.image(1) == Word::gen(1))) return false;
  const Word& b = f.image(2);
  if (b.empty() || b.letters()[0] != 2) return false;
  for (size_t i = 1; i < b.size(); ++i)
    if (std::abs(b.letters()[i]) != 1) return false;
  const Word& c = f.image(3);
  int cpos = -1;
  for (size_t i = 0; i < c.size(); ++i)
    if (std::abs(c.letters()[i]) == 3) {
      if (cpos >= 0 || c.letters()[i] < 0) return false;
      cpos = static_cast<int>(i);
    }
  if (cpos < 0) return false;
  if (k) {
    *k = 0;
    for (size_t i = 1; i < b.size(); ++i) *k += b.letters()[i] > 0 ? 1 : -1;
  }
  if (u) *u = Word(std::vector<Letter>(c.letters().begin(),
                                       c.letters().begin() + cpos));
  if (v) *v = Word(std::vector<Letter>(c.letters().begin() + cpos + 1,
                                       c.letters().end()));
  return true;
}

}  // namespace traintrack_detail

// Unipotent polynomial normal form a -> a, b -> b.a^k, c -> u.c.v with
// u, v in <a,b>: k != 0 exactly for quadratic classes. Found by replacing
// the input with its first unipotent power and searching basis changes.
inline std::optional<UpgNormalForm> upg_normal_form(const FreeMap& phi,
                                                    size_t node_budget = 20000) {
  if (phi.rank() != 3) throw std::invalid_argument("normal form is rank 3 only");
  auto j = traintrack_detail::upg_power(phi);
  if (!j) return std::nullopt;
  FreeMap p = pow(phi, *j);
  auto hit = search_basis_change(
      p,
      [](const FreeMap& f) {
        return traintrack_detail::triangular_shape(f, nullptr, nullptr, nullptr);
      },
      node_budget);
  if (!hit) return std::nullopt;
  UpgNormalForm nf;
  nf.chi = hit->chi;
  nf.shaped = hit->map;
  nf.power = *j;
  traintrack_detail::triangular_shape(hit->map, &nf.k, &nf.u, &nf.v);
  return nf;
}

struct InvariantFactor {
  SubgroupGraph factor;      // rank-2 free factor, invariant up to conjugacy
  std::vector<Word> basis;
  Word witness;              // (factor)phi ^ witness == factor
  UpgNormalForm form;        // provenance: factor = <a,b> pulled through chi
};

// The invariant rank-2 free factor of a quadratic class: <a,b> of the
// normal form basis, transported back and reverified against phi itself.
inline std::optional<InvariantFactor> invariant_rank2_factor(
    const FreeMap& phi, size_t node_budget = 20000) {
  auto nf = upg_normal_form(phi, node_budget);
  if (!nf || nf->k == 0) return std::nullopt;
  FreeMap back = inverse(nf->chi);
  std::vector<Word> basis{back.apply(Word::gen(1)), back.apply(Word::gen(2))};
  SubgroupGraph k(3, basis);
  std::vector<Word> image_gens{phi.apply(basis[0]), phi.apply(basis[1])};
  SubgroupGraph kphi(3, image_gens);
  auto w = kphi.conjugate_into(k);
  if (!w) return std::nullopt;
  for (const Word& g : image_gens)
    if (!k.contains(conj(g, *w)))
      throw std::logic_error("invariant factor witness fails");
  return InvariantFactor{std::move(k), std::move(basis), *w, std::move(*nf)};
}

}  // namespace f3conj
