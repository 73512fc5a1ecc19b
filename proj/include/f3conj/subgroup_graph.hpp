#pragma once

// Folded Stallings graphs for finitely generated subgroups of a free
// group. The graph is a deterministic edge-labeled automaton: at most
// one x-edge leaves each vertex for every signed letter x, so paths,
// morphisms and canonical forms are all label-driven.

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

#include "automorphism.hpp"
#include "word.hpp"

namespace f3conj {

class SubgroupGraph {
 public:
  SubgroupGraph(int ambient_rank, const std::vector<Word>& gens)
      : ambient_(ambient_rank) {
    build(gens);
  }

  int ambient_rank() const { return ambient_; }
  int vertex_count() const { return static_cast<int>(adj_.size()); }
  bool trivial() const { return edge_count_ == 0; }
  int rank() const { return edge_count_ - vertex_count() + 1; }

  bool contains(const Word& w) const {
    int v = base_;
    for (Letter x : w.letters()) {
      auto it = adj_[v].find(x);
      if (it == adj_[v].end()) return false;
      v = it->second;
    }
    return v == base_;
  }

  // Deterministic spanning-tree basis (BFS, letters in canonical order).
  std::vector<Word> basis() const {
    auto [parent, order] = bfs_tree(base_);
    // Tree edges in positive orientation, whichever way BFS crossed them.
    std::set<std::tuple<int, Letter, int>> tree;
    for (int v : order) {
      auto [pu, px] = parent[v];
      if (pu < 0) continue;
      if (px > 0)
        tree.insert({pu, px, v});
      else
        tree.insert({v, static_cast<Letter>(-px), pu});
    }
    std::vector<Word> out;
    for (int u : order)
      for (auto [x, v] : sorted_out(u)) {
        if (x < 0) continue;  // one orientation per geometric edge
        if (tree.count({u, x, v})) continue;
        Word w = path_from_base(parent, u);
        w.push(x);
        w.append(path_from_base(parent, v).inverse());
        out.push_back(w);
      }
    return out;
  }

  bool contains_up_to_conjugacy(const Word& w) const {
    CyclicWord c(w);
    if (c.empty()) return true;
    for (int v = 0; v < vertex_count(); ++v) {
      if (!in_core_[v]) continue;
      int u = v;
      bool ok = true;
      for (Letter x : c.letters()) {
        auto it = adj_[u].find(x);
        if (it == adj_[u].end()) {
          ok = false;
          break;
        }
        u = it->second;
      }
      if (ok && u == v) return true;
    }
    return false;
  }

  int core_vertex_count() const {
    return static_cast<int>(std::count(in_core_.begin(), in_core_.end(), true));
  }

  // Positive-letter core edges (u, x, v).
  std::vector<std::tuple<int, Letter, int>> core_edges() const {
    std::vector<std::tuple<int, Letter, int>> es;
    for (int u = 0; u < vertex_count(); ++u) {
      if (!in_core_[u]) continue;
      for (auto [x, v] : adj_[u])
        if (x > 0 && in_core_[v]) es.push_back({u, x, v});
    }
    return es;
  }

  // Path from the base to the nearest core vertex (empty when the base
  // is already in the core, or the subgroup is trivial).
  Word arc_to_core() const {
    if (trivial() || in_core_[base_]) return Word();
    auto [parent, order] = bfs_tree(base_);
    for (int v : order)
      if (in_core_[v]) return path_from_base(parent, v);
    return Word();
  }

  // Conjugator g with this^g <= k, via a core-to-core label morphism.
  std::optional<Word> conjugate_into(const SubgroupGraph& k) const {
    if (trivial()) return Word();
    if (k.ambient_ != ambient_)
      throw std::invalid_argument("ambient rank mismatch");
    int root = -1;
    for (int v = 0; v < vertex_count(); ++v)
      if (in_core_[v]) {
        root = v;
        break;
      }
    for (int target = 0; target < k.vertex_count(); ++target) {
      if (!k.in_core_[target]) continue;
      if (auto g = morphism_conjugator(root, k, target)) return g;
    }
    return std::nullopt;
  }

  // Conjugator g with this^g <= <gens in S>, when the core only uses S.
  std::optional<Word> conjugate_into_subalphabet(
      const std::vector<int>& sub) const {
    if (trivial()) return Word();
    std::set<int> s(sub.begin(), sub.end());
    for (auto [u, x, v] : core_edges())
      if (!s.count(x)) return std::nullopt;
    return arc_to_core();
  }

  // Canonical key of the cyclic core as an edge-labeled graph; equal keys
  // characterize conjugate subgroups.
  std::vector<int> conjugacy_key() const {
    std::vector<int> best;
    bool first = true;
    for (int v = 0; v < vertex_count(); ++v) {
      if (!in_core_[v]) continue;
      std::vector<int> key = core_serialization(v);
      if (first || key < best) {
        best = key;
        first = false;
      }
    }
    if (first) best = {0};  // trivial subgroup
    return best;
  }

  bool is_whole_group() const {
    for (int i = 1; i <= ambient_; ++i)
      if (!contains(Word::gen(i))) return false;
    return true;
  }

 private:
  void build(const std::vector<Word>& gens) {
    // Raw edges (u, x, v), x > 0, then fold with union-find.
    std::vector<std::tuple<int, Letter, int>> raw;
    int nv = 1;
    for (const Word& g : gens) {
      if (g.empty()) continue;
      int cur = 0;
      for (size_t i = 0; i < g.size(); ++i) {
        int nxt = i + 1 == g.size() ? 0 : nv++;
        Letter x = g.at(i);
        if (x > 0)
          raw.push_back({cur, x, nxt});
        else
          raw.push_back({nxt, static_cast<Letter>(-x), cur});
        cur = nxt;
      }
    }
    std::vector<int> uf(nv);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int a) {
      while (uf[a] != a) a = uf[a] = uf[uf[a]];
      return a;
    };
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<int, Letter>, int> seen;
      for (auto [u, x, v] : raw) {
        for (auto [s, l, t] : {std::tuple{find(u), x, find(v)},
                               std::tuple{find(v), static_cast<Letter>(-x),
                                          find(u)}}) {
          auto it = seen.find({s, l});
          if (it == seen.end()) {
            seen[{s, l}] = t;
          } else if (it->second != t) {
            uf[find(it->second)] = find(t);
            changed = true;
          }
        }
        if (changed) break;
      }
    }
    // Compact vertices, base first.
    std::map<int, int> idx;
    auto id_of = [&](int v) {
      int r = find(v);
      auto it = idx.find(r);
      if (it != idx.end()) return it->second;
      int n = static_cast<int>(idx.size());
      idx[r] = n;
      return n;
    };
    base_ = id_of(0);
    std::set<std::tuple<int, Letter, int>> edges;
    for (auto [u, x, v] : raw) edges.insert({id_of(u), x, id_of(v)});
    adj_.assign(idx.size(), {});
    edge_count_ = static_cast<int>(edges.size());
    for (auto [u, x, v] : edges) {
      adj_[u][x] = v;
      adj_[v][-x] = u;
    }
    compute_core();
  }

  void compute_core() {
    int n = vertex_count();
    std::vector<int> deg(n);
    for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(adj_[v].size());
    in_core_.assign(n, true);
    std::deque<int> q;
    for (int v = 0; v < n; ++v)
      if (deg[v] <= 1) q.push_back(v);
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      if (!in_core_[v]) continue;
      if (deg[v] > 1) continue;
      in_core_[v] = false;
      for (auto [x, u] : adj_[v]) {
        if (!in_core_[u]) continue;
        if (--deg[u] <= 1) q.push_back(u);
      }
    }
  }

  std::vector<std::pair<Letter, int>> sorted_out(int u) const {
    std::vector<std::pair<Letter, int>> es(adj_[u].begin(), adj_[u].end());
    std::sort(es.begin(), es.end(), [](auto& a, auto& b) {
      return letter_key(a.first) < letter_key(b.first);
    });
    return es;
  }

  // parent[v] = (vertex, letter leading to v), discovery order from root.
  std::pair<std::vector<std::pair<int, Letter>>, std::vector<int>> bfs_tree(
      int root) const {
    std::vector<std::pair<int, Letter>> parent(vertex_count(), {-1, 0});
    std::vector<int> order;
    std::vector<bool> seen(vertex_count(), false);
    std::deque<int> q{root};
    seen[root] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      order.push_back(u);
      for (auto [x, v] : sorted_out(u))
        if (!seen[v]) {
          seen[v] = true;
          parent[v] = {u, x};
          q.push_back(v);
        }
    }
    return {parent, order};
  }

  Word path_from_base(const std::vector<std::pair<int, Letter>>& parent,
                      int v) const {
    std::vector<Letter> rev;
    while (parent[v].first >= 0) {
      rev.push_back(parent[v].second);
      v = parent[v].first;
    }
    std::reverse(rev.begin(), rev.end());
    return Word(rev);
  }

  // Try to extend root |-> target to a label morphism core(this) -> core(k);
  // on success return the conjugator p * q^-1 and verify it.
  std::optional<Word> morphism_conjugator(int root, const SubgroupGraph& k,
                                          int target) const {
    std::map<int, int> img{{root, target}};
    std::deque<int> q{root};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [x, v] : adj_[u]) {
        if (!in_core_[v]) continue;
        auto it = k.adj_[img[u]].find(x);
        if (it == k.adj_[img[u]].end()) return std::nullopt;
        auto ins = img.insert({v, it->second});
        if (!ins.second) {
          if (ins.first->second != it->second) return std::nullopt;
        } else {
          q.push_back(v);
        }
      }
    }
    auto [parent, order] = bfs_tree(base_);
    Word p = path_from_base(parent, root);
    auto [kparent, korder] = k.bfs_tree(k.base_);
    Word qk = k.path_from_base(kparent, target);
    Word g = p * qk.inverse();
    for (const Word& b : basis())
      if (!k.contains(conj(b, g))) return std::nullopt;
    return g;
  }

  std::vector<int> core_serialization(int root) const {
    std::map<int, int> idx{{root, 0}};
    std::deque<int> q{root};
    std::vector<int> out;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [x, v] : sorted_out(u)) {
        if (!in_core_[v]) continue;
        auto it = idx.find(v);
        int vi;
        if (it == idx.end()) {
          vi = static_cast<int>(idx.size());
          idx[v] = vi;
          q.push_back(v);
        } else {
          vi = it->second;
        }
        out.push_back(idx[u]);
        out.push_back(x);
        out.push_back(vi);
      }
    }
    return out;
  }

  int ambient_;
  std::vector<std::map<Letter, int>> adj_;
  int base_ = 0;
  int edge_count_ = 0;
  std::vector<bool> in_core_;
};

// Generators of the fixed words of f up to the given length, folded.
// The result is a subgroup of Fix(f); for the maps this project feeds it
// (small budgets, shears) it recovers the whole fixed subgroup.
inline SubgroupGraph fixed_subgroup(const FreeMap& f, int max_len = 6) {
  std::vector<Word> fixed;
  int rank = f.rank();
  std::vector<Letter> stack;
  auto rec = [&](auto&& self) -> void {
    if (!stack.empty()) {
      Word w(stack);
      if (w.size() == stack.size() && f.apply(w) == w) fixed.push_back(w);
    }
    if (static_cast<int>(stack.size()) >= max_len) return;
    for (int g = 1; g <= rank; ++g)
      for (Letter x : {static_cast<Letter>(g), static_cast<Letter>(-g)}) {
        if (!stack.empty() && stack.back() == -x) continue;
        stack.push_back(x);
        self(self);
        stack.pop_back();
      }
  };
  rec(rec);
  return SubgroupGraph(rank, fixed);
}

}  // namespace f3conj
