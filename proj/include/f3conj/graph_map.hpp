#pragma once

// Marked graphs and their self maps: the topological representatives that
// the growth analysis works on. A marked graph is a finite connected graph
// with a chosen spanning tree; collapsing the tree identifies pi_1 with the
// free group on the non-tree edges, and that identification is how graph
// maps induce outer automorphisms. Edge paths are kept freely reduced.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "f3conj/automorphism.hpp"
#include "f3conj/word.hpp"

namespace f3conj {

struct NotHomotopyEquivalence : std::runtime_error {
  explicit NotHomotopyEquivalence(const std::string& what)
      : std::runtime_error(what) {}
};

// Signed edge index: +e traverses edge e forward, -e backward (1-based).
using EdgeRef = int;
using EdgePath = std::vector<EdgeRef>;

inline EdgePath reduce_path(const EdgePath& p) {
  EdgePath r;
  for (EdgeRef e : p) {
    if (!r.empty() && r.back() == -e)
      r.pop_back();
    else
      r.push_back(e);
  }
  return r;
}

inline EdgePath inverse_path(const EdgePath& p) {
  EdgePath r(p.rbegin(), p.rend());
  for (EdgeRef& e : r) e = -e;
  return r;
}

class MarkedGraph {
 public:
  // Edges as ordered vertex pairs; vertices are 0-based. The marking is
  // the BFS spanning tree from vertex 0, non-tree edges numbered into the
  // free basis in index order.
  MarkedGraph(int vertices, std::vector<std::pair<int, int>> edges)
      : nv_(vertices), ends_(std::move(edges)) {
    if (nv_ <= 0) throw std::invalid_argument("graph needs a vertex");
    for (auto [u, v] : ends_)
      if (u < 0 || u >= nv_ || v < 0 || v >= nv_)
        throw std::invalid_argument("edge endpoint out of range");
    tree_.assign(ends_.size(), false);
    basis_of_.assign(ends_.size(), 0);
    std::vector<int> dist(nv_, -1);
    tree_path_.assign(nv_, {});
    dist[0] = 0;
    std::queue<int> q;
    q.push(0);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int e = 1; e <= edge_count(); ++e) {
        auto [a, b] = ends_[e - 1];
        int other = a == u ? b : (b == u ? a : -1);
        if (other < 0 || dist[other] >= 0) continue;
        dist[other] = dist[u] + 1;
        tree_[e - 1] = true;
        tree_path_[other] = tree_path_[u];
        tree_path_[other].push_back(a == u ? e : -e);
        q.push(other);
      }
    }
    for (int v = 0; v < nv_; ++v)
      if (dist[v] < 0) throw std::invalid_argument("graph not connected");
    int next = 1;
    for (int e = 1; e <= edge_count(); ++e)
      if (!tree_[e - 1]) basis_of_[e - 1] = next++;
    rank_ = next - 1;
  }

  static MarkedGraph rose(int rank) {
    std::vector<std::pair<int, int>> es(rank, {0, 0});
    return MarkedGraph(1, std::move(es));
  }

  int vertex_count() const { return nv_; }
  int edge_count() const { return static_cast<int>(ends_.size()); }
  int rank() const { return rank_; }

  int src(EdgeRef e) const {
    return e > 0 ? ends_[e - 1].first : ends_[-e - 1].second;
  }
  int dst(EdgeRef e) const { return src(-e); }
  bool is_tree_edge(int e) const { return tree_[e - 1]; }
  int basis_of(int e) const { return basis_of_[e - 1]; }  // 0 for tree edges

  bool is_path(const EdgePath& p, int from) const {
    int at = from;
    for (EdgeRef e : p) {
      if (src(e) != at) return false;
      at = dst(e);
    }
    return true;
  }

  // Root-based tree path to v, as an edge path.
  const EdgePath& tree_path(int v) const { return tree_path_[v]; }

  // Collapsing the marking tree sends a closed edge path to a word in the
  // basis; for paths closed at any vertex this represents the free homotopy
  // class, and based at the root the genuine pi_1 element.
  Word path_class(const EdgePath& p) const {
    std::vector<Letter> ls;
    for (EdgeRef e : p) {
      int b = basis_of_[std::abs(e) - 1];
      if (b == 0) continue;
      ls.push_back(e > 0 ? b : -b);
    }
    return Word(ls);
  }

  // Closed root-based edge path representing basis element i.
  EdgePath basis_loop(int i) const {
    for (int e = 1; e <= edge_count(); ++e)
      if (basis_of_[e - 1] == i) {
        EdgePath p = tree_path_[ends_[e - 1].first];
        p.push_back(e);
        EdgePath back = inverse_path(tree_path_[ends_[e - 1].second]);
        p.insert(p.end(), back.begin(), back.end());
        return reduce_path(p);
      }
    throw std::out_of_range("no such basis element");
  }

 private:
  int nv_;
  int rank_;
  std::vector<std::pair<int, int>> ends_;
  std::vector<bool> tree_;
  std::vector<int> basis_of_;
  std::vector<EdgePath> tree_path_;
};

// Self map of a marked graph: vertex images plus one reduced edge path per
// positive edge, endpoint compatible. Inverse edges map to inverse paths.
class GraphMap {
 public:
  GraphMap(MarkedGraph g, std::vector<int> vertex_map,
           std::vector<EdgePath> edge_images)
      : g_(std::move(g)), vmap_(std::move(vertex_map)), eim_(std::move(edge_images)) {
    if (static_cast<int>(vmap_.size()) != g_.vertex_count())
      throw std::invalid_argument("vertex image count mismatch");
    if (static_cast<int>(eim_.size()) != g_.edge_count())
      throw std::invalid_argument("edge image count mismatch");
    for (int& v : vmap_)
      if (v < 0 || v >= g_.vertex_count())
        throw std::invalid_argument("vertex image out of range");
    for (int e = 1; e <= g_.edge_count(); ++e) {
      eim_[e - 1] = reduce_path(eim_[e - 1]);
      if (!g_.is_path(eim_[e - 1], vmap_[g_.src(e)]))
        throw std::invalid_argument("edge image not a path at mapped source");
      int at = vmap_[g_.src(e)];
      for (EdgeRef x : eim_[e - 1]) at = g_.dst(x);
      if (at != vmap_[g_.dst(e)])
        throw std::invalid_argument("edge image misses mapped target");
    }
  }

  // Rose representative of a free-group endomorphism.
  static GraphMap rose_map(const FreeMap& f) {
    MarkedGraph r = MarkedGraph::rose(f.rank());
    std::vector<EdgePath> im;
    for (int i = 1; i <= f.rank(); ++i) {
      EdgePath p;
      for (Letter x : f.image(i).letters()) p.push_back(x);
      im.push_back(p);
    }
    return GraphMap(std::move(r), {0}, std::move(im));
  }

  const MarkedGraph& graph() const { return g_; }
  int vertex_image(int v) const { return vmap_[v]; }
  const EdgePath& edge_image(int e) const { return eim_[e - 1]; }

  EdgePath image_of(EdgeRef e) const {
    return e > 0 ? eim_[e - 1] : inverse_path(eim_[-e - 1]);
  }

  EdgePath path_image(const EdgePath& p) const {
    EdgePath r;
    for (EdgeRef e : p) {
      EdgePath q = image_of(e);
      r.insert(r.end(), q.begin(), q.end());
    }
    return reduce_path(r);
  }

  // Outer automorphism read through the marking. Throws when the induced
  // endomorphism is not invertible, so success certifies a homotopy
  // equivalence.
  FreeMap induced_outer() const {
    std::vector<Word> im;
    for (int i = 1; i <= g_.rank(); ++i)
      im.push_back(g_.path_class(path_image(g_.basis_loop(i))));
    FreeMap f(g_.rank(), im);
    if (!is_automorphism(f))
      throw NotHomotopyEquivalence("graph map does not invert on pi_1");
    return f;
  }

 private:
  MarkedGraph g_;
  std::vector<int> vmap_;
  std::vector<EdgePath> eim_;
};

}  // namespace f3conj
