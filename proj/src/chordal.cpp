#include "netiqc/chordal.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace netiqc {

Graph::Graph(const SparsityPattern& p) : adj_(p.neighbors()) {}

void Graph::add_edge(int u, int v) {
  if (u == v) return;
  auto ins = [](std::vector<int>& a, int x) {
    auto it = std::lower_bound(a.begin(), a.end(), x);
    if (it == a.end() || *it != x) a.insert(it, x);
  };
  ins(adj_.at(u), v);
  ins(adj_.at(v), u);
}

bool Graph::has_edge(int u, int v) const {
  return std::binary_search(adj_.at(u).begin(), adj_.at(u).end(), v);
}

long Graph::edge_count() const {
  long n = 0;
  for (const auto& a : adj_) n += static_cast<long>(a.size());
  return n / 2;
}

std::vector<int> mcs_ordering(const Graph& g) {
  const int n = g.size();
  std::vector<int> weight(n, 0), visit;
  std::vector<char> done(n, 0);
  visit.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!done[v] && (best < 0 || weight[v] > weight[best])) best = v;
    }
    done[best] = 1;
    visit.push_back(best);
    for (int u : g.neighbors(best)) {
      if (!done[u]) ++weight[u];
    }
  }
  std::reverse(visit.begin(), visit.end());
  return visit;
}

namespace {

std::vector<int> positions(const std::vector<int>& order, int n) {
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("ordering size mismatch");
  std::vector<int> pos(n, -1);
  for (int i = 0; i < n; ++i) {
    const int v = order[i];
    if (v < 0 || v >= n || pos[v] >= 0) throw std::invalid_argument("ordering is not a permutation");
    pos[v] = i;
  }
  return pos;
}

// Neighbors of v eliminated after v, sorted by elimination position.
std::vector<int> later_neighbors(const Graph& g, const std::vector<int>& pos, int v) {
  std::vector<int> out;
  for (int u : g.neighbors(v)) {
    if (pos[u] > pos[v]) out.push_back(u);
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) { return pos[a] < pos[b]; });
  return out;
}

}  // namespace

bool is_perfect_elimination(const Graph& g, const std::vector<int>& order) {
  const auto pos = positions(order, g.size());
  for (int v : order) {
    const auto later = later_neighbors(g, pos, v);
    if (later.size() < 2) continue;
    const int u = later.front();
    for (size_t k = 1; k < later.size(); ++k) {
      if (!g.has_edge(u, later[k])) return false;
    }
  }
  return true;
}

bool is_chordal(const Graph& g) { return is_perfect_elimination(g, mcs_ordering(g)); }

ChordalEmbedding chordal_embedding(const SparsityPattern& pattern) {
  return chordal_embedding(Graph(pattern));
}

ChordalEmbedding chordal_embedding(const Graph& g) {
  ChordalEmbedding out{g, mcs_ordering(g), 0};
  if (is_perfect_elimination(g, out.ordering)) return out;

  const int n = g.size();
  std::vector<std::set<int>> work(n);
  for (int v = 0; v < n; ++v) work[v].insert(g.neighbors(v).begin(), g.neighbors(v).end());
  std::vector<char> gone(n, 0);
  out.ordering.clear();
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (!gone[v] && (best < 0 || work[v].size() < work[best].size())) best = v;
    }
    const std::vector<int> nb(work[best].begin(), work[best].end());
    for (size_t a = 0; a < nb.size(); ++a) {
      for (size_t b = a + 1; b < nb.size(); ++b) {
        if (work[nb[a]].insert(nb[b]).second) {
          work[nb[b]].insert(nb[a]);
          out.graph.add_edge(nb[a], nb[b]);
          ++out.fill;
        }
      }
    }
    for (int u : nb) work[u].erase(best);
    gone[best] = 1;
    out.ordering.push_back(best);
  }
  return out;
}

std::vector<std::vector<int>> maximal_cliques(const Graph& g, const std::vector<int>& order) {
  if (!is_perfect_elimination(g, order)) {
    throw std::invalid_argument("maximal_cliques needs a perfect elimination ordering");
  }
  const int n = g.size();
  const auto pos = positions(order, n);
  std::vector<std::vector<int>> later(n);
  for (int v = 0; v < n; ++v) later[v] = later_neighbors(g, pos, v);
  // {v} ∪ later(v) is contained in {u} ∪ later(u) exactly when some u has v
  // as its first later neighbor and one more later neighbor than v.
  std::vector<char> maximal(n, 1);
  for (int u = 0; u < n; ++u) {
    if (later[u].empty()) continue;
    const int v = later[u].front();
    if (later[u].size() == later[v].size() + 1) maximal[v] = 0;
  }
  std::vector<std::vector<int>> out;
  for (int v = 0; v < n; ++v) {
    if (!maximal[v]) continue;
    std::vector<int> c = later[v];
    c.push_back(v);
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

int CliqueTree::edge_count() const {
  return static_cast<int>(std::count_if(parent.begin(), parent.end(), [](int p) { return p >= 0; }));
}

int CliqueTree::max_order() const {
  size_t m = 0;
  for (const auto& c : cliques) m = std::max(m, c.size());
  return static_cast<int>(m);
}

std::vector<std::vector<int>> CliqueTree::children() const {
  std::vector<std::vector<int>> ch(cliques.size());
  for (int i = 0; i < size(); ++i) {
    if (parent[i] >= 0) ch[parent[i]].push_back(i);
  }
  return ch;
}

namespace {

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> unite(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void finish(CliqueTree& t) {
  t.roots.clear();
  for (int i = 0; i < t.size(); ++i) {
    if (t.parent[i] < 0) t.roots.push_back(i);
  }
  const auto ch = t.children();
  t.postorder.clear();
  for (int r : t.roots) {
    std::vector<std::pair<int, size_t>> stack{{r, 0}};
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < ch[node].size()) {
        const int c = ch[node][next++];
        stack.emplace_back(c, 0);
      } else {
        t.postorder.push_back(node);
        stack.pop_back();
      }
    }
  }
}

}  // namespace

std::vector<int> CliqueTree::separator(int child) const {
  const int p = parent.at(child);
  if (p < 0) return {};
  return intersect(cliques[child], cliques[p]);
}

std::vector<int> CliqueTree::postorder_rank() const {
  std::vector<int> rank(cliques.size(), -1);
  for (size_t k = 0; k < postorder.size(); ++k) rank[postorder[k]] = static_cast<int>(k);
  return rank;
}

void CliqueTree::write_report(std::ostream& os) const {
  for (int i = 0; i < size(); ++i) {
    os << "clique " << i << ":";
    for (int v : cliques[i]) os << ' ' << v;
    os << " ; parent: " << parent[i] << '\n';
  }
}

CliqueTree clique_tree(std::vector<std::vector<int>> cliques) {
  CliqueTree t;
  for (auto& c : cliques) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  t.cliques = std::move(cliques);
  const int L = t.size();

  std::vector<std::tuple<int, int, int>> edges;  // (-weight, i, j)
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      const int w = static_cast<int>(intersect(t.cliques[i], t.cliques[j]).size());
      if (w > 0) edges.emplace_back(-w, i, j);
    }
  }
  std::sort(edges.begin(), edges.end());
  std::vector<int> uf(L);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<std::vector<int>> adj(L);
  for (const auto& [w, i, j] : edges) {
    const int a = find(i), b = find(j);
    if (a == b) continue;
    uf[a] = b;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }

  // Root each component at the clique containing its lowest vertex.
  std::vector<int> comp(L, -1);
  std::vector<std::vector<int>> members;
  for (int i = 0; i < L; ++i) {
    if (comp[i] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<int> stack{i};
    comp[i] = id;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      members[id].push_back(u);
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = id;
          stack.push_back(v);
        }
      }
    }
  }
  t.parent.assign(L, -1);
  for (auto& mem : members) {
    std::sort(mem.begin(), mem.end());
    int root = mem.front();
    for (int c : mem) {
      if (t.cliques[c].front() < t.cliques[root].front()) root = c;
    }
    std::vector<int> queue{root};
    std::vector<char> seen(L, 0);
    seen[root] = 1;
    for (size_t k = 0; k < queue.size(); ++k) {
      const int u = queue[k];
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          t.parent[v] = u;
          queue.push_back(v);
        }
      }
    }
  }
  finish(t);
  return t;
}

CliqueTree merge_cliques(const CliqueTree& tree, int max_order) {
  if (max_order < tree.max_order()) {
    CliqueTree out = tree;
    out.merge_refused = true;
    return out;
  }
  const int L = tree.size();
  std::vector<std::vector<int>> cl = tree.cliques;
  std::vector<int> parent = tree.parent;
  std::vector<char> alive(L, 1);
  auto ch = tree.children();

  for (int node : tree.postorder) {
    std::set<int> rejected;
    while (true) {
      int pick = -1;
      size_t pick_sep = 0;
      for (int c : ch[node]) {
        if (rejected.count(c)) continue;
        const size_t sep = intersect(cl[c], cl[node]).size();
        if (pick < 0 || sep < pick_sep || (sep == pick_sep && c < pick)) {
          pick = c;
          pick_sep = sep;
        }
      }
      if (pick < 0) break;
      auto merged = unite(cl[node], cl[pick]);
      if (static_cast<int>(merged.size()) > max_order) {
        rejected.insert(pick);
        continue;
      }
      cl[node] = std::move(merged);
      alive[pick] = 0;
      ch[node].erase(std::find(ch[node].begin(), ch[node].end(), pick));
      for (int g : ch[pick]) {
        parent[g] = node;
        ch[node].push_back(g);
      }
      std::sort(ch[node].begin(), ch[node].end());
      ch[pick].clear();
    }
  }

  std::vector<int> remap(L, -1);
  CliqueTree out;
  for (int i = 0; i < L; ++i) {
    if (!alive[i]) continue;
    remap[i] = out.size();
    out.cliques.push_back(cl[i]);
  }
  out.parent.assign(out.size(), -1);
  for (int i = 0; i < L; ++i) {
    if (alive[i] && parent[i] >= 0) out.parent[remap[i]] = remap[parent[i]];
  }
  finish(out);
  return out;
}

bool has_running_intersection(const CliqueTree& tree) {
  std::set<int> verts;
  for (const auto& c : tree.cliques) verts.insert(c.begin(), c.end());
  for (int v : verts) {
    // Containing cliques form a subtree iff exactly one of them has a parent
    // outside the set (or no parent).
    int tops = 0;
    for (int i = 0; i < tree.size(); ++i) {
      if (!std::binary_search(tree.cliques[i].begin(), tree.cliques[i].end(), v)) continue;
      const int p = tree.parent[i];
      if (p < 0 || !std::binary_search(tree.cliques[p].begin(), tree.cliques[p].end(), v)) ++tops;
    }
    if (tops != 1) return false;
  }
  return true;
}

std::vector<int> realify_indices(const std::vector<int>& J, int n) {
  std::vector<int> out(J);
  for (int j : J) out.push_back(j + n);
  return out;
}

}  // namespace netiqc
