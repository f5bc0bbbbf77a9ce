#include "netiqc/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netiqc {

template <typename Scalar>
std::vector<int> DecomposedProblem<Scalar>::neighbors(int i) const {
  std::vector<int> out;
  for (const auto& e : edges) {
    if (e.parent == i) out.push_back(e.child);
    if (e.child == i) out.push_back(e.parent);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <typename Scalar>
using SparseOf = typename AffineForm<Scalar>::Sparse;

// Sends every entry of `m` to its owner clique, as local-index triplets.
template <typename Scalar>
std::vector<SparseOf<Scalar>> distribute(const SparseOf<Scalar>& m,
                                         const std::vector<std::vector<int>>& indices,
                                         const std::vector<int>& rank,
                                         const std::vector<std::vector<int>>& cliques_of) {
  const size_t L = indices.size();
  std::vector<std::vector<Eigen::Triplet<Scalar>>> trips(L);
  for (int j = 0; j < m.outerSize(); ++j) {
    for (typename SparseOf<Scalar>::InnerIterator it(m, j); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      int best = -1;
      for (int k : cliques_of[r]) {
        if (std::binary_search(indices[k].begin(), indices[k].end(), c) &&
            (best < 0 || rank[k] < rank[best])) {
          best = k;
        }
      }
      if (best < 0) {
        throw std::invalid_argument("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                    ") is not covered by any clique");
      }
      const auto& J = indices[best];
      const int lr = static_cast<int>(std::lower_bound(J.begin(), J.end(), r) - J.begin());
      const int lc = static_cast<int>(std::lower_bound(J.begin(), J.end(), c) - J.begin());
      trips[best].emplace_back(lr, lc, it.value());
    }
  }
  std::vector<SparseOf<Scalar>> out;
  out.reserve(L);
  for (size_t k = 0; k < L; ++k) {
    const int n = static_cast<int>(indices[k].size());
    SparseOf<Scalar> s(n, n);
    s.setFromTriplets(trips[k].begin(), trips[k].end());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

template <typename Scalar>
DecomposedProblem<Scalar> split_form(const AffineForm<Scalar>& form, const CliqueTree& tree) {
  DecomposedProblem<Scalar> dp;
  dp.order = form.order();
  dp.tree = tree;
  dp.indices = tree.cliques;
  dp.variables = form.variables();
  dp.original_var_count = form.var_count();
  const int L = tree.size();
  if (L == 0) throw std::invalid_argument("clique tree is empty");

  std::vector<std::vector<int>> cliques_of(dp.order);
  for (int k = 0; k < L; ++k) {
    for (int v : dp.indices[k]) {
      if (v < 0 || v >= dp.order) throw std::invalid_argument("clique index out of range");
      cliques_of[v].push_back(k);
    }
  }
  const auto rank = tree.postorder_rank();

  for (int k = 0; k < L; ++k) {
    dp.local_forms.emplace_back(static_cast<int>(dp.indices[k].size()), dp.variables);
  }
  auto place = [&](const SparseOf<Scalar>& m, int var) {
    auto parts = distribute<Scalar>(m, dp.indices, rank, cliques_of);
    for (int k = 0; k < L; ++k) {
      if (parts[k].nonZeros() == 0) continue;
      if (var < 0) {
        dp.local_forms[k].add_constant(parts[k]);
      } else {
        dp.local_forms[k].add_term(var, parts[k]);
      }
    }
  };
  place(form.constant(), -1);
  for (int v = 0; v < form.var_count(); ++v) {
    if (form.has_term(v)) place(form.coefficient(v), v);
  }

  // Identity split with positive weights on every clique index.
  for (int v = 0; v < dp.order; ++v) {
    if (cliques_of[v].empty()) {
      throw std::invalid_argument("index " + std::to_string(v) + " is in no clique");
    }
  }
  for (int k = 0; k < L; ++k) {
    VectorXr w(dp.indices[k].size());
    for (size_t a = 0; a < dp.indices[k].size(); ++a) {
      w(a) = 1.0 / static_cast<double>(cliques_of[dp.indices[k][a]].size());
    }
    dp.t_weights.push_back(std::move(w));
  }
  return dp;
}

namespace {

// Orthonormal basis of Hermitian (or real symmetric) s x s matrices.
template <typename Scalar>
std::vector<typename AffineForm<Scalar>::Dense> separator_basis(int s) {
  using Dense = typename AffineForm<Scalar>::Dense;
  std::vector<Dense> out;
  const double h = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < s; ++a) {
    Dense e = Dense::Zero(s, s);
    e(a, a) = Scalar(1.0);
    out.push_back(e);
  }
  for (int a = 0; a < s; ++a) {
    for (int b = a + 1; b < s; ++b) {
      Dense e = Dense::Zero(s, s);
      e(a, b) = e(b, a) = Scalar(h);
      out.push_back(e);
      if constexpr (std::is_same_v<Scalar, Complex>) {
        Dense f = Dense::Zero(s, s);
        f(a, b) = Complex(0.0, h);
        f(b, a) = Complex(0.0, -h);
        out.push_back(f);
      }
    }
  }
  return out;
}

template <typename Scalar>
typename AffineForm<Scalar>::Dense lift(const typename AffineForm<Scalar>::Dense& z,
                                        const std::vector<int>& sep,
                                        const std::vector<int>& clique) {
  using Dense = typename AffineForm<Scalar>::Dense;
  Dense out = Dense::Zero(clique.size(), clique.size());
  std::vector<int> pos;
  for (int v : sep) {
    pos.push_back(static_cast<int>(std::lower_bound(clique.begin(), clique.end(), v) - clique.begin()));
  }
  for (size_t a = 0; a < sep.size(); ++a) {
    for (size_t b = 0; b < sep.size(); ++b) out(pos[a], pos[b]) = z(a, b);
  }
  return out;
}

}  // namespace

template <typename Scalar>
DecomposedProblem<Scalar> attach_consensus(DecomposedProblem<Scalar> dp) {
  if (dp.consensus_attached) return dp;
  const int L = dp.cliques();
  const CliqueTree& tree = dp.tree;

  // Clique-tree edges, children in postorder, then root links.
  for (int c : tree.postorder) {
    if (tree.parent[c] < 0) continue;
    dp.edges.push_back({tree.parent[c], c, tree.separator(c), {}, false});
  }
  for (size_t r = 1; r < tree.roots.size(); ++r) {
    dp.edges.push_back({tree.roots[r - 1], tree.roots[r], {}, {}, true});
  }

  for (auto& e : dp.edges) {
    if (e.link || e.separator.empty()) continue;
    const auto basis = separator_basis<Scalar>(static_cast<int>(e.separator.size()));
    for (size_t b = 0; b < basis.size(); ++b) {
      Variable z{"Z[" + std::to_string(e.parent) + "," + std::to_string(e.child) + "][" +
                     std::to_string(b) + "]",
                 -kInf, kInf};
      dp.variables.push_back(z);
      int id = -1;
      for (auto& f : dp.local_forms) id = f.add_variable(z);
      e.z_vars.push_back(id);
      dp.local_forms[e.parent].add_term(id, lift<Scalar>(-basis[b], e.separator, dp.indices[e.parent]));
      dp.local_forms[e.child].add_term(id, lift<Scalar>(basis[b], e.separator, dp.indices[e.child]));
    }
  }

  // Holders: smallest subtree of the consensus tree spanning the users.
  std::vector<std::vector<int>> adj(L);
  for (const auto& e : dp.edges) {
    adj[e.parent].push_back(e.child);
    adj[e.child].push_back(e.parent);
  }
  dp.holders.assign(dp.var_count(), {});
  for (int v = 0; v < dp.var_count(); ++v) {
    std::vector<char> keep(L, 0);
    int users = 0;
    for (int k = 0; k < L; ++k) {
      if (dp.local_forms[k].has_term(v)) {
        keep[k] = 1;
        ++users;
      }
    }
    if (users == 0) {
      // unused variable: a single holder keeps its box
      dp.holders[v] = {tree.roots.empty() ? 0 : tree.roots.front()};
      continue;
    }
    std::vector<char> in(L, 1);
    std::vector<int> degree(L);
    for (int k = 0; k < L; ++k) degree[k] = static_cast<int>(adj[k].size());
    std::vector<int> leaves;
    for (int k = 0; k < L; ++k) {
      if (degree[k] <= 1 && !keep[k]) leaves.push_back(k);
    }
    while (!leaves.empty()) {
      const int k = leaves.back();
      leaves.pop_back();
      if (!in[k]) continue;
      in[k] = 0;
      for (int u : adj[k]) {
        if (in[u] && --degree[u] <= 1 && !keep[u]) leaves.push_back(u);
      }
    }
    for (int k = 0; k < L; ++k) {
      if (in[k]) dp.holders[v].push_back(k);
    }
  }
  dp.consensus_attached = true;
  return dp;
}

SymmetricDecomposition realify(const HermitianDecomposition& dp) {
  SymmetricDecomposition out;
  out.order = 2 * dp.order;
  out.tree = dp.tree;
  for (auto& c : out.tree.cliques) c = realify_indices(c, dp.order);
  for (const auto& J : dp.indices) out.indices.push_back(realify_indices(J, dp.order));
  for (const auto& f : dp.local_forms) out.local_forms.push_back(realify(f));
  for (const auto& w : dp.t_weights) {
    VectorXr r(2 * w.size());
    r << w, w;
    out.t_weights.push_back(std::move(r));
  }
  out.variables = dp.variables;
  out.original_var_count = dp.original_var_count;
  out.edges = dp.edges;
  for (auto& e : out.edges) e.separator = realify_indices(e.separator, dp.order);
  out.holders = dp.holders;
  out.consensus_attached = dp.consensus_attached;
  return out;
}

template <typename Scalar>
double recompose_check(const DecomposedProblem<Scalar>& dp, const AffineForm<Scalar>& original,
                       std::span<const double> reference,
                       const std::vector<std::vector<double>>& copies) {
  using Dense = typename AffineForm<Scalar>::Dense;
  if (static_cast<int>(copies.size()) != dp.cliques()) {
    throw std::invalid_argument("need one variable vector per clique");
  }
  Dense sum = Dense::Zero(dp.order, dp.order);
  for (int k = 0; k < dp.cliques(); ++k) {
    const Dense local = dp.local_forms[k].evaluate(copies[k]);
    const auto& J = dp.indices[k];
    for (size_t a = 0; a < J.size(); ++a) {
      for (size_t b = 0; b < J.size(); ++b) sum(J[a], J[b]) += local(a, b);
    }
  }
  const Dense ref = original.evaluate(reference.subspan(0, original.var_count()));
  return dp.order == 0 ? 0.0 : (sum - ref).cwiseAbs().maxCoeff();
}

template <typename Scalar>
double recompose_check(const DecomposedProblem<Scalar>& dp, const AffineForm<Scalar>& original,
                       std::span<const double> values) {
  std::vector<std::vector<double>> copies(dp.cliques(),
                                          std::vector<double>(values.begin(), values.end()));
  return recompose_check(dp, original, values, copies);
}

#define NETIQC_DECOMP(S)                                                                        \
  template struct DecomposedProblem<S>;                                                          \
  template DecomposedProblem<S> split_form(const AffineForm<S>&, const CliqueTree&);            \
  template DecomposedProblem<S> attach_consensus(DecomposedProblem<S>);                          \
  template double recompose_check(const DecomposedProblem<S>&, const AffineForm<S>&,             \
                                  std::span<const double>,                                      \
                                  const std::vector<std::vector<double>>&);                     \
  template double recompose_check(const DecomposedProblem<S>&, const AffineForm<S>&,             \
                                  std::span<const double>);
NETIQC_DECOMP(double)
NETIQC_DECOMP(Complex)
#undef NETIQC_DECOMP

}  // namespace netiqc
