#pragma once

#include <span>
#include <vector>

#include "netiqc/affine_form.hpp"
#include "netiqc/chordal.hpp"

namespace netiqc {

/// Edge of the consensus tree. Clique-tree edges carry the separator and the
/// Z variables supported on it; `link` edges join the roots of a clique
/// forest and only carry shared-variable consensus.
struct ConsensusEdge {
  int parent = -1;
  int child = -1;
  std::vector<int> separator;  // global indices (same level as the local forms)
  std::vector<int> z_vars;     // global variable ids of Z on this edge
  bool link = false;
};

/// Clique-local splitting of an affine form. All local forms share the
/// global variable list (original variables, then Z variables); a local form
/// has a nonzero coefficient only for variables the clique actually uses.
template <typename Scalar>
struct DecomposedProblem {
  int order = 0;
  CliqueTree tree;
  std::vector<std::vector<int>> indices;        // per clique, sorted global indices
  std::vector<AffineForm<Scalar>> local_forms;  // order |indices[i]|
  std::vector<VectorXr> t_weights;              // identity split: sum_i embed(diag w_i) = I
  std::vector<Variable> variables;
  int original_var_count = 0;
  std::vector<ConsensusEdge> edges;             // empty until attach_consensus
  std::vector<std::vector<int>> holders;        // per variable, cliques keeping a copy
  bool consensus_attached = false;

  int cliques() const { return static_cast<int>(local_forms.size()); }
  int var_count() const { return static_cast<int>(variables.size()); }
  /// Tree neighbors of clique i in the consensus tree (edges incl. links).
  std::vector<int> neighbors(int i) const;
};

using HermitianDecomposition = DecomposedProblem<Complex>;
using SymmetricDecomposition = DecomposedProblem<double>;

/// Assigns every entry of the constant and of each coefficient to the
/// containing clique with the smallest postorder rank. Throws
/// std::invalid_argument for an entry outside every clique square.
template <typename Scalar>
DecomposedProblem<Scalar> split_form(const AffineForm<Scalar>& form, const CliqueTree& tree);

/// Adds free Z variables on every separator (parent carries -Z, child +Z),
/// links forest roots, and fixes which cliques hold copies of each variable:
/// the smallest subtree spanning the cliques that use it.
template <typename Scalar>
DecomposedProblem<Scalar> attach_consensus(DecomposedProblem<Scalar> dp);

/// Real embedding of a Hermitian decomposition: index j becomes the pair
/// (j, j + order); Hermitian Z variables become the matching real blocks.
SymmetricDecomposition realify(const HermitianDecomposition& dp);

/// max |sum_i embed(local_i(copies_i)) - original(reference)| over entries.
/// `copies[i]` is clique i's full variable vector (only held entries matter).
template <typename Scalar>
double recompose_check(const DecomposedProblem<Scalar>& dp, const AffineForm<Scalar>& original,
                       std::span<const double> reference,
                       const std::vector<std::vector<double>>& copies);

/// Same with every clique using `values` (original variables then Z).
template <typename Scalar>
double recompose_check(const DecomposedProblem<Scalar>& dp, const AffineForm<Scalar>& original,
                       std::span<const double> values);

}  // namespace netiqc
