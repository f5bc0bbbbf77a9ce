#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "netiqc/affine_form.hpp"
#include "netiqc/iqc.hpp"
#include "netiqc/netmodel.hpp"

namespace netiqc {

/// Multiplier parameterization shared by every subsystem of a network.
std::vector<MultiplierParam> network_multipliers(const Network& net, double omega,
                                                 const MultiplierOptions& opts = {});

/// Sparse analysis LMI on the stacking [q; w] (order sum(d) + sum(m)):
///   [Gpq Gpw; I 0]^* Pi_bar [Gpq Gpw; I 0] - M^* X M,  M = [-Gamma Gzq, I - Gamma Gzw].
/// Variables: one block per subsystem multiplier, then the x variable(s).
/// Well-posedness is not required.
HermitianAffineForm build_sparse_lmi(const Network& net, double omega, XMode x_mode,
                                     const MultiplierOptions& opts = {});

/// Lumped LMI [G_bar; I]^* Pi_bar [G_bar; I] of order sum(d); same multiplier
/// variables as build_sparse_lmi, no x. Throws IllPosedError.
HermitianAffineForm build_lumped_lmi(const Network& net, double omega,
                                     const MultiplierOptions& opts = {});

/// X evaluated from the x part of a sparse-LMI variable vector.
MatrixXc x_matrix(const Network& net, XMode x_mode, std::span<const double> values);

/// Blocks of T^* F T with T = [I 0; K I], K = (I - Gamma Gzw)^{-1} Gamma Gzq,
/// next to the closed-form expressions they must equal.
struct CongruenceReport {
  MatrixXc T;
  MatrixXc g11, g12, g22;                 // blocks of T^* F T
  MatrixXc lumped, formula12, formula22;  // closed forms
  MatrixXc schur;                         // g22 - g12^* g11^{-1} g12
  double dev11 = 0.0, dev12 = 0.0, dev22 = 0.0;

  double max_deviation() const;
};

/// `values` is a variable vector of `sparse_form` (as built by build_sparse_lmi
/// for the same network, frequency and x_mode). Throws IllPosedError.
CongruenceReport congruence_transform(const HermitianAffineForm& sparse_form, const Network& net,
                                      double omega, XMode x_mode, std::span<const double> values,
                                      const MultiplierOptions& opts = {});

/// Symmetric support pattern, diagonal always present.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  explicit SparsityPattern(int order);

  int order() const { return order_; }
  void add(int r, int c);  // also adds (c, r)
  bool contains(int r, int c) const;
  /// Sorted (row, col) pairs over both triangles.
  std::vector<std::pair<int, int>> entries() const;
  long nonzeros() const;
  /// Off-diagonal neighbor lists.
  const std::vector<std::vector<int>>& neighbors() const { return adj_; }

  /// "row col" per line, 0-based, row-major order.
  void write_coordinates(std::ostream& os) const;

 private:
  int order_ = 0;
  std::vector<std::vector<int>> adj_;  // sorted
};

template <typename Scalar>
SparsityPattern pattern_of(const AffineForm<Scalar>& form);

}  // namespace netiqc
