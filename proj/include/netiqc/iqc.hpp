#pragma once

#include <span>
#include <vector>

#include "netiqc/affine_form.hpp"
#include "netiqc/netmodel.hpp"
#include "netiqc/uncertainty.hpp"

namespace netiqc {

/// Coefficient triple of one multiplier variable: Pi = [P11, P12; P12^*, P22].
struct MultiplierBasis {
  MatrixXc p11, p12, p22;
};

enum class MultiplierCone { Nonnegative, PSDBlock };

/// Affine parameterization of a subsystem multiplier Pi(v) = sum_b v_b Pi_b.
struct MultiplierParam {
  int dim = 0;
  std::vector<MultiplierBasis> basis;
  std::vector<Variable> variables;
  MultiplierCone cone = MultiplierCone::Nonnegative;

  /// Dense 2d x 2d multiplier at the given variable values.
  MatrixXc evaluate(std::span<const double> values) const;
};

/// Box for multiplier scale variables. The lower bound stays strictly
/// positive: the LMIs are homogeneous and lambda = 0 gives a trivially
/// singular matrix, which would hide infeasibility.
struct MultiplierOptions {
  double floor = 1e-3;
  double ceiling = 1.0;
};

/// Static multiplier for one uncertainty block. Every kind uses a single
/// nonnegative scale lambda:
///   norm bounded (scalar or full block):  lambda [g^2 I, 0; 0, -I]
///   sector [a, b]:                        lambda [-ab I, (a+b)/2 I; (a+b)/2 I, -I]
/// `omega` is accepted for interface symmetry with dynamic multipliers.
MultiplierParam multiplier_for(const UncertaintyBlock& block, double omega,
                               const MultiplierOptions& opts = {});

/// Structured multiplier Pi_bar as a Hermitian form of order 2*sum(d) on the
/// stacking [p_1 .. p_N, q_1 .. q_N]; Pi_bar_11, Pi_bar_12, Pi_bar_22 are
/// block diagonal. Variables are concatenated in subsystem order.
HermitianAffineForm assemble_structured(const std::vector<MultiplierParam>& params);

enum class XMode { SharedScalar, Diagonal };

/// Interconnection multiplier [-G^T X G, G^T X; X G, -X] on the stacking
/// [z; w], with X = x I (SharedScalar) or X = diag(x_1..x_m) (Diagonal).
HermitianAffineForm interconnection_multiplier(const MatrixXr& gamma, XMode mode,
                                               double x_upper = 1.0);
HermitianAffineForm interconnection_multiplier(const Interconnection& gamma, XMode mode,
                                               double x_upper = 1.0);

std::string to_string(XMode mode);

}  // namespace netiqc
