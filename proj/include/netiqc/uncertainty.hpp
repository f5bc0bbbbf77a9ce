#pragma once

#include <string>

namespace netiqc {

enum class UncertaintyKind {
  NormBoundedLTIScalar,    // repeated scalar delta * I_d, |delta| <= bound
  NormBoundedLTIFullBlock, // unstructured d x d block, ||Delta|| <= bound
  SectorBoundedStatic,     // static nonlinearity in the sector [alpha, beta]
};

/// Uncertainty descriptor of one subsystem channel q = Delta(p), dim d.
struct UncertaintyBlock {
  UncertaintyKind kind = UncertaintyKind::NormBoundedLTIScalar;
  int dim = 1;
  double bound = 1.0;  // gain bound for the norm-bounded kinds
  double alpha = 0.0;  // sector endpoints
  double beta = 1.0;

  static UncertaintyBlock norm_bounded(int dim, double bound) {
    return {UncertaintyKind::NormBoundedLTIScalar, dim, bound, 0.0, 0.0};
  }
  static UncertaintyBlock full_block(int dim, double bound) {
    return {UncertaintyKind::NormBoundedLTIFullBlock, dim, bound, 0.0, 0.0};
  }
  static UncertaintyBlock sector(int dim, double alpha, double beta) {
    return {UncertaintyKind::SectorBoundedStatic, dim, 0.0, alpha, beta};
  }

  bool is_norm_bounded() const { return kind != UncertaintyKind::SectorBoundedStatic; }

  /// Throws std::invalid_argument when the descriptor is not admissible.
  void validate() const;
};

std::string to_string(UncertaintyKind kind);

}  // namespace netiqc
