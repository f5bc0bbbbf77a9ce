#include "netiqc/iqc.hpp"

#include <cmath>
#include <stdexcept>

namespace netiqc {

void UncertaintyBlock::validate() const {
  if (dim <= 0) throw std::invalid_argument("uncertainty dimension must be positive");
  switch (kind) {
    case UncertaintyKind::NormBoundedLTIScalar:
    case UncertaintyKind::NormBoundedLTIFullBlock:
      if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw std::invalid_argument("norm bound must be positive and finite");
      }
      break;
    case UncertaintyKind::SectorBoundedStatic:
      if (!(alpha < beta)) throw std::invalid_argument("sector needs alpha < beta");
      if (alpha * beta > 0.0) {
        // tau * Delta leaves the sector for small tau unless 0 is inside it
        throw std::invalid_argument("unsupported sector: [alpha, beta] must contain 0");
      }
      break;
  }
}

std::string to_string(UncertaintyKind kind) {
  switch (kind) {
    case UncertaintyKind::NormBoundedLTIScalar: return "normbounded";
    case UncertaintyKind::NormBoundedLTIFullBlock: return "fullblock";
    case UncertaintyKind::SectorBoundedStatic: return "sector";
  }
  return "?";
}

std::string to_string(XMode mode) {
  return mode == XMode::SharedScalar ? "scalar" : "diag";
}

MatrixXc MultiplierParam::evaluate(std::span<const double> values) const {
  if (values.size() != basis.size()) throw std::invalid_argument("wrong number of values");
  MatrixXc pi = MatrixXc::Zero(2 * dim, 2 * dim);
  for (size_t b = 0; b < basis.size(); ++b) {
    const auto& B = basis[b];
    pi.topLeftCorner(dim, dim) += values[b] * B.p11;
    pi.topRightCorner(dim, dim) += values[b] * B.p12;
    pi.bottomLeftCorner(dim, dim) += values[b] * B.p12.adjoint();
    pi.bottomRightCorner(dim, dim) += values[b] * B.p22;
  }
  return pi;
}

MultiplierParam multiplier_for(const UncertaintyBlock& block, double /*omega*/,
                               const MultiplierOptions& opts) {
  block.validate();
  if (!(opts.floor > 0.0) || !(opts.floor <= opts.ceiling)) {
    throw std::invalid_argument("multiplier box must satisfy 0 < floor <= ceiling");
  }
  const int d = block.dim;
  const MatrixXc I = MatrixXc::Identity(d, d);
  MultiplierParam out;
  out.dim = d;
  out.cone = MultiplierCone::Nonnegative;
  out.variables.push_back({"lambda", opts.floor, opts.ceiling});
  switch (block.kind) {
    case UncertaintyKind::NormBoundedLTIScalar:
    case UncertaintyKind::NormBoundedLTIFullBlock: {
      const double g2 = block.bound * block.bound;
      out.basis.push_back({g2 * I, MatrixXc::Zero(d, d), -I});
      break;
    }
    case UncertaintyKind::SectorBoundedStatic: {
      const double a = block.alpha, b = block.beta;
      out.basis.push_back({-a * b * I, 0.5 * (a + b) * I, -I});
      break;
    }
  }
  return out;
}

HermitianAffineForm assemble_structured(const std::vector<MultiplierParam>& params) {
  int total = 0;
  std::vector<Variable> vars;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.basis.size() != p.variables.size()) {
      throw std::invalid_argument("multiplier basis/variable count mismatch");
    }
    for (const auto& b : p.basis) {
      if (b.p11.rows() != p.dim || b.p11.cols() != p.dim || b.p12.rows() != p.dim ||
          b.p12.cols() != p.dim || b.p22.rows() != p.dim || b.p22.cols() != p.dim) {
        throw std::invalid_argument("multiplier basis has inconsistent dimensions");
      }
    }
    for (const auto& v : p.variables) {
      vars.push_back({v.name + "[" + std::to_string(i + 1) + "]", v.lower, v.upper});
    }
    total += p.dim;
  }
  HermitianAffineForm form(2 * total, std::move(vars));
  int offset = 0, var = 0;
  for (const auto& p : params) {
    for (const auto& b : p.basis) {
      MatrixXc coef = MatrixXc::Zero(2 * total, 2 * total);
      coef.block(offset, offset, p.dim, p.dim) = b.p11;
      coef.block(offset, total + offset, p.dim, p.dim) = b.p12;
      coef.block(total + offset, offset, p.dim, p.dim) = b.p12.adjoint();
      coef.block(total + offset, total + offset, p.dim, p.dim) = b.p22;
      form.add_term(var++, coef);
    }
    offset += p.dim;
  }
  return form;
}

HermitianAffineForm interconnection_multiplier(const MatrixXr& gamma, XMode mode,
                                               double x_upper) {
  const auto m = gamma.rows(), l = gamma.cols();
  std::vector<Variable> vars;
  if (mode == XMode::SharedScalar) {
    vars.push_back({"x", 0.0, x_upper});
  } else {
    for (Eigen::Index r = 0; r < m; ++r) {
      vars.push_back({"x[" + std::to_string(r + 1) + "]", 0.0, x_upper});
    }
  }
  const int n = static_cast<int>(l + m);
  HermitianAffineForm form(n, std::move(vars));
  auto add = [&](int var, const MatrixXr& X) {
    MatrixXr coef(n, n);
    coef << -gamma.transpose() * X * gamma, gamma.transpose() * X, X * gamma, -X;
    form.add_term(var, MatrixXc(coef.cast<Complex>()));
  };
  if (mode == XMode::SharedScalar) {
    if (m > 0) add(0, MatrixXr::Identity(m, m));
  } else {
    for (Eigen::Index r = 0; r < m; ++r) {
      MatrixXr X = MatrixXr::Zero(m, m);
      X(r, r) = 1.0;
      add(static_cast<int>(r), X);
    }
  }
  return form;
}

HermitianAffineForm interconnection_multiplier(const Interconnection& gamma, XMode mode,
                                               double x_upper) {
  return interconnection_multiplier(gamma.assembled(), mode, x_upper);
}

}  // namespace netiqc
