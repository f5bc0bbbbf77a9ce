#include "netiqc/affine_form.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netiqc {

namespace {

template <typename Scalar>
double max_abs(const Eigen::SparseMatrix<Scalar>& m) {
  double out = 0.0;
  for (int j = 0; j < m.outerSize(); ++j) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(m, j); it; ++it) {
      out = std::max(out, std::abs(it.value()));
    }
  }
  return out;
}

}  // namespace

template <typename Scalar>
AffineForm<Scalar>::AffineForm(int order, std::vector<Variable> variables)
    : order_(order), variables_(std::move(variables)), constant_(order, order) {
  if (order < 0) throw std::invalid_argument("affine form order must be nonnegative");
  for (const auto& v : variables_) {
    if (!(v.lower <= v.upper)) {
      throw std::invalid_argument("variable '" + v.name + "' has an empty interval");
    }
  }
  terms_.assign(variables_.size(), Sparse(order, order));
}

template <typename Scalar>
int AffineForm<Scalar>::add_variable(Variable v) {
  if (!(v.lower <= v.upper)) {
    throw std::invalid_argument("variable '" + v.name + "' has an empty interval");
  }
  variables_.push_back(std::move(v));
  terms_.emplace_back(order_, order_);
  return var_count() - 1;
}

template <typename Scalar>
typename AffineForm<Scalar>::Sparse AffineForm<Scalar>::checked(const Sparse& m) const {
  if (m.rows() != order_ || m.cols() != order_) {
    throw std::invalid_argument("coefficient has size " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", form order is " +
                                std::to_string(order_));
  }
  Sparse adj = m.adjoint();
  const double scale = std::max(1.0, max_abs(m));
  Sparse diff = m - adj;
  if (max_abs(diff) > 1e-12 * scale) {
    throw std::invalid_argument(std::string("coefficient is not ") + ScalarTraits<Scalar>::name);
  }
  Sparse sym = (m + adj) * Scalar(0.5);
  sym.prune(Scalar(0), 0.0);
  sym.makeCompressed();
  return sym;
}

template <typename Scalar>
void AffineForm<Scalar>::add_constant(const Sparse& m) {
  constant_ += checked(m);
  constant_.prune(Scalar(0), 0.0);
}

template <typename Scalar>
void AffineForm<Scalar>::add_term(int var, const Sparse& m) {
  auto& t = terms_.at(var);
  t += checked(m);
  t.prune(Scalar(0), 0.0);
}

template <typename Scalar>
void AffineForm<Scalar>::add_constant(const Dense& m) {
  add_constant(Sparse(m.sparseView(Scalar(0), 0.0)));
}

template <typename Scalar>
void AffineForm<Scalar>::add_term(int var, const Dense& m) {
  add_term(var, Sparse(m.sparseView(Scalar(0), 0.0)));
}

template <typename Scalar>
typename AffineForm<Scalar>::Dense AffineForm<Scalar>::evaluate(
    std::span<const double> values) const {
  if (static_cast<int>(values.size()) != var_count()) {
    throw std::invalid_argument("expected " + std::to_string(var_count()) +
                                " variable values, got " + std::to_string(values.size()));
  }
  Dense out = Dense(constant_);
  for (int k = 0; k < var_count(); ++k) {
    if (values[k] != 0.0 && terms_[k].nonZeros() > 0) out += Scalar(values[k]) * Dense(terms_[k]);
  }
  return out;
}

template <typename Scalar>
double AffineForm<Scalar>::max_coefficient_magnitude() const {
  double out = max_abs(constant_);
  for (const auto& t : terms_) out = std::max(out, max_abs(t));
  return out;
}

template <typename Scalar>
AffineForm<Scalar> AffineForm<Scalar>::restrict_to(std::span<const int> indices) const {
  const int n = static_cast<int>(indices.size());
  std::vector<int> local(order_, -1);
  for (int i = 0; i < n; ++i) local.at(indices[i]) = i;
  auto take = [&](const Sparse& m) {
    std::vector<Eigen::Triplet<Scalar>> trips;
    for (int j = 0; j < m.outerSize(); ++j) {
      for (typename Sparse::InnerIterator it(m, j); it; ++it) {
        const int r = local[it.row()], c = local[it.col()];
        if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
      }
    }
    Sparse out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  };
  AffineForm out(n, variables_);
  out.constant_ = take(constant_);
  for (int k = 0; k < var_count(); ++k) out.terms_[k] = take(terms_[k]);
  return out;
}

template class AffineForm<double>;
template class AffineForm<Complex>;

template <typename Scalar>
Eigen::SparseMatrix<Scalar> embed(const Eigen::SparseMatrix<Scalar>& local,
                                  std::span<const int> indices, int order) {
  std::vector<Eigen::Triplet<Scalar>> trips;
  trips.reserve(local.nonZeros());
  for (int j = 0; j < local.outerSize(); ++j) {
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(local, j); it; ++it) {
      trips.emplace_back(indices[it.row()], indices[it.col()], it.value());
    }
  }
  Eigen::SparseMatrix<Scalar> out(order, order);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

template Eigen::SparseMatrix<double> embed(const Eigen::SparseMatrix<double>&,
                                           std::span<const int>, int);
template Eigen::SparseMatrix<Complex> embed(const Eigen::SparseMatrix<Complex>&,
                                            std::span<const int>, int);

namespace {

Eigen::SparseMatrix<double> realify_sparse(const Eigen::SparseMatrix<Complex>& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * m.nonZeros());
  for (int j = 0; j < m.outerSize(); ++j) {
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(m, j); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      const double re = it.value().real(), im = it.value().imag();
      if (re != 0.0) {
        trips.emplace_back(r, c, re);
        trips.emplace_back(n + r, n + c, re);
      }
      if (im != 0.0) {
        trips.emplace_back(r, n + c, -im);
        trips.emplace_back(n + r, c, im);
      }
    }
  }
  Eigen::SparseMatrix<double> out(2 * n, 2 * n);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

SymmetricAffineForm realify(const HermitianAffineForm& form) {
  SymmetricAffineForm out(2 * form.order(), form.variables());
  out.add_constant(realify_sparse(form.constant()));
  for (int k = 0; k < form.var_count(); ++k) {
    if (form.has_term(k)) out.add_term(k, realify_sparse(form.coefficient(k)));
  }
  return out;
}

MatrixXr realify(const MatrixXc& m) {
  const Eigen::Index n = m.rows();
  MatrixXr out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = m.real();
  out.topRightCorner(n, n) = -m.imag();
  out.bottomLeftCorner(n, n) = m.imag();
  out.bottomRightCorner(n, n) = m.real();
  return out;
}

}  // namespace netiqc
