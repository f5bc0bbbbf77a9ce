#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace netiqc {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using MatrixXr = Eigen::MatrixXd;
using VectorXr = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A real decision variable of an affine matrix form together with its
/// admissible interval. Free variables carry infinite bounds.
struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;

  bool bounded_below() const { return lower > -kInf; }
  bool bounded_above() const { return upper < kInf; }
  bool has_box() const { return bounded_below() || bounded_above(); }
  double clamp(double v) const { return v < lower ? lower : (v > upper ? upper : v); }
};

template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static double conj(double v) { return v; }
  static double real(double v) { return v; }
  static constexpr const char* name = "real symmetric";
};

template <>
struct ScalarTraits<Complex> {
  static Complex conj(Complex v) { return std::conj(v); }
  static double real(Complex v) { return v.real(); }
  static constexpr const char* name = "Hermitian";
};

/// Sparse affine map  v -> F0 + sum_k v_k F_k  from real variables to
/// Hermitian (or real symmetric) matrices of a fixed order.
///
/// Coefficients are stored with both triangles present. Every matrix added
/// to the form is checked for Hermitian symmetry and then symmetrized
/// exactly; exact zeros are dropped so the stored supports are structural.
template <typename Scalar>
class AffineForm {
 public:
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Sparse = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;

  AffineForm() = default;
  AffineForm(int order, std::vector<Variable> variables);

  int order() const { return order_; }
  int var_count() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int k) const { return variables_.at(k); }

  const Sparse& constant() const { return constant_; }
  const Sparse& coefficient(int var) const { return terms_.at(var); }
  bool has_term(int var) const { return terms_.at(var).nonZeros() > 0; }

  void add_constant(const Dense& m);
  void add_term(int var, const Dense& m);
  void add_constant(const Sparse& m);
  void add_term(int var, const Sparse& m);

  /// Appends a variable with an empty coefficient; returns its index.
  int add_variable(Variable v);

  Dense evaluate(std::span<const double> values) const;

  /// Largest |entry| over the constant and every coefficient.
  double max_coefficient_magnitude() const;

  /// Restriction to the principal submatrix on `indices` (sorted, unique).
  AffineForm restrict_to(std::span<const int> indices) const;

 private:
  Sparse checked(const Sparse& m) const;

  int order_ = 0;
  std::vector<Variable> variables_;
  Sparse constant_;
  std::vector<Sparse> terms_;
};

using HermitianAffineForm = AffineForm<Complex>;
using SymmetricAffineForm = AffineForm<double>;

extern template class AffineForm<double>;
extern template class AffineForm<Complex>;

/// Real symmetric embedding [Re A, -Im A; Im A, Re A] of a Hermitian form.
/// Complex index k maps to the real pair (k, order + k).
SymmetricAffineForm realify(const HermitianAffineForm& form);

/// Real symmetric embedding of a dense Hermitian matrix.
MatrixXr realify(const MatrixXc& m);

/// Embeds a matrix of order `indices.size()` into `order` at rows/cols `indices`.
template <typename Scalar>
Eigen::SparseMatrix<Scalar> embed(const Eigen::SparseMatrix<Scalar>& local,
                                  std::span<const int> indices, int order);

}  // namespace netiqc
