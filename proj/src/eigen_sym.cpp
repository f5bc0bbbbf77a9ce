#include "netiqc/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace netiqc {

namespace {

void check_symmetric(const MatrixXr& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
  if (m.size() == 0) return;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}

double off_diagonal_norm2(const MatrixXr& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return s;
}

}  // namespace

SymmetricEigen eig_sym(const MatrixXr& m) {
  check_symmetric(m);
  const Eigen::Index n = m.rows();
  MatrixXr a = 0.5 * (m + m.transpose());
  MatrixXr v = MatrixXr::Identity(n, n);
  const double total = a.squaredNorm();
  const double stop = total * 1e-32;

  for (int sweep = 0; sweep < 100 && off_diagonal_norm2(a) > stop; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing a(p, q): tan(phi) = t with the smaller root.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{VectorXr(n), MatrixXr(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  return out;
}

namespace {

template <typename Clamp>
MatrixXr project(const MatrixXr& m, Clamp clamp) {
  if (m.rows() <= kJacobiMaxOrder) {
    const auto e = eig_sym(m);
    const VectorXr d = e.values.unaryExpr(clamp);
    return e.vectors * d.asDiagonal() * e.vectors.transpose();
  }
  check_symmetric(m);
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(m);
  const VectorXr d = es.eigenvalues().unaryExpr(clamp);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

MatrixXr project_nsd(const MatrixXr& m) {
  MatrixXr out = project(m, [](double x) { return std::min(x, 0.0); });
  return 0.5 * (out + out.transpose());
}

MatrixXr project_psd(const MatrixXr& m) {
  MatrixXr out = project(m, [](double x) { return std::max(x, 0.0); });
  return 0.5 * (out + out.transpose());
}

double max_eigenvalue(const MatrixXr& m) {
  if (m.rows() == 0) return -kInf;
  if (m.rows() <= kJacobiMaxOrder) return eig_sym(m).values.maxCoeff();
  check_symmetric(m);
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace netiqc
