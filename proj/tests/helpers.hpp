#pragma once

// Shared fixtures and independent oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "netiqc/analysis.hpp"

namespace testing {

using namespace netiqc;

/// Single subsystem a/(s+1) with a unit-bound scalar uncertainty and no ports.
inline Network first_order(double a, double bound = 1.0) {
  MatrixXr A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << -1.0;
  B << 1.0;
  C << a;
  D << 0.0;
  Subsystem s("g", 1, 0, 0, StateSpace(A, B, C, D));
  return Network({s}, Interconnection({0}, {0}), {UncertaintyBlock::norm_bounded(1, bound)});
}

inline MatrixXr random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixXr m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  }
  return 0.5 * (m + m.transpose());
}

/// Random stable subsystem: d = 1, m and l in {1, 2}, one or two states.
inline Subsystem random_subsystem(std::mt19937_64& rng, const std::string& name) {
  std::uniform_int_distribution<int> ports(1, 2), states(1, 2);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> pole(0.5, 2.0);
  const int m = ports(rng), l = ports(rng), n = states(rng);
  MatrixXr A = MatrixXr::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = -pole(rng);
  if (n == 2) A(0, 1) = 0.5 * nd(rng);
  MatrixXr B(n, 1 + m), C(1 + l, n), D = MatrixXr::Zero(1 + l, 1 + m);
  for (int i = 0; i < B.size(); ++i) B.data()[i] = nd(rng);
  for (int i = 0; i < C.size(); ++i) C.data()[i] = nd(rng);
  // small feedthrough on the interconnection channel keeps the loop well posed
  for (int i = 1; i < 1 + l; ++i) {
    for (int j = 1; j < 1 + m; ++j) D(i, j) = 0.1 * nd(rng);
  }
  return Subsystem(name, 1, m, l, StateSpace(A, B, C, D));
}

/// Random network of n subsystems; every input is fed by a random output with
/// probability 0.8. All uncertainty bounds equal `bound`.
inline Network random_network(std::mt19937_64& rng, int n, double bound = 1.0) {
  std::vector<Subsystem> subs;
  std::vector<int> m, l;
  for (int i = 0; i < n; ++i) {
    subs.push_back(random_subsystem(rng, "s" + std::to_string(i + 1)));
    m.push_back(subs.back().m());
    l.push_back(subs.back().l());
  }
  Interconnection gamma(m, l);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m[i]; ++k) {
      if (u(rng) > 0.8) continue;
      const int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
      const int r = std::uniform_int_distribution<int>(0, l[j] - 1)(rng);
      gamma.connect(j, r, i, k);
    }
  }
  return Network(subs, gamma, std::vector<UncertaintyBlock>(n, UncertaintyBlock::norm_bounded(1, bound)));
}

inline Network with_bound(const Network& net, double bound) {
  std::vector<UncertaintyBlock> u(net.size(), UncertaintyBlock::norm_bounded(1, bound));
  return Network(net.subsystems(), net.gamma(), u);
}

/// Independent projection onto the NSD cone via Eigen's solver.
inline MatrixXr oracle_project_nsd(const MatrixXr& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(m);
  const VectorXr d = es.eigenvalues().cwiseMin(0.0);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

inline double oracle_max_eig(const MatrixXr& m) {
  if (m.rows() == 0) return -kInf;
  Eigen::SelfAdjointEigenSolver<MatrixXr> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline double oracle_max_eig(const MatrixXc& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Bron–Kerbosch with pivoting: all maximal cliques, sorted.
inline std::vector<std::vector<int>> brute_force_cliques(const Graph& g) {
  std::vector<std::vector<int>> out;
  std::vector<int> R;
  auto adj = [&](int u, int v) { return g.has_edge(u, v); };
  std::function<void(std::vector<int>, std::vector<int>)> bk = [&](std::vector<int> P,
                                                                    std::vector<int> X) {
    if (P.empty() && X.empty()) {
      auto c = R;
      std::sort(c.begin(), c.end());
      out.push_back(c);
      return;
    }
    int pivot = P.empty() ? X.front() : P.front();
    std::vector<int> cand;
    for (int v : P) {
      if (!adj(pivot, v)) cand.push_back(v);
    }
    for (int v : cand) {
      std::vector<int> P2, X2;
      for (int u : P) {
        if (adj(v, u)) P2.push_back(u);
      }
      for (int u : X) {
        if (adj(v, u)) X2.push_back(u);
      }
      R.push_back(v);
      bk(P2, X2);
      R.pop_back();
      P.erase(std::find(P.begin(), P.end(), v));
      X.push_back(v);
    }
  };
  std::vector<int> all(g.size());
  for (int i = 0; i < g.size(); ++i) all[i] = i;
  bk(all, {});
  std::sort(out.begin(), out.end());
  return out;
}

/// Random sparse pattern: each pair present with probability p.
inline SparsityPattern random_pattern(std::mt19937_64& rng, int n, double p) {
  SparsityPattern s(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < p) s.add(i, j);
    }
  }
  return s;
}

inline SparsityPattern band_pattern(int n, int w) {
  SparsityPattern s(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= std::min(n - 1, i + w); ++j) s.add(i, j);
  }
  return s;
}

/// Reference assembly: the full stacked product with diag(Pi_bar, Pi_hat).
inline MatrixXc big_product_lmi(const Network& net, double omega, XMode mode,
                                const std::vector<double>& values) {
  const auto r = assemble_blocks(net, omega);
  const int d = net.total_d(), m = net.total_m(), l = net.total_l();
  const int n = d + m;
  MatrixXc big = MatrixXc::Zero(2 * d + l + m, n);
  big.block(0, 0, d, d) = r.pq;
  big.block(0, d, d, m) = r.pw;
  big.block(d, 0, d, d).setIdentity();
  big.block(2 * d, 0, l, d) = r.zq;
  big.block(2 * d, d, l, m) = r.zw;
  big.block(2 * d + l, d, m, m).setIdentity();
  const auto params = network_multipliers(net, omega);
  const auto pi = assemble_structured(params);
  const auto pihat = interconnection_multiplier(net.gamma(), mode);
  const std::vector<double> vp(values.begin(), values.begin() + pi.var_count());
  const std::vector<double> vx(values.begin() + pi.var_count(), values.end());
  MatrixXc mult = MatrixXc::Zero(2 * d + l + m, 2 * d + l + m);
  mult.topLeftCorner(2 * d, 2 * d) = pi.evaluate(vp);
  mult.bottomRightCorner(l + m, l + m) = pihat.evaluate(vx);
  return big.adjoint() * mult * big;
}

inline std::vector<double> random_values(std::mt19937_64& rng, const std::vector<Variable>& vars) {
  std::vector<double> v;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (const auto& var : vars) {
    if (std::isfinite(var.lower) && std::isfinite(var.upper)) {
      v.push_back(std::uniform_real_distribution<double>(var.lower, var.upper)(rng));
    } else {
      v.push_back(nd(rng));
    }
  }
  return v;
}

}  // namespace testing
