#include "netiqc/lmi.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace netiqc {

std::vector<MultiplierParam> network_multipliers(const Network& net, double omega,
                                                 const MultiplierOptions& opts) {
  std::vector<MultiplierParam> out;
  out.reserve(net.size());
  for (const auto& u : net.uncertainty()) out.push_back(multiplier_for(u, omega, opts));
  return out;
}

namespace {

int multiplier_var_count(const std::vector<MultiplierParam>& params) {
  int n = 0;
  for (const auto& p : params) n += static_cast<int>(p.basis.size());
  return n;
}

// Pi_bar coefficient of one multiplier variable, on [p; q].
std::vector<MatrixXc> structured_coefficients(const HermitianAffineForm& pi) {
  std::vector<MatrixXc> out;
  for (int k = 0; k < pi.var_count(); ++k) out.emplace_back(MatrixXc(pi.coefficient(k)));
  return out;
}

}  // namespace

HermitianAffineForm build_sparse_lmi(const Network& net, double omega, XMode x_mode,
                                     const MultiplierOptions& opts) {
  const auto params = network_multipliers(net, omega, opts);
  const HermitianAffineForm pi = assemble_structured(params);
  const auto r = assemble_blocks(net, omega);
  const int d = net.total_d(), m = net.total_m();
  const int n = d + m;

  MatrixXc H = MatrixXc::Zero(2 * d, n);
  H.topLeftCorner(d, d) = r.pq;
  H.topRightCorner(d, m) = r.pw;
  H.bottomLeftCorner(d, d).setIdentity();

  const MatrixXc gamma = net.gamma().assembled().cast<Complex>();
  MatrixXc M(m, n);
  M << -gamma * r.zq, MatrixXc::Identity(m, m) - gamma * r.zw;

  std::vector<Variable> vars = pi.variables();
  const auto xform = interconnection_multiplier(net.gamma(), x_mode);
  for (const auto& v : xform.variables()) vars.push_back(v);
  HermitianAffineForm form(n, std::move(vars));

  const auto coefs = structured_coefficients(pi);
  for (size_t k = 0; k < coefs.size(); ++k) {
    form.add_term(static_cast<int>(k), MatrixXc(H.adjoint() * coefs[k] * H));
  }
  const int x0 = pi.var_count();
  if (m > 0) {
    if (x_mode == XMode::SharedScalar) {
      form.add_term(x0, MatrixXc(-(M.adjoint() * M)));
    } else {
      for (int row = 0; row < m; ++row) {
        const auto mr = M.row(row);
        form.add_term(x0 + row, MatrixXc(-(mr.adjoint() * mr)));
      }
    }
  }
  return form;
}

HermitianAffineForm build_lumped_lmi(const Network& net, double omega,
                                     const MultiplierOptions& opts) {
  const MatrixXc gbar = lumped_system(net, omega);
  const auto params = network_multipliers(net, omega, opts);
  const HermitianAffineForm pi = assemble_structured(params);
  const int d = net.total_d();
  MatrixXc L(2 * d, d);
  L << gbar, MatrixXc::Identity(d, d);
  HermitianAffineForm form(d, pi.variables());
  const auto coefs = structured_coefficients(pi);
  for (size_t k = 0; k < coefs.size(); ++k) {
    form.add_term(static_cast<int>(k), MatrixXc(L.adjoint() * coefs[k] * L));
  }
  return form;
}

MatrixXc x_matrix(const Network& net, XMode x_mode, std::span<const double> values) {
  const int m = net.total_m();
  const int k = multiplier_var_count(network_multipliers(net, 0.0));
  const int needed = m == 0 ? 0 : (x_mode == XMode::SharedScalar ? 1 : m);
  if (static_cast<int>(values.size()) < k + needed) {
    throw std::invalid_argument("variable vector too short for X");
  }
  MatrixXc X = MatrixXc::Zero(m, m);
  for (int r = 0; r < m; ++r) X(r, r) = values[x_mode == XMode::SharedScalar ? k : k + r];
  return X;
}

double CongruenceReport::max_deviation() const { return std::max({dev11, dev12, dev22}); }

CongruenceReport congruence_transform(const HermitianAffineForm& sparse_form, const Network& net,
                                      double omega, XMode x_mode, std::span<const double> values,
                                      const MultiplierOptions& opts) {
  const MatrixXc gbar = lumped_system(net, omega);  // throws when ill-posed
  const auto r = assemble_blocks(net, omega);
  const int d = net.total_d(), m = net.total_m(), n = d + m;
  if (sparse_form.order() != n) throw std::invalid_argument("form does not match the network");

  const MatrixXc gamma = net.gamma().assembled().cast<Complex>();
  const MatrixXc loop = MatrixXc::Identity(m, m) - gamma * r.zw;
  const MatrixXc K = m > 0 ? MatrixXc(loop.partialPivLu().solve(gamma * r.zq))
                           : MatrixXc::Zero(0, d);

  CongruenceReport rep;
  rep.T = MatrixXc::Identity(n, n);
  rep.T.bottomLeftCorner(m, d) = K;
  const MatrixXc F = sparse_form.evaluate(values);
  const MatrixXc TFT = rep.T.adjoint() * F * rep.T;
  rep.g11 = TFT.topLeftCorner(d, d);
  rep.g12 = TFT.topRightCorner(d, m);
  rep.g22 = TFT.bottomRightCorner(m, m);

  const auto params = network_multipliers(net, omega, opts);
  const int nmult = multiplier_var_count(params);
  const MatrixXc pi = assemble_structured(params).evaluate(values.subspan(0, nmult));
  const MatrixXc X = x_matrix(net, x_mode, values);

  MatrixXc L(2 * d, d), P(2 * d, m);
  L << gbar, MatrixXc::Identity(d, d);
  P << r.pw, MatrixXc::Zero(d, m);
  rep.lumped = L.adjoint() * pi * L;
  rep.formula12 = L.adjoint() * pi * P;
  rep.formula22 = P.adjoint() * pi * P - loop.adjoint() * X * loop;

  auto dev = [](const MatrixXc& a, const MatrixXc& b) {
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
  };
  rep.dev11 = dev(rep.g11, rep.lumped);
  rep.dev12 = dev(rep.g12, rep.formula12);
  rep.dev22 = dev(rep.g22, rep.formula22);
  if (d > 0) {
    rep.schur = rep.g22 - rep.g12.adjoint() * rep.g11.partialPivLu().solve(rep.g12);
  } else {
    rep.schur = rep.g22;
  }
  return rep;
}

SparsityPattern::SparsityPattern(int order) : order_(order), adj_(order) {}

void SparsityPattern::add(int r, int c) {
  if (r < 0 || c < 0 || r >= order_ || c >= order_) throw std::out_of_range("pattern index");
  if (r == c) return;
  auto ins = [](std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
  };
  ins(adj_[r], c);
  ins(adj_[c], r);
}

bool SparsityPattern::contains(int r, int c) const {
  if (r == c) return r >= 0 && r < order_;
  return std::binary_search(adj_.at(r).begin(), adj_.at(r).end(), c);
}

std::vector<std::pair<int, int>> SparsityPattern::entries() const {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < order_; ++r) {
    bool diag = false;
    for (int c : adj_[r]) {
      if (!diag && c > r) {
        out.emplace_back(r, r);
        diag = true;
      }
      out.emplace_back(r, c);
    }
    if (!diag) out.emplace_back(r, r);
  }
  return out;
}

long SparsityPattern::nonzeros() const {
  long n = order_;
  for (const auto& a : adj_) n += static_cast<long>(a.size());
  return n;
}

void SparsityPattern::write_coordinates(std::ostream& os) const {
  for (const auto& [r, c] : entries()) os << r << ' ' << c << '\n';
}

template <typename Scalar>
SparsityPattern pattern_of(const AffineForm<Scalar>& form) {
  SparsityPattern p(form.order());
  auto scan = [&](const typename AffineForm<Scalar>::Sparse& m) {
    for (int j = 0; j < m.outerSize(); ++j) {
      for (typename AffineForm<Scalar>::Sparse::InnerIterator it(m, j); it; ++it) {
        p.add(static_cast<int>(it.row()), static_cast<int>(it.col()));
      }
    }
  };
  scan(form.constant());
  for (int k = 0; k < form.var_count(); ++k) scan(form.coefficient(k));
  return p;
}

template SparsityPattern pattern_of(const AffineForm<double>&);
template SparsityPattern pattern_of(const AffineForm<Complex>&);

}  // namespace netiqc
