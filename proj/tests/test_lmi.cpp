#include <doctest.h>

#include <sstream>

#include "helpers.hpp"

using namespace netiqc;

namespace {

double rel_diff(const MatrixXc& a, const MatrixXc& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// [G; I]^* Pi_bar [G; I] from the lumped response, independent of build_lumped_lmi.
MatrixXc lumped_oracle(const Network& net, double omega, std::span<const double> lambda) {
  const MatrixXc G = lumped_system(net, omega);
  const int d = net.total_d();
  MatrixXc S(2 * d, d);
  S << G, MatrixXc::Identity(d, d);
  const auto pi = assemble_structured(network_multipliers(net, omega));
  return S.adjoint() * pi.evaluate(lambda) * S;
}

}  // namespace

TEST_CASE("sparse LMI equals the stacked product with both multipliers") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = testing::random_network(rng, 2 + trial % 4);
    for (XMode mode : {XMode::SharedScalar, XMode::Diagonal}) {
      const double w = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
      const auto form = build_sparse_lmi(net, w, mode);
      CHECK(form.order() == net.total_d() + net.total_m());
      const auto vals = testing::random_values(rng, form.variables());
      CHECK(rel_diff(form.evaluate(vals), testing::big_product_lmi(net, w, mode, vals)) < 1e-12);
    }
  }
}

TEST_CASE("lumped LMI of a scalar loop") {
  for (double a : {0.5, 1.5}) {
    const auto net = testing::first_order(a, 1.0);
    for (double w : {0.0, 1.0, 3.0}) {
      const auto form = build_lumped_lmi(net, w);
      REQUIRE(form.order() == 1);
      // lambda (|a / (1 + jw)|^2 - 1)
      const double g2 = a * a / (1.0 + w * w);
      const MatrixXc m = form.evaluate(std::vector<double>{0.7});
      CHECK(m(0, 0).real() == doctest::Approx(0.7 * (g2 - 1.0)).epsilon(1e-14));
    }
  }
}

TEST_CASE("without interconnections the sparse LMI is the lumped one plus -X(I)") {
  const auto net = testing::first_order(0.8, 1.5);
  const auto sparse = build_sparse_lmi(net, 0.3, XMode::SharedScalar);
  const auto lumped = build_lumped_lmi(net, 0.3);
  REQUIRE(sparse.order() == lumped.order());
  std::vector<double> v = {0.4};
  std::vector<double> vs = v;
  vs.resize(sparse.var_count(), 0.5);
  CHECK(rel_diff(sparse.evaluate(vs), lumped.evaluate(v)) < 1e-14);
  CHECK(rel_diff(lumped.evaluate(v), lumped_oracle(net, 0.3, v)) < 1e-14);
}

TEST_CASE("congruence with T = [I 0; K I] exposes the lumped LMI") {
  std::mt19937_64 rng(17);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = testing::random_network(rng, 2 + trial % 4);
    const double w = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
    if (!check_wellposed(net, w).wellposed) continue;
    const XMode mode = trial % 2 ? XMode::Diagonal : XMode::SharedScalar;
    const auto form = build_sparse_lmi(net, w, mode);
    const auto vals = testing::random_values(rng, form.variables());
    const auto rep = congruence_transform(form, net, w, mode, vals);
    CHECK(rep.max_deviation() < 1e-10);

    // Independent recomputation of T^* F T.
    const auto r = assemble_blocks(net, w);
    const MatrixXr G = net.gamma().assembled();
    const int d = net.total_d(), m = net.total_m();
    const MatrixXc IGz = MatrixXc::Identity(m, m) - G * r.zw;
    const MatrixXc K = IGz.partialPivLu().solve(G * r.zq);
    MatrixXc T = MatrixXc::Identity(d + m, d + m);
    T.block(d, 0, m, d) = K;
    const MatrixXc TFT = T.adjoint() * form.evaluate(vals) * T;
    const std::vector<double> lam(vals.begin(), vals.begin() + net.size());
    CHECK(rel_diff(TFT.topLeftCorner(d, d), lumped_oracle(net, w, lam)) < 1e-10);
    CHECK(rel_diff(TFT, [&] {
            MatrixXc full(d + m, d + m);
            full << rep.g11, rep.g12, rep.g12.adjoint(), rep.g22;
            return full;
          }()) < 1e-10);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("sparse LMI is negative definite exactly when its Schur pieces are") {
  std::mt19937_64 rng(23);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = testing::with_bound(testing::random_network(rng, 3), 0.3);
    const double w = 0.5;
    if (!check_wellposed(net, w).wellposed) continue;
    const auto form = build_sparse_lmi(net, w, XMode::SharedScalar);
    for (double x = 0.05; x <= 1.0; x += 0.05) {
      std::vector<double> vals(net.size(), 0.5);
      vals.push_back(x);
      const auto rep = congruence_transform(form, net, w, XMode::SharedScalar, vals);
      const bool whole = testing::oracle_max_eig(MatrixXc(form.evaluate(vals))) < 0.0;
      const bool pieces = testing::oracle_max_eig(rep.g11) < 0.0 &&
                          testing::oracle_max_eig(MatrixXc(0.5 * (rep.schur + rep.schur.adjoint()))) < 0.0;
      agree += whole == pieces;
      ++total;
    }
  }
  CHECK(total > 0);
  CHECK(agree == total);
}

TEST_CASE("real embedding doubles the spectrum") {
  std::mt19937_64 rng(29);
  MatrixXc a = MatrixXc::Random(5, 5);
  a = 0.5 * (a + a.adjoint()).eval();
  const MatrixXr r = realify(a);
  CHECK((r - r.transpose()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXc> ec(a);
  Eigen::SelfAdjointEigenSolver<MatrixXr> er(r);
  for (int i = 0; i < 5; ++i) {
    CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-12));
    CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-12));
  }
  // the form-level embedding agrees with the matrix-level one
  const auto net = testing::random_network(rng, 3);
  const auto form = build_sparse_lmi(net, 1.0, XMode::Diagonal);
  const auto vals = testing::random_values(rng, form.variables());
  CHECK((realify(form).evaluate(vals) - realify(MatrixXc(form.evaluate(vals)))).norm() < 1e-13);
}

TEST_CASE("chain LMI pattern is banded and local") {
  const auto net = make_chain(6);
  const auto form = build_sparse_lmi(net, 1.0, XMode::SharedScalar);
  const auto pat = pattern_of(form);
  CHECK(pat.order() == 6 + 10);
  for (int i = 0; i < pat.order(); ++i) CHECK(pat.contains(i, i));
  for (const auto& [r, c] : pat.entries()) CHECK(pat.contains(c, r));
  // every entry comes from some coefficient or the constant
  MatrixXr support = MatrixXr::Zero(pat.order(), pat.order());
  support += MatrixXc(form.constant()).cwiseAbs();
  for (int k = 0; k < form.var_count(); ++k) support += MatrixXc(form.coefficient(k)).cwiseAbs();
  for (const auto& [r, c] : pat.entries()) {
    if (r != c) CHECK(support(r, c) > 0.0);
  }
  // q_1 never meets q_6 directly in a chain
  CHECK_FALSE(pat.contains(0, 5));
  std::ostringstream os;
  pat.write_coordinates(os);
  CHECK(std::ranges::count(os.str(), '\n') == pat.nonzeros());
}
