#include <doctest.h>

#include "helpers.hpp"

using namespace netiqc;

TEST_CASE("first-order response matches the closed form") {
  const auto net = testing::first_order(2.0);
  for (double w : {0.0, 0.5, 1.0, 10.0}) {
    const Complex expected = 2.0 / Complex(1.0, w);
    const MatrixXc r = net.subsystem(0).response(w);
    CHECK(std::abs(r(0, 0) - expected) < 1e-14);
  }
  CHECK(std::abs(net.subsystem(0).response(kInf)(0, 0)) == 0.0);
}

TEST_CASE("negative frequency gives the conjugate response") {
  std::mt19937_64 rng(3);
  const auto s = testing::random_subsystem(rng, "s");
  const MatrixXc a = s.response(0.7), b = s.response(-0.7);
  CHECK((a.conjugate() - b).norm() < 1e-13);
}

TEST_CASE("realization validation") {
  MatrixXr A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << 1.0;  // unstable
  B << 1.0;
  C << 1.0;
  D << 0.0;
  CHECK_THROWS_AS(StateSpace(A, B, C, D).validate(), ModelError);
  MatrixXr Bbad(2, 1);
  Bbad << 1, 1;
  A << -1.0;
  CHECK_THROWS(StateSpace(A, Bbad, C, D).validate());
}

TEST_CASE("lumped system of a two-node loop matches a symbolic 2x2 inverse") {
  // Two static subsystems g_i = [a_i b_i; c_i e_i] (inputs [q, w], outputs [p, z])
  // with w1 = z2, w2 = z1.
  const double a1 = 0.3, b1 = 0.7, c1 = -0.4, e1 = 0.2;
  const double a2 = -0.5, b2 = 0.1, c2 = 0.9, e2 = -0.3;
  auto make = [](const char* name, double a, double b, double c, double e) {
    MatrixXr D(2, 2);
    D << a, b, c, e;
    return Subsystem(name, 1, 1, 1, StateSpace::static_gain(D));
  };
  Interconnection g({1, 1}, {1, 1});
  g.connect(1, 0, 0, 0);
  g.connect(0, 0, 1, 0);
  Network net({make("s1", a1, b1, c1, e1), make("s2", a2, b2, c2, e2)}, g,
              {UncertaintyBlock::norm_bounded(1, 1.0), UncertaintyBlock::norm_bounded(1, 1.0)});
  // I - Gamma Gzw = [1 -e2; -e1 1]; its inverse is [1 e2; e1 1] / (1 - e1 e2).
  const double det = 1.0 - e1 * e2;
  Eigen::Matrix2d inv;
  inv << 1.0, e2, e1, 1.0;
  inv /= det;
  Eigen::Matrix2d Gpw = Eigen::Vector2d(b1, b2).asDiagonal();
  Eigen::Matrix2d Gzq = Eigen::Vector2d(c1, c2).asDiagonal();
  Eigen::Matrix2d Gam;
  Gam << 0, 1, 1, 0;
  Eigen::Matrix2d expected = Eigen::Vector2d(a1, a2).asDiagonal();
  expected += Gpw * inv * Gam * Gzq;
  const MatrixXc got = lumped_system(net, 0.0);
  CHECK((got.real() - expected).norm() < 1e-14);
  CHECK(got.imag().norm() == 0.0);
}

TEST_CASE("ill-posed interconnection is detected") {
  MatrixXr D(2, 2);
  D << 0, 1, 1, 1;  // Gzw = 1 fed back to itself
  Interconnection g({1}, {1});
  g.connect(0, 0, 0, 0);
  Network net({Subsystem("s", 1, 1, 1, StateSpace::static_gain(D))}, g,
              {UncertaintyBlock::norm_bounded(1, 1.0)});
  CHECK_FALSE(check_wellposed(net, 0.0).wellposed);
  CHECK_THROWS_AS(lumped_system(net, 0.0), IllPosedError);
}

TEST_CASE("chain interconnection structure") {
  for (int n : {2, 5, 50}) {
    const auto net = make_chain(n);
    CHECK(net.size() == n);
    CHECK(net.gamma().ones() == 2 * (n - 1));
    CHECK(net.total_d() == n);
    CHECK(net.total_m() == 2 * (n - 1));
    const MatrixXr G = net.gamma().assembled();
    CHECK(G.rows() == net.total_m());
    CHECK(G.cols() == net.total_l());
    CHECK((G.rowwise().sum().array() == 1.0).all());
  }
}

TEST_CASE("interconnection rejects non 0-1 blocks") {
  Interconnection g({1}, {1});
  MatrixXr b(1, 1);
  b << 2.0;
  CHECK_THROWS(g.set_block(0, 0, b));
}

TEST_CASE("tabulated subsystems answer only on their grid") {
  FrequencySamples fs;
  fs.inputs = 1;
  fs.outputs = 1;
  fs.table[1.0] = MatrixXc::Constant(1, 1, Complex(0.5, -0.5));
  Subsystem s("t", 1, 0, 0, fs);
  CHECK(s.response(1.0)(0, 0) == Complex(0.5, -0.5));
  CHECK_THROWS(s.response(2.0));
}
