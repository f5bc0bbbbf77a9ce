#include "netiqc/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace netiqc {

namespace {

std::string dims(const MatrixXr& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

MatrixXr select(const MatrixXr& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXr out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

MatrixXc select(const MatrixXc& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXc out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- StateSpace

StateSpace::StateSpace(MatrixXr a, MatrixXr b, MatrixXr c, MatrixXr d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
  validate();
}

StateSpace StateSpace::static_gain(MatrixXr d) {
  const auto p = d.cols(), q = d.rows();
  return StateSpace(MatrixXr(0, 0), MatrixXr(0, p), MatrixXr(q, 0), std::move(d));
}

void StateSpace::validate() const {
  const auto n = A.rows();
  if (A.cols() != n) throw ModelError("A must be square, got " + dims(A));
  if (B.rows() != n || B.cols() != D.cols()) {
    throw ModelError("B is " + dims(B) + ", expected " + std::to_string(n) + "x" +
                     std::to_string(D.cols()));
  }
  if (C.cols() != n || C.rows() != D.rows()) {
    throw ModelError("C is " + dims(C) + ", expected " + std::to_string(D.rows()) + "x" +
                     std::to_string(n));
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    throw ModelError("realization has non-finite entries");
  }
  if (n > 0) {
    Eigen::EigenSolver<MatrixXr> es(A, false);
    if (es.info() != Eigen::Success) throw ModelError("eigenvalues of A did not converge");
    const double worst = es.eigenvalues().real().maxCoeff();
    if (!(worst < 0.0)) {
      throw ModelError("A is not Hurwitz (max real part of eigenvalues " + std::to_string(worst) +
                       ")");
    }
  }
}

MatrixXc eval_response(const StateSpace& ss, double omega) {
  MatrixXc d = ss.D.cast<Complex>();
  if (std::isinf(omega) || ss.states() == 0) return d;
  MatrixXc pencil = -ss.A.cast<Complex>();
  pencil.diagonal().array() += Complex(0.0, omega);
  Eigen::PartialPivLU<MatrixXc> lu(pencil);
  if (!(lu.rcond() > 1e-14)) {
    throw ModelError("jwI - A is singular at omega = " + std::to_string(omega));
  }
  MatrixXc x = lu.solve(ss.B.cast<Complex>());
  return ss.C.cast<Complex>() * x + d;
}

// ----------------------------------------------------------------- Subsystem

Subsystem::Subsystem(std::string name, int d, int m, int l, StateSpace realization)
    : name_(std::move(name)), d_(d), m_(m), l_(l), model_(std::move(realization)) {
  if (d < 0 || m < 0 || l < 0) throw ModelError("subsystem '" + name_ + "': negative dimension");
  const auto& ss = std::get<StateSpace>(model_);
  ss.validate();
  if (ss.inputs() != d + m || ss.outputs() != d + l) {
    throw ModelError("subsystem '" + name_ + "': realization is " + std::to_string(ss.outputs()) +
                     "x" + std::to_string(ss.inputs()) + " but dims need " +
                     std::to_string(d + l) + "x" + std::to_string(d + m));
  }
}

Subsystem::Subsystem(std::string name, int d, int m, int l, FrequencySamples samples)
    : name_(std::move(name)), d_(d), m_(m), l_(l), model_(std::move(samples)) {
  const auto& s = std::get<FrequencySamples>(model_);
  if (s.inputs != d + m || s.outputs != d + l) {
    throw ModelError("subsystem '" + name_ + "': sample size does not match dims");
  }
  for (const auto& [w, g] : s.table) {
    if (g.rows() != s.outputs || g.cols() != s.inputs) {
      throw ModelError("subsystem '" + name_ + "': sample at omega=" + std::to_string(w) +
                       " has wrong size");
    }
  }
}

MatrixXc Subsystem::response(double omega) const {
  if (has_realization()) return eval_response(realization(), omega);
  const auto& s = samples();
  if (auto it = s.table.find(omega); it != s.table.end()) return it->second;
  if (auto it = s.table.find(-omega); it != s.table.end()) return it->second.conjugate();
  throw ModelError("subsystem '" + name_ + "' has no sample at omega = " + std::to_string(omega));
}

Subsystem::Blocks Subsystem::blocks(double omega) const {
  MatrixXc g = response(omega);
  return {g.topLeftCorner(d_, d_), g.topRightCorner(d_, m_), g.bottomLeftCorner(l_, d_),
          g.bottomRightCorner(l_, m_)};
}

// ------------------------------------------------------------ Interconnection

Interconnection::Interconnection(std::vector<int> input_dims, std::vector<int> output_dims)
    : m_(std::move(input_dims)), l_(std::move(output_dims)) {
  if (m_.size() != l_.size()) throw ModelError("input/output dimension lists differ in length");
}

int Interconnection::total_inputs() const { return std::accumulate(m_.begin(), m_.end(), 0); }
int Interconnection::total_outputs() const { return std::accumulate(l_.begin(), l_.end(), 0); }
int Interconnection::input_offset(int i) const {
  return std::accumulate(m_.begin(), m_.begin() + i, 0);
}
int Interconnection::output_offset(int j) const {
  return std::accumulate(l_.begin(), l_.begin() + j, 0);
}

void Interconnection::set_block(int i, int j, const MatrixXr& block) {
  if (i < 0 || j < 0 || i >= subsystems() || j >= subsystems()) {
    throw ModelError("interconnection block index out of range");
  }
  if (block.rows() != m_[i] || block.cols() != l_[j]) {
    throw ModelError("Gamma_" + std::to_string(i + 1) + std::to_string(j + 1) + " is " +
                     dims(block) + ", expected " + std::to_string(m_[i]) + "x" +
                     std::to_string(l_[j]));
  }
  if ((block.array() != 0.0 && block.array() != 1.0).any()) {
    throw ModelError("Gamma_" + std::to_string(i + 1) + std::to_string(j + 1) + " must be 0-1");
  }
  auto [it, inserted] = blocks_.try_emplace({i, j}, block);
  if (!inserted) it->second = it->second.cwiseMax(block);
}

void Interconnection::connect(int from, int out_port, int to, int in_port) {
  if (from < 0 || to < 0 || from >= subsystems() || to >= subsystems()) {
    throw ModelError("connection references an unknown subsystem");
  }
  if (out_port < 0 || out_port >= l_[from] || in_port < 0 || in_port >= m_[to]) {
    throw ModelError("connection port index out of range");
  }
  MatrixXr b = MatrixXr::Zero(m_[to], l_[from]);
  b(in_port, out_port) = 1.0;
  set_block(to, from, b);
}

std::optional<MatrixXr> Interconnection::block(int i, int j) const {
  if (auto it = blocks_.find({i, j}); it != blocks_.end()) return it->second;
  return std::nullopt;
}

MatrixXr Interconnection::assembled() const {
  MatrixXr g = MatrixXr::Zero(total_inputs(), total_outputs());
  for (const auto& [ij, b] : blocks_) {
    g.block(input_offset(ij.first), output_offset(ij.second), b.rows(), b.cols()) = b;
  }
  return g;
}

int Interconnection::ones() const {
  int n = 0;
  for (const auto& [ij, b] : blocks_) n += static_cast<int>((b.array() == 1.0).count());
  return n;
}

void Interconnection::validate() const {
  for (const auto& [ij, b] : blocks_) {
    const std::string tag = "Gamma_(" + std::to_string(ij.first + 1) + "," +
                            std::to_string(ij.second + 1) + ")";
    if ((b.array() != 0.0 && b.array() != 1.0).any()) throw ModelError(tag + " is not 0-1");
    if ((b.array() == 0.0).all()) throw ModelError(tag + " is stored but zero");
  }
  const MatrixXr g = assembled();
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    if (g.row(r).sum() > 1.0) {
      throw ModelError("input wire " + std::to_string(r) + " is driven by more than one output");
    }
  }
}

// ------------------------------------------------------------------- Network

Network::Network(std::vector<Subsystem> subsystems, Interconnection gamma,
                 std::vector<UncertaintyBlock> uncertainty)
    : subsystems_(std::move(subsystems)),
      gamma_(std::move(gamma)),
      uncertainty_(std::move(uncertainty)) {
  const int n = size();
  if (gamma_.subsystems() != n) throw ModelError("interconnection size does not match network");
  if (static_cast<int>(uncertainty_.size()) != n) {
    throw ModelError("need one uncertainty descriptor per subsystem");
  }
  for (int i = 0; i < n; ++i) {
    const auto& s = subsystems_[i];
    if (gamma_.input_offset(i + 1) - gamma_.input_offset(i) != s.m() ||
        gamma_.output_offset(i + 1) - gamma_.output_offset(i) != s.l()) {
      throw ModelError("interconnection port dims do not match subsystem '" + s.name() + "'");
    }
    try {
      uncertainty_[i].validate();
    } catch (const std::invalid_argument& e) {
      throw ModelError("subsystem '" + s.name() + "': " + e.what());
    }
    if (uncertainty_[i].dim != s.d()) {
      throw ModelError("subsystem '" + s.name() + "': uncertainty dim " +
                       std::to_string(uncertainty_[i].dim) + " != d = " + std::to_string(s.d()));
    }
  }
  gamma_.validate();
}

int Network::total_d() const { return d_offset(size()); }
int Network::total_m() const { return m_offset(size()); }
int Network::total_l() const {
  int out = 0;
  for (const auto& s : subsystems_) out += s.l();
  return out;
}
int Network::d_offset(int i) const {
  int out = 0;
  for (int k = 0; k < i; ++k) out += subsystems_[k].d();
  return out;
}
int Network::m_offset(int i) const {
  int out = 0;
  for (int k = 0; k < i; ++k) out += subsystems_[k].m();
  return out;
}

NetworkResponse assemble_blocks(const Network& net, double omega) {
  const int d = net.total_d(), m = net.total_m(), l = net.total_l();
  NetworkResponse r{MatrixXc::Zero(d, d), MatrixXc::Zero(d, m), MatrixXc::Zero(l, d),
                    MatrixXc::Zero(l, m)};
  int od = 0, om = 0, ol = 0;
  for (const auto& s : net.subsystems()) {
    const auto b = s.blocks(omega);
    r.pq.block(od, od, s.d(), s.d()) = b.pq;
    r.pw.block(od, om, s.d(), s.m()) = b.pw;
    r.zq.block(ol, od, s.l(), s.d()) = b.zq;
    r.zw.block(ol, om, s.l(), s.m()) = b.zw;
    od += s.d();
    om += s.m();
    ol += s.l();
  }
  return r;
}

namespace {

MatrixXc loop_matrix(const Network& net, const NetworkResponse& r) {
  const int m = net.total_m();
  MatrixXc gamma = net.gamma().assembled().cast<Complex>();
  return MatrixXc::Identity(m, m) - gamma * r.zw;
}

}  // namespace

WellPosedness check_wellposed(const Network& net, double omega, double condition_bound) {
  const auto r = assemble_blocks(net, omega);
  if (net.total_m() == 0) return {true, 1.0};
  const MatrixXc loop = loop_matrix(net, r);
  Eigen::JacobiSVD<MatrixXc> svd(loop);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  const double cond = smin > 0.0 ? smax / smin : kInf;
  return {cond < condition_bound, cond};
}

MatrixXc lumped_system(const Network& net, double omega, double condition_bound) {
  const auto wp = check_wellposed(net, omega, condition_bound);
  if (!wp.wellposed) {
    throw IllPosedError("interconnection is ill-posed at omega = " + std::to_string(omega) +
                        " (condition estimate " + std::to_string(wp.condition_estimate) + ")");
  }
  const auto r = assemble_blocks(net, omega);
  if (net.total_m() == 0) return r.pq;
  const MatrixXc gamma = net.gamma().assembled().cast<Complex>();
  const MatrixXc loop = loop_matrix(net, r);
  return r.pq + r.pw * loop.partialPivLu().solve(gamma * r.zq);
}

// -------------------------------------------------------------------- chains

Subsystem chain_end(const Subsystem& interior, bool first) {
  if (interior.d() != 1 || interior.m() != 2 || interior.l() != 2) {
    throw std::invalid_argument("chain template must have d = 1 and m = l = 2");
  }
  // keep [q, w2] / [p, z2] for the first system, [q, w1] / [p, z1] for the last
  const std::vector<int> keep = first ? std::vector<int>{0, 2} : std::vector<int>{0, 1};
  const std::string name = interior.name() + (first ? "_first" : "_last");
  if (interior.has_realization()) {
    const auto& ss = interior.realization();
    std::vector<int> all_states(ss.states());
    std::iota(all_states.begin(), all_states.end(), 0);
    StateSpace end(ss.A, select(ss.B, all_states, keep), select(ss.C, keep, all_states),
                   select(ss.D, keep, keep));
    return Subsystem(name, 1, 1, 1, std::move(end));
  }
  FrequencySamples s{2, 2, {}};
  for (const auto& [w, g] : interior.samples().table) s.table[w] = select(g, keep, keep);
  return Subsystem(name, 1, 1, 1, std::move(s));
}

Network make_chain(int n, const Subsystem& interior, const UncertaintyBlock& uncertainty) {
  if (n < 2) throw std::invalid_argument("a chain needs at least 2 subsystems");
  std::vector<Subsystem> subs;
  subs.reserve(n);
  for (int i = 0; i < n; ++i) {
    Subsystem s = i == 0 ? chain_end(interior, true)
                         : (i == n - 1 ? chain_end(interior, false) : interior);
    const std::string name = "s" + std::to_string(i + 1);
    if (s.has_realization()) {
      subs.emplace_back(name, s.d(), s.m(), s.l(), s.realization());
    } else {
      subs.emplace_back(name, s.d(), s.m(), s.l(), s.samples());
    }
  }
  std::vector<int> m(n), l(n);
  for (int i = 0; i < n; ++i) {
    m[i] = subs[i].m();
    l[i] = subs[i].l();
  }
  Interconnection gamma(m, l);
  // Port index of z^2 / w^2 is 0 on the first system (its only port), 1 elsewhere.
  auto port2 = [](int i) { return i == 0 ? 0 : 1; };
  for (int i = 1; i < n; ++i) {
    gamma.connect(i - 1, port2(i - 1), i, 0);  // w_i^1 = z_{i-1}^2
    gamma.connect(i, 0, i - 1, port2(i - 1));  // w_{i-1}^2 = z_i^1
  }
  std::vector<UncertaintyBlock> unc(n, uncertainty);
  return Network(std::move(subs), std::move(gamma), std::move(unc));
}

Subsystem ChainTemplate::interior() const {
  MatrixXr a(1, 1), b(1, 3), c(3, 1);
  a << -pole;
  b << 1.0, coupling, coupling;
  c << gain, 1.0, 1.0;
  return Subsystem("chain", 1, 2, 2, StateSpace(a, b, c, MatrixXr::Zero(3, 3)));
}

Network make_chain(int n, const ChainTemplate& tmpl) {
  return make_chain(n, tmpl.interior(), UncertaintyBlock::norm_bounded(1, tmpl.delta_bound));
}

}  // namespace netiqc
