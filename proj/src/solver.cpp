#include "netiqc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace netiqc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::StrictlyFeasible: return "StrictlyFeasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

using SparseR = Eigen::SparseMatrix<double>;

double inner(const SparseR& a, const MatrixXr& b) {
  double s = 0.0;
  for (int j = 0; j < a.outerSize(); ++j) {
    for (SparseR::InnerIterator it(a, j); it; ++it) s += it.value() * b(it.row(), it.col());
  }
  return s;
}

double inner(const SparseR& a, const SparseR& b) {
  return a.cwiseProduct(b).sum();
}

void accumulate(MatrixXr& out, const SparseR& a, double w) {
  if (w == 0.0) return;
  for (int j = 0; j < a.outerSize(); ++j) {
    for (SparseR::InnerIterator it(a, j); it; ++it) out(it.row(), it.col()) += w * it.value();
  }
}

struct Agent {
  int id = 0;
  std::vector<int> indices;  // global matrix indices
  int n = 0;
  std::vector<int> vars;     // global variable ids; the margin t is the last
  MatrixXr C;
  std::vector<SparseR> F;    // per local variable (t: -diag(weight))
  VectorXr weight;
  VectorXr lo, hi;
  std::vector<char> boxed;
  double objective = 1.0;    // weight of this agent's copy of t
  Eigen::LLT<MatrixXr> llt;

  VectorXr y, b, bu;         // copies, box copies, box duals
  MatrixXr Ay, S, U;
  std::map<int, long> sent;
};

struct EdgeState {
  int id = 0;
  int a = 0, b = 0;          // parent, child agent
  std::vector<int> pos_a, pos_b;
  VectorXr ua, ub, zeta;
};

}  // namespace

struct ConsensusAdmm::Impl {
  SolverOptions opts;
  int order = 0;             // global matrix order
  int var_count = 0;         // variables without t
  int original_vars = 0;     // variables that form the certificate
  std::vector<Variable> variables;
  std::vector<std::vector<int>> holders;
  std::vector<Agent> agents;
  std::vector<EdgeState> edges;
  double rho = 1.0;
  int round = 0;
  double eps_feas = 0.0;
  Residuals res{kInf, kInf};
  Residuals rel{kInf, kInf};
  std::vector<SeparatorMessage> messages;

  void finish_setup();
  void local_update(Agent& ag);
  void step();
  void adapt();
  std::vector<double> consensus_point() const;
  double certificate_bound(const std::vector<double>& v) const;
  double dual_lower_bound() const;
  double t_mean() const;
};

void ConsensusAdmm::Impl::finish_setup() {
  rho = opts.rho;
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (opts.max_iter < 0) throw std::invalid_argument("max_iter must be nonnegative");

  double scale = 0.0;
  for (auto& ag : agents) {
    const int k = static_cast<int>(ag.vars.size());
    ag.lo.resize(k);
    ag.hi.resize(k);
    ag.boxed.assign(k, 0);
    for (int p = 0; p < k; ++p) {
      const int g = ag.vars[p];
      if (g < var_count) {
        ag.lo(p) = variables[g].lower;
        ag.hi(p) = variables[g].upper;
        ag.boxed[p] = variables[g].has_box();
      } else {
        ag.lo(p) = -kInf;
        ag.hi(p) = kInf;
      }
      if (g < original_vars) {
        for (int j = 0; j < ag.F[p].outerSize(); ++j) {
          for (SparseR::InnerIterator it(ag.F[p], j); it; ++it) {
            scale = std::max(scale, std::abs(it.value()));
          }
        }
      }
    }
    if (ag.C.size() > 0) scale = std::max(scale, ag.C.cwiseAbs().maxCoeff());

    ag.y = VectorXr::Zero(k);
    for (int p = 0; p < k; ++p) {
      const double l = ag.lo(p), h = ag.hi(p);
      if (std::isfinite(l) && std::isfinite(h)) {
        ag.y(p) = 0.5 * (l + h);
      } else {
        ag.y(p) = std::clamp(0.0, l, h);
      }
    }
    ag.b = ag.y;
    ag.bu = VectorXr::Zero(k);
    ag.S = MatrixXr::Zero(ag.n, ag.n);
    ag.U = MatrixXr::Zero(ag.n, ag.n);
    ag.Ay = ag.C;
    for (int p = 0; p < k; ++p) accumulate(ag.Ay, ag.F[p], ag.y(p));
  }
  // An identically zero form has no scale; t* = 0 must still land in the
  // gray zone rather than pass as strictly feasible.
  eps_feas = opts.eps_rel * (scale > 0.0 ? scale : 1.0);

  // Penalty counts: box copy + one per incident consensus edge.
  std::vector<VectorXr> counts;
  for (const auto& ag : agents) {
    VectorXr c(ag.vars.size());
    for (size_t p = 0; p < ag.vars.size(); ++p) c(p) = ag.boxed[p] ? 1.0 : 0.0;
    counts.push_back(c);
  }
  for (const auto& e : edges) {
    for (int p : e.pos_a) counts[e.a](p) += 1.0;
    for (int p : e.pos_b) counts[e.b](p) += 1.0;
  }
  for (size_t i = 0; i < agents.size(); ++i) {
    auto& ag = agents[i];
    const int k = static_cast<int>(ag.vars.size());
    MatrixXr G(k, k);
    for (int p = 0; p < k; ++p) {
      for (int q = p; q < k; ++q) G(p, q) = G(q, p) = inner(ag.F[p], ag.F[q]);
    }
    G.diagonal() += counts[i];
    ag.llt.compute(G);
    if (ag.llt.info() != Eigen::Success) {
      G.diagonal().array() += 1e-10 * std::max(1.0, G.diagonal().maxCoeff());
      ag.llt.compute(G);
      if (ag.llt.info() != Eigen::Success) {
        throw std::runtime_error("local normal equations are singular");
      }
    }
  }
  for (auto& e : edges) {
    const auto n = static_cast<Eigen::Index>(e.pos_a.size());
    e.ua = VectorXr::Zero(n);
    e.ub = VectorXr::Zero(n);
    e.zeta.resize(n);
    for (Eigen::Index s = 0; s < n; ++s) {
      e.zeta(s) = 0.5 * (agents[e.a].y(e.pos_a[s]) + agents[e.b].y(e.pos_b[s]));
    }
  }
}

void ConsensusAdmm::Impl::local_update(Agent& ag) {
  const int k = static_cast<int>(ag.vars.size());
  const MatrixXr M = ag.C - ag.S + ag.U;
  VectorXr rhs(k);
  for (int p = 0; p < k; ++p) {
    rhs(p) = -inner(ag.F[p], M);
    if (ag.boxed[p]) rhs(p) += ag.b(p) - ag.bu(p);
  }
  rhs(k - 1) -= ag.objective / rho;
  for (const auto& e : edges) {
    if (e.a == ag.id) {
      for (size_t s = 0; s < e.pos_a.size(); ++s) rhs(e.pos_a[s]) += e.zeta(s) - e.ua(s);
    } else if (e.b == ag.id) {
      for (size_t s = 0; s < e.pos_b.size(); ++s) rhs(e.pos_b[s]) += e.zeta(s) - e.ub(s);
    }
  }
  ag.y = ag.llt.solve(rhs);
  ag.Ay = ag.C;
  for (int p = 0; p < k; ++p) accumulate(ag.Ay, ag.F[p], ag.y(p));
}

void ConsensusAdmm::Impl::step() {
  ++round;
  const double alpha = opts.relaxation;
  double r2 = 0.0, s2 = 0.0, pa2 = 0.0, pb2 = 0.0, d2 = 0.0;

  // (a) local least squares, (b) slack projection, box copies and duals.
  // Over-relaxed points mix the new local value with the previous copy.
  for (auto& ag : agents) {
    local_update(ag);
    const MatrixXr relaxed = alpha * ag.Ay + (1.0 - alpha) * ag.S;
    MatrixXr S_new = project_nsd(relaxed + ag.U);
    s2 += (S_new - ag.S).squaredNorm();
    ag.S = std::move(S_new);
    ag.U += relaxed - ag.S;
    const MatrixXr r = ag.Ay - ag.S;
    r2 += r.squaredNorm();
    pa2 += ag.Ay.squaredNorm();
    pb2 += ag.S.squaredNorm();
    d2 += ag.U.squaredNorm();
    for (Eigen::Index p = 0; p < ag.y.size(); ++p) {
      if (!ag.boxed[p]) continue;
      const double yr = alpha * ag.y(p) + (1.0 - alpha) * ag.b(p);
      const double nb = std::clamp(yr + ag.bu(p), ag.lo(p), ag.hi(p));
      s2 += (nb - ag.b(p)) * (nb - ag.b(p));
      ag.b(p) = nb;
      ag.bu(p) += yr - nb;
      const double rp = ag.y(p) - nb;
      r2 += rp * rp;
      pa2 += ag.y(p) * ag.y(p);
      pb2 += nb * nb;
      d2 += ag.bu(p) * ag.bu(p);
    }
  }

  // (c) separator messages between tree neighbors: relaxed copies and duals
  messages.clear();
  for (auto& e : edges) {
    SeparatorMessage down{e.id, round, e.a, e.b, {}, {}};
    SeparatorMessage up{e.id, round, e.b, e.a, {}, {}};
    for (size_t s = 0; s < e.pos_a.size(); ++s) {
      down.copies.push_back(alpha * agents[e.a].y(e.pos_a[s]) + (1.0 - alpha) * e.zeta(s));
      down.duals.push_back(e.ua(s));
      up.copies.push_back(alpha * agents[e.b].y(e.pos_b[s]) + (1.0 - alpha) * e.zeta(s));
      up.duals.push_back(e.ub(s));
    }
    ++agents[e.a].sent[e.b];
    ++agents[e.b].sent[e.a];
    messages.push_back(std::move(down));
    messages.push_back(std::move(up));
  }

  // (d) edge consensus values and edge duals, computed identically by both ends
  for (size_t m = 0; m + 1 < messages.size(); m += 2) {
    const auto& from_parent = messages[m];
    const auto& from_child = messages[m + 1];
    auto& e = edges[from_parent.edge];
    for (size_t s = 0; s < from_parent.copies.size(); ++s) {
      const double z = 0.5 * ((from_parent.copies[s] + from_parent.duals[s]) +
                              (from_child.copies[s] + from_child.duals[s]));
      s2 += 2.0 * (z - e.zeta(s)) * (z - e.zeta(s));
      e.zeta(s) = z;
      e.ua(s) += from_parent.copies[s] - z;
      e.ub(s) += from_child.copies[s] - z;
      const double ya = agents[e.a].y(e.pos_a[s]), yb = agents[e.b].y(e.pos_b[s]);
      r2 += (ya - z) * (ya - z) + (yb - z) * (yb - z);
      pa2 += ya * ya + yb * yb;
      pb2 += 2.0 * z * z;
      d2 += e.ua(s) * e.ua(s) + e.ub(s) * e.ub(s);
    }
  }
  res = {std::sqrt(r2), rho * std::sqrt(s2)};
  const double pscale = std::max({std::sqrt(pa2), std::sqrt(pb2), 1e-12});
  const double dscale = std::max(rho * std::sqrt(d2), 1e-12);
  rel = {res.primal / pscale, res.dual / dscale};
}

void ConsensusAdmm::Impl::adapt() {
  double factor = 1.0;
  if (rel.primal > opts.adapt_ratio * rel.dual) {
    factor = opts.adapt_factor;
  } else if (rel.dual > opts.adapt_ratio * rel.primal) {
    factor = 1.0 / opts.adapt_factor;
  }
  if (factor == 1.0) return;
  rho *= factor;
  // scaled duals carry 1/rho
  for (auto& ag : agents) {
    ag.U /= factor;
    ag.bu /= factor;
  }
  for (auto& e : edges) {
    e.ua /= factor;
    e.ub /= factor;
  }
}

std::vector<double> ConsensusAdmm::Impl::consensus_point() const {
  std::vector<double> sum(var_count, 0.0), cnt(var_count, 0.0);
  for (const auto& ag : agents) {
    for (size_t p = 0; p + 1 < ag.vars.size(); ++p) {
      const int g = ag.vars[p];
      sum[g] += ag.boxed[p] ? ag.b(p) : ag.y(p);
      cnt[g] += 1.0;
    }
  }
  std::vector<double> v(var_count, 0.0);
  for (int g = 0; g < var_count; ++g) {
    if (cnt[g] > 0.0) v[g] = variables[g].clamp(sum[g] / cnt[g]);
  }
  return v;
}

double ConsensusAdmm::Impl::certificate_bound(const std::vector<double>& v) const {
  double t = -kInf;
  for (const auto& ag : agents) {
    MatrixXr M = ag.C;
    for (size_t p = 0; p + 1 < ag.vars.size(); ++p) accumulate(M, ag.F[p], v[ag.vars[p]]);
    const VectorXr s = ag.weight.cwiseSqrt().cwiseInverse();
    M = s.asDiagonal() * M * s.asDiagonal();
    M = 0.5 * (M + M.transpose());
    t = std::max(t, max_eigenvalue(M));
  }
  return t;
}

double ConsensusAdmm::Impl::dual_lower_bound() const {
  // Partial dual matrix on the clique squares: sum of clique blocks minus one
  // copy of every separator block. Each clique block is then shifted to PSD;
  // a chordal partial matrix with PSD clique blocks has a PSD completion.
  MatrixXr P = MatrixXr::Zero(order, order);
  std::vector<MatrixXr> Y(agents.size());
  for (size_t i = 0; i < agents.size(); ++i) {
    const auto& ag = agents[i];
    Y[i] = project_psd(rho * ag.U);
    for (int a = 0; a < ag.n; ++a) {
      for (int c = 0; c < ag.n; ++c) P(ag.indices[a], ag.indices[c]) += Y[i](a, c);
    }
  }
  for (const auto& e : edges) {
    const auto& A = agents[e.a];
    const auto& B = agents[e.b];
    std::vector<int> ia, ib;
    for (int a = 0; a < A.n; ++a) {
      auto it = std::lower_bound(B.indices.begin(), B.indices.end(), A.indices[a]);
      if (it != B.indices.end() && *it == A.indices[a]) {
        ia.push_back(a);
        ib.push_back(static_cast<int>(it - B.indices.begin()));
      }
    }
    for (size_t r = 0; r < ia.size(); ++r) {
      for (size_t c = 0; c < ia.size(); ++c) {
        P(A.indices[ia[r]], A.indices[ia[c]]) -=
            0.5 * (Y[e.a](ia[r], ia[c]) + Y[e.b](ib[r], ib[c]));
      }
    }
  }
  double shift = 0.0;
  if (edges.size() > 0) {
    for (const auto& ag : agents) {
      MatrixXr block(ag.n, ag.n);
      for (int a = 0; a < ag.n; ++a) {
        for (int c = 0; c < ag.n; ++c) block(a, c) = P(ag.indices[a], ag.indices[c]);
      }
      block = 0.5 * (block + block.transpose());
      shift = std::max(shift, max_eigenvalue(-block));
    }
  }
  P.diagonal().array() += shift;
  const double trace = P.trace();
  if (!(trace > 0.0)) return -kInf;

  std::vector<double> c(original_vars, 0.0);
  double c0 = 0.0;
  for (const auto& ag : agents) {
    MatrixXr block(ag.n, ag.n);
    for (int a = 0; a < ag.n; ++a) {
      for (int b = 0; b < ag.n; ++b) block(a, b) = P(ag.indices[a], ag.indices[b]);
    }
    c0 += (block.array() * ag.C.array()).sum();
    for (size_t p = 0; p + 1 < ag.vars.size(); ++p) {
      if (ag.vars[p] < original_vars) c[ag.vars[p]] += inner(ag.F[p], block);
    }
  }
  double num = c0;
  for (int k = 0; k < original_vars; ++k) {
    if (c[k] == 0.0) continue;
    const double lo = variables[k].lower, hi = variables[k].upper;
    const double m = std::min(lo * c[k], hi * c[k]);
    if (!std::isfinite(m)) return -kInf;
    num += m;
  }
  return num / trace;
}

double ConsensusAdmm::Impl::t_mean() const {
  double s = 0.0;
  for (const auto& ag : agents) s += ag.y(ag.y.size() - 1);
  return agents.empty() ? 0.0 : s / static_cast<double>(agents.size());
}

// ------------------------------------------------------------------ public

ConsensusAdmm::ConsensusAdmm(const SymmetricAffineForm& form, const SolverOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  auto& I = *impl_;
  I.opts = opts;
  I.order = form.order();
  I.variables = form.variables();
  I.var_count = form.var_count();
  I.original_vars = form.var_count();
  Agent ag;
  ag.id = 0;
  ag.n = form.order();
  ag.indices.resize(ag.n);
  std::iota(ag.indices.begin(), ag.indices.end(), 0);
  ag.C = MatrixXr(form.constant());
  for (int k = 0; k < form.var_count(); ++k) {
    ag.vars.push_back(k);
    ag.F.push_back(form.coefficient(k));
  }
  ag.weight = VectorXr::Ones(ag.n);
  ag.vars.push_back(I.var_count);
  ag.F.push_back(SparseR(MatrixXr((-ag.weight).asDiagonal()).sparseView()));
  ag.objective = 1.0;
  I.agents.push_back(std::move(ag));
  I.finish_setup();
}

ConsensusAdmm::ConsensusAdmm(const SymmetricDecomposition& dp, const SolverOptions& opts)
    : impl_(std::make_unique<Impl>()) {
  if (!dp.consensus_attached) throw std::invalid_argument("decomposition has no consensus attached");
  auto& I = *impl_;
  I.opts = opts;
  I.order = dp.order;
  I.variables = dp.variables;
  I.var_count = dp.var_count();
  I.original_vars = dp.original_var_count;
  const int L = dp.cliques();
  std::vector<std::vector<int>> held(L);
  for (int v = 0; v < dp.var_count(); ++v) {
    for (int k : dp.holders[v]) held[k].push_back(v);
  }
  for (int k = 0; k < L; ++k) {
    Agent ag;
    ag.id = k;
    ag.indices = dp.indices[k];
    ag.n = static_cast<int>(ag.indices.size());
    const auto& f = dp.local_forms[k];
    ag.C = MatrixXr(f.constant());
    for (int v : held[k]) {
      ag.vars.push_back(v);
      ag.F.push_back(f.coefficient(v));
    }
    for (int v = 0; v < f.var_count(); ++v) {
      if (f.has_term(v) && !std::binary_search(held[k].begin(), held[k].end(), v)) {
        throw std::invalid_argument("clique uses a variable it does not hold");
      }
    }
    ag.weight = dp.t_weights[k];
    ag.vars.push_back(I.var_count);
    ag.F.push_back(SparseR(MatrixXr((-ag.weight).asDiagonal()).sparseView()));
    ag.objective = 1.0 / static_cast<double>(L);
    I.agents.push_back(std::move(ag));
  }
  for (size_t id = 0; id < dp.edges.size(); ++id) {
    const auto& ce = dp.edges[id];
    EdgeState e;
    e.id = static_cast<int>(id);
    e.a = ce.parent;
    e.b = ce.child;
    const auto& A = I.agents[e.a];
    const auto& B = I.agents[e.b];
    for (size_t p = 0; p < A.vars.size(); ++p) {
      auto it = std::find(B.vars.begin(), B.vars.end(), A.vars[p]);
      if (it == B.vars.end()) continue;
      e.pos_a.push_back(static_cast<int>(p));
      e.pos_b.push_back(static_cast<int>(it - B.vars.begin()));
    }
    I.edges.push_back(std::move(e));
  }
  I.finish_setup();
}

ConsensusAdmm::~ConsensusAdmm() = default;
ConsensusAdmm::ConsensusAdmm(ConsensusAdmm&&) noexcept = default;
ConsensusAdmm& ConsensusAdmm::operator=(ConsensusAdmm&&) noexcept = default;

void ConsensusAdmm::step() { impl_->step(); }
Residuals ConsensusAdmm::residuals() const { return impl_->res; }
Residuals ConsensusAdmm::relative_residuals() const { return impl_->rel; }
int ConsensusAdmm::round() const { return impl_->round; }
double ConsensusAdmm::rho() const { return impl_->rho; }
double ConsensusAdmm::t_mean() const { return impl_->t_mean(); }
int ConsensusAdmm::agents() const { return static_cast<int>(impl_->agents.size()); }
const std::vector<SeparatorMessage>& ConsensusAdmm::last_messages() const {
  return impl_->messages;
}

FeasibilityResult ConsensusAdmm::run() {
  auto& I = *impl_;
  const auto& o = I.opts;
  FeasibilityResult out;
  out.eps_feas = I.eps_feas;

  auto check = [&](std::vector<double>& best_v, double& best_t) {
    auto v = I.consensus_point();
    const double t = I.certificate_bound(v);
    if (t < best_t) {
      best_t = t;
      best_v = std::move(v);
    }
    out.lower_bound = std::max(out.lower_bound, I.dual_lower_bound());
  };

  std::vector<double> best_v;
  double best_t = kInf;
  bool stop = false;
  while (!stop && I.round < o.max_iter) {
    I.step();
    if (o.record_trace) {
      out.trace.push_back({I.round, I.res.primal, I.res.dual, I.t_mean()});
    }
    out.converged = I.rel.primal <= o.tol && I.rel.dual <= o.tol;
    if (out.converged) break;
    if (o.check_every > 0 && I.round % o.check_every == 0) {
      check(best_v, best_t);
      if (o.stop_on_certificate && (best_t <= -I.eps_feas || out.lower_bound > I.eps_feas)) {
        stop = true;
      }
    }
    if (o.adapt_every > 0 && I.round % o.adapt_every == 0) I.adapt();
  }
  check(best_v, best_t);

  out.iterations = I.round;
  out.residuals = I.res;
  out.rho = I.rho;
  out.t_iterate = I.t_mean();
  out.t_star = best_t;
  out.consensus = best_v;
  best_v.resize(I.original_vars);
  out.certificate = std::move(best_v);
  for (const auto& ag : I.agents) out.messages.push_back(ag.sent);

  if (out.t_star <= -I.eps_feas) {
    out.verdict = Verdict::StrictlyFeasible;
    out.reason = "certificate margin below -eps";
  } else if (out.lower_bound > I.eps_feas) {
    out.verdict = Verdict::Infeasible;
    out.reason = "dual bound above +eps";
  } else if (out.converged && out.t_iterate > I.eps_feas && out.t_star > I.eps_feas) {
    out.verdict = Verdict::Infeasible;
    out.reason = "converged margin above +eps";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.reason = out.converged ? "margin inside the +-eps gray zone" : "iteration limit reached";
  }
  return out;
}

FeasibilityResult solve_centralized(const SymmetricAffineForm& form, const SolverOptions& opts) {
  return ConsensusAdmm(form, opts).run();
}

FeasibilityResult solve_decomposed(const SymmetricDecomposition& dp, const SolverOptions& opts) {
  return ConsensusAdmm(dp, opts).run();
}

}  // namespace netiqc
