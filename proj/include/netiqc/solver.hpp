#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "netiqc/decomp.hpp"
#include "netiqc/eigen_sym.hpp"

namespace netiqc {

enum class Verdict { StrictlyFeasible, Infeasible, Inconclusive };
std::string to_string(Verdict v);

struct SolverOptions {
  double tol = 1e-6;
  int max_iter = 20000;
  double rho = 1.0;
  int adapt_every = 50;        // rho residual balancing period
  double adapt_ratio = 10.0;
  double adapt_factor = 2.0;
  int check_every = 50;        // certificate / lower-bound period
  double eps_rel = 1e-6;       // eps_feas = eps_rel * largest coefficient magnitude
  double relaxation = 1.6;     // over-relaxation factor in (0, 2); 1 is plain ADMM
  bool stop_on_certificate = true;
  bool record_trace = false;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

struct TraceRow {
  int round = 0;
  double primal = 0.0;
  double dual = 0.0;
  double t = 0.0;
};

/// What one agent sends a tree neighbor per round: its copies of the shared
/// variables of that edge and the matching scaled duals.
struct SeparatorMessage {
  int edge = -1;
  int round = 0;
  int from = -1;
  int to = -1;
  std::vector<double> copies;
  std::vector<double> duals;
};

struct FeasibilityResult {
  Verdict verdict = Verdict::Inconclusive;
  double t_star = kInf;          // max eigenvalue bound achieved at `certificate`
  double t_iterate = 0.0;        // consensus value of the margin variable
  double lower_bound = -kInf;    // dual bound on the optimal margin
  double eps_feas = 0.0;
  std::vector<double> certificate;  // original variables
  std::vector<double> consensus;    // all variables, separator ones included
  int iterations = 0;
  bool converged = false;
  Residuals residuals;
  double rho = 1.0;
  std::vector<std::map<int, long>> messages;  // per agent: partner -> messages sent
  std::vector<TraceRow> trace;
  std::string reason;
};

/// Synchronous consensus ADMM for  min t  s.t.  A_i(v) - t D_i <= 0  on every
/// agent, with box-bounded variables. A single agent is the centralized
/// solver; with a decomposition there is one agent per clique and agents
/// talk only across consensus-tree edges.
class ConsensusAdmm {
 public:
  ConsensusAdmm(const SymmetricAffineForm& form, const SolverOptions& opts = {});
  ConsensusAdmm(const SymmetricDecomposition& dp, const SolverOptions& opts = {});
  ~ConsensusAdmm();
  ConsensusAdmm(ConsensusAdmm&&) noexcept;
  ConsensusAdmm& operator=(ConsensusAdmm&&) noexcept;

  /// One round: local solves, slack projections, message exchange, duals.
  void step();
  Residuals residuals() const;
  /// Residuals scaled by the current primal / dual magnitudes.
  Residuals relative_residuals() const;
  int round() const;
  double rho() const;
  double t_mean() const;
  int agents() const;
  const std::vector<SeparatorMessage>& last_messages() const;

  /// Iterates until convergence, a certificate (if enabled) or max_iter.
  FeasibilityResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

FeasibilityResult solve_centralized(const SymmetricAffineForm& form, const SolverOptions& opts = {});
FeasibilityResult solve_decomposed(const SymmetricDecomposition& dp, const SolverOptions& opts = {});

}  // namespace netiqc
