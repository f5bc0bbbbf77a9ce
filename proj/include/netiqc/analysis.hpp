#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netiqc/chordal.hpp"
#include "netiqc/iqc.hpp"
#include "netiqc/lmi.hpp"
#include "netiqc/netmodel.hpp"
#include "netiqc/solver.hpp"

namespace netiqc {

/// Sorted, strictly increasing nonnegative frequencies; kInf allowed last.
struct FrequencyGrid {
  std::vector<double> points;

  /// 0, 50 log-spaced points in [1e-2, 1e2], and infinity.
  static FrequencyGrid standard();
  /// Comma-separated items: a number, "inf", or "log:lo:hi:n".
  /// Throws std::invalid_argument.
  static FrequencyGrid parse(const std::string& spec);
  static FrequencyGrid of(std::vector<double> points);

  std::string to_string() const;
};

enum class LmiPath { Sparse, Lumped, Both };
enum class SolveMode { Centralized, Distributed };

std::string to_string(LmiPath p);
std::string to_string(SolveMode m);

struct AnalysisOptions {
  LmiPath path = LmiPath::Sparse;
  SolveMode mode = SolveMode::Centralized;
  XMode x_mode = XMode::SharedScalar;
  int merge_max_order = 0;  // 0 keeps the maximal cliques
  SolverOptions solver;
  MultiplierOptions multiplier;
  double condition_bound = kDefaultConditionBound;
};

/// Chordal structure of the sparse LMI (complex level).
struct CliqueStats {
  int order = 0;
  long nonzeros = 0;
  long fill = 0;
  int cliques = 0;
  int max_clique = 0;
  int solved_cliques = 0;  // after merging
  int solved_max_clique = 0;
  bool merge_refused = false;
};

CliqueStats clique_stats(const HermitianAffineForm& form, int merge_max_order = 0);

/// Clique tree of a form's complex-level pattern (merged when max_order > 0).
CliqueTree clique_tree_of(const HermitianAffineForm& form, int merge_max_order = 0);

/// Full decomposition pipeline: pattern, chordal embedding, cliques, tree,
/// optional merge, split, consensus, real embedding.
SymmetricDecomposition decompose(const HermitianAffineForm& form, int merge_max_order = 0);

struct FrequencyRecord {
  double omega = 0.0;
  bool wellposed = true;
  double condition = 1.0;
  std::optional<FeasibilityResult> sparse;
  std::optional<FeasibilityResult> lumped;
  std::optional<CliqueStats> cliques;
  double seconds = 0.0;
};

struct AnalysisReport {
  AnalysisOptions options;
  std::vector<FrequencyRecord> records;
  Verdict overall = Verdict::Inconclusive;
  std::optional<Verdict> overall_lumped;  // secondary path when path = Both
  bool ill_posed = false;
  bool grid_approximate = true;
  std::string assumptions;
  double seconds = 0.0;

  void write_text(std::ostream& os) const;
  /// One "key=value ..." record per frequency, then a summary record.
  void write_keyvalue(std::ostream& os) const;
};

/// Combined verdict over grid points: feasible only if every point is.
Verdict aggregate(const std::vector<Verdict>& verdicts);

AnalysisReport analyze(const Network& net, const FrequencyGrid& grid,
                       const AnalysisOptions& opts = {});

struct EquivalenceReport {
  double omega = 0.0;
  Verdict sparse = Verdict::Inconclusive;
  Verdict lumped = Verdict::Inconclusive;
  double t_sparse = 0.0;
  double t_lumped = 0.0;
  bool conclusive = false;  // neither verdict Inconclusive
  bool agree = false;       // conclusive and equal (true when not conclusive)
  int trials = 0;
  double max_congruence_deviation = 0.0;
};

/// Sparse (x shared) versus lumped feasibility at one frequency, plus
/// `trials` congruence identity checks at random variable values.
EquivalenceReport equivalence_check(const Network& net, double omega, int trials,
                                    const SolverOptions& solver = {},
                                    const MultiplierOptions& mult = {},
                                    std::uint64_t seed = 1);

/// Upper bound inf_D sigma_max(D B G_bar D^{-1}) with one positive scalar per
/// subsystem (B = diag of the gain bounds), by compass search in log D.
/// Throws std::invalid_argument for sector uncertainty.
double mu_upper_oracle(const Network& net, double omega);
double mu_upper_oracle(const MatrixXc& g, const std::vector<int>& block_dims);

}  // namespace netiqc
