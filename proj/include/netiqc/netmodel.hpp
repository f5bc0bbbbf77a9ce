#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netiqc/affine_form.hpp"
#include "netiqc/uncertainty.hpp"

namespace netiqc {

/// Raised when a realization cannot be evaluated or a network is malformed.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by operations that need I - Gamma*G_zw to be invertible.
class IllPosedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuous-time LTI realization (A, B, C, D). A may be 0x0 for a static gain.
struct StateSpace {
  MatrixXr A, B, C, D;

  StateSpace() = default;
  StateSpace(MatrixXr a, MatrixXr b, MatrixXr c, MatrixXr d);

  static StateSpace static_gain(MatrixXr d);

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(D.cols()); }
  int outputs() const { return static_cast<int>(D.rows()); }

  /// Throws ModelError on inconsistent dimensions or a non-Hurwitz A.
  void validate() const;
};

/// Frequency response C (j w I - A)^{-1} B + D. `omega` may be negative
/// (conjugate response) or kInf, in which case D is returned exactly.
MatrixXc eval_response(const StateSpace& ss, double omega);

/// Responses tabulated on a grid, for injecting arbitrary data in tests.
struct FrequencySamples {
  int inputs = 0;
  int outputs = 0;
  std::map<double, MatrixXc> table;
};

/// One subsystem: inputs are stacked as [q; w] (d + m), outputs as [p; z]
/// (d + l). The four transfer blocks G_pq, G_pw, G_zq, G_zw are the
/// partitions of a single realization.
class Subsystem {
 public:
  Subsystem() = default;
  Subsystem(std::string name, int d, int m, int l, StateSpace realization);
  Subsystem(std::string name, int d, int m, int l, FrequencySamples samples);

  const std::string& name() const { return name_; }
  int d() const { return d_; }
  int m() const { return m_; }
  int l() const { return l_; }
  bool has_realization() const { return std::holds_alternative<StateSpace>(model_); }
  const StateSpace& realization() const { return std::get<StateSpace>(model_); }
  const FrequencySamples& samples() const { return std::get<FrequencySamples>(model_); }

  /// Full (d + l) x (d + m) response at omega.
  MatrixXc response(double omega) const;

  struct Blocks {
    MatrixXc pq, pw, zq, zw;
  };
  Blocks blocks(double omega) const;

 private:
  std::string name_;
  int d_ = 0, m_ = 0, l_ = 0;
  std::variant<StateSpace, FrequencySamples> model_;
};

/// Sparse 0-1 interconnection w = Gamma z, stored by subsystem blocks
/// (i, j) -> Gamma_ij of size m_i x l_j.
class Interconnection {
 public:
  Interconnection() = default;
  Interconnection(std::vector<int> input_dims, std::vector<int> output_dims);

  int subsystems() const { return static_cast<int>(m_.size()); }
  int total_inputs() const;
  int total_outputs() const;
  int input_offset(int i) const;
  int output_offset(int j) const;

  /// Adds (or ORs into) block (i, j). Entries must be 0 or 1.
  void set_block(int i, int j, const MatrixXr& block);
  /// Connects output `out_port` of subsystem `from` to input `in_port` of `to`.
  void connect(int from, int out_port, int to, int in_port);

  const std::map<std::pair<int, int>, MatrixXr>& blocks() const { return blocks_; }
  std::optional<MatrixXr> block(int i, int j) const;

  /// Assembled sum(m) x sum(l) matrix.
  MatrixXr assembled() const;
  int ones() const;

  /// Throws ModelError when a block is zero, non 0-1, or a row has >1 one.
  void validate() const;

 private:
  std::vector<int> m_, l_;
  std::map<std::pair<int, int>, MatrixXr> blocks_;
};

/// Complex block-diagonal stacks of all subsystem responses at one frequency.
struct NetworkResponse {
  MatrixXc pq, pw, zq, zw;
};

struct WellPosedness {
  bool wellposed = false;
  double condition_estimate = kInf;
};

class Network {
 public:
  Network() = default;
  Network(std::vector<Subsystem> subsystems, Interconnection gamma,
          std::vector<UncertaintyBlock> uncertainty);

  int size() const { return static_cast<int>(subsystems_.size()); }
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  const Subsystem& subsystem(int i) const { return subsystems_.at(i); }
  const Interconnection& gamma() const { return gamma_; }
  const std::vector<UncertaintyBlock>& uncertainty() const { return uncertainty_; }

  int total_d() const;
  int total_m() const;
  int total_l() const;
  int d_offset(int i) const;
  int m_offset(int i) const;

 private:
  std::vector<Subsystem> subsystems_;
  Interconnection gamma_;
  std::vector<UncertaintyBlock> uncertainty_;
};

inline constexpr double kDefaultConditionBound = 1e8;

NetworkResponse assemble_blocks(const Network& net, double omega);

WellPosedness check_wellposed(const Network& net, double omega,
                              double condition_bound = kDefaultConditionBound);

/// G_bar = G_pq + G_pw (I - Gamma G_zw)^{-1} Gamma G_zq. Throws IllPosedError.
MatrixXc lumped_system(const Network& net, double omega,
                       double condition_bound = kDefaultConditionBound);

/// Interior subsystem template for chains: d = 1, m = l = 2, inputs
/// [q, w1, w2], outputs [p, z1, z2]. End subsystems keep only port 2
/// (first system) or port 1 (last system).
Subsystem chain_end(const Subsystem& interior, bool first);

/// Chain of N copies of `interior`: w_i^1 = z_{i-1}^2, w_i^2 = z_{i+1}^1.
Network make_chain(int n, const Subsystem& interior, const UncertaintyBlock& uncertainty);

/// First-order interior template used by the CLI chain generator:
///   x' = -pole x + q + coupling (w1 + w2),  p = gain x,  z1 = z2 = x.
struct ChainTemplate {
  double pole = 1.0;
  double gain = 0.5;
  double coupling = 0.1;
  double delta_bound = 1.0;

  Subsystem interior() const;
};

Network make_chain(int n, const ChainTemplate& tmpl = {});

}  // namespace netiqc
