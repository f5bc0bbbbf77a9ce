#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "netiqc/analysis.hpp"

namespace netiqc {

/// Syntax or consistency error in a network file; `line` is 1-based
/// (0 when the problem is not tied to one line).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Contents of a network description:
///
///   [subsystem s1]
///   dims = 1 1 1              # d m l
///   A = -1                    # rows separated by ';' (omit A, B, C for a static gain)
///   B = 1 0.1
///   C = 0.5; 1
///   D = 0 0; 0 0
///   uncertainty = normbounded 1   # | fullblock g | sector a b
///
///   [edges]
///   from s1.z1 to s2.w1       # 1-based ports
///
///   [grid]
///   points = 0, log:0.01:100:50, inf
///
///   [solver]
///   tol = 1e-6
///   max_iter = 20000
///   rho = 1
///   multiplier_floor = 0.001
struct NetworkFile {
  Network network;
  std::optional<FrequencyGrid> grid;
  SolverOptions solver;
  MultiplierOptions multiplier;
};

NetworkFile parse_network_file(std::istream& in);
NetworkFile parse_network_file(const std::string& text);
NetworkFile load_network_file(const std::string& path);

/// Writes a file that parses back to the same network (full precision).
/// Subsystems must carry state-space realizations.
void write_network_file(std::ostream& os, const NetworkFile& file);

}  // namespace netiqc
