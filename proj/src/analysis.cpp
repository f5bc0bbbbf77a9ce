#include "netiqc/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace netiqc {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "INF") return kInf;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in grid spec");
  }
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "' in grid spec");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<double> log_points(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1 || !std::isfinite(hi)) {
    throw std::invalid_argument("log grid needs 0 < lo <= hi < inf and n >= 1");
  }
  std::vector<double> out;
  if (n == 1) return {lo};
  const double a = std::log10(lo), b = std::log10(hi);
  for (int k = 0; k < n; ++k) out.push_back(std::pow(10.0, a + (b - a) * k / (n - 1)));
  return out;
}

}  // namespace

FrequencyGrid FrequencyGrid::of(std::vector<double> points) {
  for (double w : points) {
    if (std::isnan(w) || w < 0.0) throw std::invalid_argument("frequencies must be nonnegative");
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.empty()) throw std::invalid_argument("frequency grid is empty");
  return FrequencyGrid{std::move(points)};
}

FrequencyGrid FrequencyGrid::standard() {
  std::vector<double> p{0.0};
  for (double w : log_points(1e-2, 1e2, 50)) p.push_back(w);
  p.push_back(kInf);
  return of(std::move(p));
}

FrequencyGrid FrequencyGrid::parse(const std::string& spec) {
  std::vector<double> p;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw std::invalid_argument("empty item in grid spec");
    if (item.rfind("log:", 0) == 0) {
      std::vector<std::string> parts;
      std::stringstream is(item.substr(4));
      std::string part;
      while (std::getline(is, part, ':')) parts.push_back(trim(part));
      if (parts.size() != 3) throw std::invalid_argument("expected log:lo:hi:n, got '" + item + "'");
      const double n = parse_number(parts[2]);
      if (n != std::floor(n) || n < 1 || n > 1e6) throw std::invalid_argument("bad point count in '" + item + "'");
      for (double w : log_points(parse_number(parts[0]), parse_number(parts[1]), static_cast<int>(n))) {
        p.push_back(w);
      }
    } else {
      p.push_back(parse_number(item));
    }
  }
  for (size_t k = 1; k < p.size(); ++k) {
    if (!(p[k] > p[k - 1])) throw std::invalid_argument("grid points must be strictly increasing");
  }
  return of(std::move(p));
}

std::string FrequencyGrid::to_string() const {
  std::string out;
  for (size_t k = 0; k < points.size(); ++k) {
    if (k) out += ',';
    out += num(points[k]);
  }
  return out;
}

std::string to_string(LmiPath p) {
  switch (p) {
    case LmiPath::Sparse: return "sparse";
    case LmiPath::Lumped: return "lumped";
    case LmiPath::Both: return "both";
  }
  return "?";
}

std::string to_string(SolveMode m) { return m == SolveMode::Centralized ? "central" : "dist"; }

CliqueTree clique_tree_of(const HermitianAffineForm& form, int merge_max_order) {
  const auto emb = chordal_embedding(pattern_of(form));
  CliqueTree tree = clique_tree(maximal_cliques(emb.graph, emb.ordering));
  if (merge_max_order > 0) tree = merge_cliques(tree, merge_max_order);
  return tree;
}

CliqueStats clique_stats(const HermitianAffineForm& form, int merge_max_order) {
  const auto pattern = pattern_of(form);
  const auto emb = chordal_embedding(pattern);
  const CliqueTree tree = clique_tree(maximal_cliques(emb.graph, emb.ordering));
  CliqueStats s;
  s.order = form.order();
  s.nonzeros = pattern.nonzeros();
  s.fill = emb.fill;
  s.cliques = tree.size();
  s.max_clique = tree.max_order();
  if (merge_max_order > 0) {
    const CliqueTree merged = merge_cliques(tree, merge_max_order);
    s.solved_cliques = merged.size();
    s.solved_max_clique = merged.max_order();
    s.merge_refused = merged.merge_refused;
  } else {
    s.solved_cliques = s.cliques;
    s.solved_max_clique = s.max_clique;
  }
  return s;
}

SymmetricDecomposition decompose(const HermitianAffineForm& form, int merge_max_order) {
  return realify(attach_consensus(split_form(form, clique_tree_of(form, merge_max_order))));
}

Verdict aggregate(const std::vector<Verdict>& verdicts) {
  if (verdicts.empty()) return Verdict::Inconclusive;
  bool all_feasible = true;
  for (Verdict v : verdicts) {
    if (v == Verdict::Infeasible) return Verdict::Infeasible;
    if (v != Verdict::StrictlyFeasible) all_feasible = false;
  }
  return all_feasible ? Verdict::StrictlyFeasible : Verdict::Inconclusive;
}

AnalysisReport analyze(const Network& net, const FrequencyGrid& grid, const AnalysisOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  AnalysisReport rep;
  rep.options = opts;
  rep.assumptions =
      "well-posedness along the uncertainty homotopy and validity of the multiplier class "
      "are assumed; only invertibility of I - Gamma*Gzw is checked at each grid point";
  const bool sparse = opts.path != LmiPath::Lumped;
  const bool lumped = opts.path != LmiPath::Sparse;

  for (double omega : grid.points) {
    const auto t0 = Clock::now();
    FrequencyRecord rec;
    rec.omega = omega;
    const auto wp = check_wellposed(net, omega, opts.condition_bound);
    rec.wellposed = wp.wellposed;
    rec.condition = wp.condition_estimate;
    if (!wp.wellposed) {
      rep.ill_posed = true;
      rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      rep.records.push_back(std::move(rec));
      break;
    }
    if (sparse) {
      const auto form = build_sparse_lmi(net, omega, opts.x_mode, opts.multiplier);
      rec.cliques = clique_stats(form, opts.merge_max_order);
      if (opts.mode == SolveMode::Centralized) {
        rec.sparse = solve_centralized(realify(form), opts.solver);
      } else {
        rec.sparse = solve_decomposed(decompose(form, opts.merge_max_order), opts.solver);
      }
    }
    if (lumped) {
      rec.lumped = solve_centralized(realify(build_lumped_lmi(net, omega, opts.multiplier)),
                                     opts.solver);
    }
    rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    rep.records.push_back(std::move(rec));
  }

  std::vector<Verdict> vs, vl;
  for (const auto& r : rep.records) {
    if (r.sparse) vs.push_back(r.sparse->verdict);
    if (r.lumped) vl.push_back(r.lumped->verdict);
  }
  rep.overall = aggregate(sparse ? vs : vl);
  if (opts.path == LmiPath::Both) rep.overall_lumped = aggregate(vl);
  if (rep.ill_posed) {
    rep.overall = Verdict::Inconclusive;
    if (rep.overall_lumped) rep.overall_lumped = Verdict::Inconclusive;
  }
  rep.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return rep;
}

void AnalysisReport::write_text(std::ostream& os) const {
  os << "netiqc robust stability report\n";
  os << "path: " << to_string(options.path) << "   mode: " << to_string(options.mode)
     << "   x: " << to_string(options.x_mode) << "   merge: " << options.merge_max_order << '\n';
  os << "overall verdict: " << to_string(overall) << '\n';
  if (overall_lumped) os << "lumped verdict: " << to_string(*overall_lumped) << '\n';
  if (ill_posed) os << "note: interconnection ill-posed at a grid point; analysis stopped\n";
  os << "grid points analyzed: " << records.size() << '\n';
  if (grid_approximate) {
    os << "caveat: grid-approximate; frequencies between grid points are not certified\n";
  }
  os << "assumptions: " << assumptions << '\n';
  for (const auto& r : records) {
    if (!r.cliques) continue;
    const auto& c = *r.cliques;
    os << "sparse LMI: order " << c.order << ", nonzeros " << c.nonzeros << ", fill " << c.fill
       << ", cliques " << c.cliques << " (max order " << c.max_clique << ")";
    if (options.merge_max_order > 0) {
      os << ", merged " << c.solved_cliques << " (max order " << c.solved_max_clique << ")";
      if (c.merge_refused) os << " [merge refused]";
    }
    os << '\n';
    break;
  }
  os << "time: " << short_num(seconds) << " s\n\n";
  os << "omega          wellposed  sparse             t_sparse       lumped             t_lumped\n";
  for (const auto& r : records) {
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %-10s %-18s %-14s %-18s %-14s\n",
                  short_num(r.omega).c_str(), r.wellposed ? "yes" : "no",
                  r.sparse ? to_string(r.sparse->verdict).c_str() : "-",
                  r.sparse ? short_num(r.sparse->t_star).c_str() : "-",
                  r.lumped ? to_string(r.lumped->verdict).c_str() : "-",
                  r.lumped ? short_num(r.lumped->t_star).c_str() : "-");
    os << line;
  }
}

void AnalysisReport::write_keyvalue(std::ostream& os) const {
  auto result = [&](const char* prefix, const FeasibilityResult& f) {
    os << ' ' << prefix << "_verdict=" << to_string(f.verdict) << ' ' << prefix
       << "_t=" << num(f.t_star) << ' ' << prefix << "_lower=" << num(f.lower_bound) << ' '
       << prefix << "_eps=" << num(f.eps_feas) << ' ' << prefix << "_iterations=" << f.iterations
       << ' ' << prefix << "_converged=" << (f.converged ? 1 : 0);
  };
  for (const auto& r : records) {
    os << "omega=" << num(r.omega) << " wellposed=" << (r.wellposed ? 1 : 0)
       << " condition=" << num(r.condition);
    if (r.sparse) result("sparse", *r.sparse);
    if (r.lumped) result("lumped", *r.lumped);
    if (r.cliques) {
      os << " order=" << r.cliques->order << " cliques=" << r.cliques->cliques
         << " max_clique=" << r.cliques->max_clique
         << " solved_cliques=" << r.cliques->solved_cliques;
    }
    os << " seconds=" << num(r.seconds) << '\n';
  }
  os << "overall=" << to_string(overall);
  if (overall_lumped) os << " overall_lumped=" << to_string(*overall_lumped);
  os << " path=" << to_string(options.path) << " mode=" << to_string(options.mode)
     << " x=" << to_string(options.x_mode) << " points=" << records.size()
     << " ill_posed=" << (ill_posed ? 1 : 0) << " grid_approximate=" << (grid_approximate ? 1 : 0)
     << " seconds=" << num(seconds) << '\n';
}

EquivalenceReport equivalence_check(const Network& net, double omega, int trials,
                                    const SolverOptions& solver, const MultiplierOptions& mult,
                                    std::uint64_t seed) {
  EquivalenceReport rep;
  rep.omega = omega;
  rep.trials = trials;
  const auto sparse_form = build_sparse_lmi(net, omega, XMode::SharedScalar, mult);
  const auto s = solve_centralized(realify(sparse_form), solver);
  const auto l = solve_centralized(realify(build_lumped_lmi(net, omega, mult)), solver);
  rep.sparse = s.verdict;
  rep.lumped = l.verdict;
  rep.t_sparse = s.t_star;
  rep.t_lumped = l.t_star;
  rep.conclusive = s.verdict != Verdict::Inconclusive && l.verdict != Verdict::Inconclusive;
  rep.agree = !rep.conclusive || s.verdict == l.verdict;

  std::mt19937_64 rng(seed);
  for (int k = 0; k < trials; ++k) {
    std::vector<double> v;
    for (const auto& var : sparse_form.variables()) {
      std::uniform_real_distribution<double> u(var.lower, var.upper);
      v.push_back(u(rng));
    }
    const auto c = congruence_transform(sparse_form, net, omega, XMode::SharedScalar, v, mult);
    rep.max_congruence_deviation = std::max(rep.max_congruence_deviation, c.max_deviation());
  }
  return rep;
}

double mu_upper_oracle(const MatrixXc& g, const std::vector<int>& block_dims) {
  const int n = static_cast<int>(g.rows());
  int total = 0;
  for (int d : block_dims) total += d;
  if (g.cols() != n || total != n) throw std::invalid_argument("block dims do not match G");
  const int nb = static_cast<int>(block_dims.size());
  if (n == 0) return 0.0;

  auto value = [&](const std::vector<double>& logd) {
    VectorXr d(n);
    int off = 0;
    for (int b = 0; b < nb; ++b) {
      for (int k = 0; k < block_dims[b]; ++k) d(off + k) = std::exp(logd[b]);
      off += block_dims[b];
    }
    const MatrixXc scaled = d.cast<Complex>().asDiagonal() * g *
                            d.cwiseInverse().cast<Complex>().asDiagonal();
    Eigen::JacobiSVD<MatrixXc> svd(scaled);
    return svd.singularValues()(0);
  };

  // Directions: coordinates, pairwise sums and differences.
  std::vector<std::vector<double>> dirs;
  for (int a = 1; a < nb; ++a) {
    std::vector<double> e(nb, 0.0);
    e[a] = 1.0;
    dirs.push_back(e);
    for (int b = a + 1; b < nb; ++b) {
      auto p = e, m = e;
      p[b] = 1.0;
      m[b] = -1.0;
      dirs.push_back(p);
      dirs.push_back(m);
    }
  }
  std::vector<double> x(nb, 0.0);
  double best = value(x);
  for (double h = 2.0; h > 1e-6; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (const auto& dir : dirs) {
        for (double sgn : {1.0, -1.0}) {
          auto y = x;
          for (int b = 0; b < nb; ++b) y[b] += sgn * h * dir[b];
          const double v = value(y);
          if (v < best * (1.0 - 1e-12)) {
            best = v;
            x = std::move(y);
            improved = true;
          }
        }
      }
    }
  }
  return best;
}

double mu_upper_oracle(const Network& net, double omega) {
  std::vector<int> dims;
  VectorXr bounds(net.total_d());
  int off = 0;
  for (int i = 0; i < net.size(); ++i) {
    const auto& u = net.uncertainty()[i];
    if (!u.is_norm_bounded()) throw std::invalid_argument("oracle supports norm-bounded blocks only");
    dims.push_back(u.dim);
    for (int k = 0; k < u.dim; ++k) bounds(off + k) = u.bound;
    off += u.dim;
  }
  const MatrixXc g = bounds.cast<Complex>().asDiagonal() * lumped_system(net, omega);
  return mu_upper_oracle(g, dims);
}

}  // namespace netiqc
