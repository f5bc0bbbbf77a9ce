#include "netiqc/netfile.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace netiqc {

ParseError::ParseError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

double to_double(const std::string& s, int line) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ParseError(line, "expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s, int line) {
  const double v = to_double(s, line);
  if (v != std::floor(v) || v < 0 || v > 1e9) throw ParseError(line, "expected a count, got '" + s + "'");
  return static_cast<int>(v);
}

MatrixXr parse_matrix(const std::string& text, int line) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::string r = row;
    for (char& ch : r) {
      if (ch == ',') ch = ' ';
    }
    std::vector<double> vals;
    for (const auto& w : words(r)) vals.push_back(to_double(w, line));
    rows.push_back(std::move(vals));
  }
  if (rows.size() == 1 && rows[0].empty()) return MatrixXr(0, 0);
  const size_t cols = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != cols) throw ParseError(line, "matrix rows have different lengths");
  }
  MatrixXr m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

struct PendingSubsystem {
  std::string name;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> keys;  // key -> (value, line)
};

struct PendingEdge {
  std::string from, to;
  int out_port = 0, in_port = 0;
  int line = 0;
};

// "name.z3" -> ("name", 3)
std::pair<std::string, int> port(const std::string& s, char kind, int line) {
  const auto dot = s.rfind('.');
  if (dot == std::string::npos || dot + 2 > s.size() || s[dot + 1] != kind) {
    throw ParseError(line, "expected <name>." + std::string(1, kind) + "<k>, got '" + s + "'");
  }
  const int k = to_int(s.substr(dot + 2), line);
  if (k < 1) throw ParseError(line, "port numbers start at 1");
  return {s.substr(0, dot), k};
}

UncertaintyBlock parse_uncertainty(const std::string& value, int d, int line) {
  const auto w = words(value);
  if (w.empty()) throw ParseError(line, "empty uncertainty");
  UncertaintyBlock u;
  if (w[0] == "normbounded" && w.size() == 2) {
    u = UncertaintyBlock::norm_bounded(d, to_double(w[1], line));
  } else if (w[0] == "fullblock" && w.size() == 2) {
    u = UncertaintyBlock::full_block(d, to_double(w[1], line));
  } else if (w[0] == "sector" && w.size() == 3) {
    u = UncertaintyBlock::sector(d, to_double(w[1], line), to_double(w[2], line));
  } else {
    throw ParseError(line, "uncertainty must be 'normbounded g', 'fullblock g' or 'sector a b'");
  }
  try {
    u.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
  return u;
}

}  // namespace

NetworkFile parse_network_file(std::istream& in) {
  NetworkFile out;
  std::vector<PendingSubsystem> subs;
  std::vector<PendingEdge> edges;
  std::set<std::string> solver_seen, grid_seen;
  enum class Section { None, Subsystem, Edges, Grid, Solver } section = Section::None;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "unterminated section header");
      const auto head = words(line.substr(1, line.size() - 2));
      if (head.size() == 2 && head[0] == "subsystem") {
        for (const auto& s : subs) {
          if (s.name == head[1]) throw ParseError(lineno, "duplicate subsystem '" + head[1] + "'");
        }
        subs.push_back({head[1], lineno, {}});
        section = Section::Subsystem;
      } else if (head.size() == 1 && head[0] == "edges") {
        section = Section::Edges;
      } else if (head.size() == 1 && head[0] == "grid") {
        section = Section::Grid;
      } else if (head.size() == 1 && head[0] == "solver") {
        section = Section::Solver;
      } else {
        throw ParseError(lineno, "unknown section '" + line + "'");
      }
      continue;
    }

    if (section == Section::Edges) {
      const auto w = words(line);
      if (w.size() != 4 || w[0] != "from" || w[2] != "to") {
        throw ParseError(lineno, "edge lines look like 'from <name>.z<k> to <name>.w<j>'");
      }
      const auto [from, zk] = port(w[1], 'z', lineno);
      const auto [to, wj] = port(w[3], 'w', lineno);
      edges.push_back({from, to, zk, wj, lineno});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    switch (section) {
      case Section::None:
        throw ParseError(lineno, "'" + key + "' outside of a section");
      case Section::Subsystem: {
        static const std::set<std::string> allowed{"dims", "A", "B", "C", "D", "uncertainty"};
        if (!allowed.count(key)) throw ParseError(lineno, "unknown subsystem key '" + key + "'");
        auto& s = subs.back();
        if (s.keys.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
        s.keys[key] = {value, lineno};
        break;
      }
      case Section::Grid:
        if (key != "points") throw ParseError(lineno, "unknown grid key '" + key + "'");
        if (!grid_seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");
        try {
          out.grid = FrequencyGrid::parse(value);
        } catch (const std::invalid_argument& e) {
          throw ParseError(lineno, e.what());
        }
        break;
      case Section::Solver:
        if (!solver_seen.insert(key).second) throw ParseError(lineno, "duplicate key '" + key + "'");
        if (key == "tol") {
          out.solver.tol = to_double(value, lineno);
          if (!(out.solver.tol > 0)) throw ParseError(lineno, "tol must be positive");
        } else if (key == "max_iter") {
          out.solver.max_iter = to_int(value, lineno);
        } else if (key == "rho") {
          out.solver.rho = to_double(value, lineno);
          if (!(out.solver.rho > 0)) throw ParseError(lineno, "rho must be positive");
        } else if (key == "multiplier_floor") {
          out.multiplier.floor = to_double(value, lineno);
          if (!(out.multiplier.floor > 0 && out.multiplier.floor <= out.multiplier.ceiling)) {
            throw ParseError(lineno, "multiplier_floor must be in (0, 1]");
          }
        } else {
          throw ParseError(lineno, "unknown solver key '" + key + "'");
        }
        break;
      case Section::Edges:
        break;
    }
  }

  if (subs.empty()) throw ParseError(0, "no subsystems defined");
  std::vector<Subsystem> built;
  std::vector<UncertaintyBlock> unc;
  std::map<std::string, int> index;
  for (const auto& s : subs) {
    auto get = [&](const std::string& k) -> const std::pair<std::string, int>* {
      auto it = s.keys.find(k);
      return it == s.keys.end() ? nullptr : &it->second;
    };
    const auto* dims = get("dims");
    if (!dims) throw ParseError(s.line, "subsystem '" + s.name + "' has no dims");
    const auto dw = words(dims->first);
    if (dw.size() != 3) throw ParseError(dims->second, "dims needs three counts: d m l");
    const int d = to_int(dw[0], dims->second), m = to_int(dw[1], dims->second),
              l = to_int(dw[2], dims->second);
    if (d < 1) throw ParseError(dims->second, "d must be at least 1");
    const auto* D = get("D");
    if (!D) throw ParseError(s.line, "subsystem '" + s.name + "' has no D");
    const auto* uk = get("uncertainty");
    if (!uk) throw ParseError(s.line, "subsystem '" + s.name + "' has no uncertainty");
    const MatrixXr dm = parse_matrix(D->first, D->second);
    StateSpace ss;
    if (get("A")) {
      const auto* A = get("A");
      const auto* B = get("B");
      const auto* C = get("C");
      if (!B || !C) throw ParseError(A->second, "A needs B and C");
      auto a = parse_matrix(A->first, A->second);
      auto b = parse_matrix(B->first, B->second);
      auto c = parse_matrix(C->first, C->second);
      try {
        ss = StateSpace(std::move(a), std::move(b), std::move(c), dm);
      } catch (const std::exception& e) {
        throw ParseError(s.line, e.what());
      }
    } else {
      if (get("B") || get("C")) throw ParseError(s.line, "B and C need A");
      ss = StateSpace::static_gain(dm);
    }
    try {
      built.emplace_back(s.name, d, m, l, std::move(ss));
    } catch (const std::exception& e) {
      throw ParseError(s.line, e.what());
    }
    unc.push_back(parse_uncertainty(uk->first, d, uk->second));
    index[s.name] = static_cast<int>(built.size()) - 1;
  }

  std::vector<int> mv, lv;
  for (const auto& s : built) {
    mv.push_back(s.m());
    lv.push_back(s.l());
  }
  Interconnection gamma(mv, lv);
  for (const auto& e : edges) {
    auto f = index.find(e.from);
    auto t = index.find(e.to);
    if (f == index.end()) throw ParseError(e.line, "unknown subsystem '" + e.from + "'");
    if (t == index.end()) throw ParseError(e.line, "unknown subsystem '" + e.to + "'");
    if (e.out_port > built[f->second].l()) throw ParseError(e.line, "output port out of range");
    if (e.in_port > built[t->second].m()) throw ParseError(e.line, "input port out of range");
    try {
      gamma.connect(f->second, e.out_port - 1, t->second, e.in_port - 1);
    } catch (const std::exception& ex) {
      throw ParseError(e.line, ex.what());
    }
  }
  try {
    out.network = Network(std::move(built), std::move(gamma), std::move(unc));
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
  return out;
}

NetworkFile parse_network_file(const std::string& text) {
  std::istringstream in(text);
  return parse_network_file(in);
}

NetworkFile load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_network_file(in);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string matrix(const MatrixXr& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ' ';
      out += num(m(i, j));
    }
  }
  return out;
}

}  // namespace

void write_network_file(std::ostream& os, const NetworkFile& file) {
  const Network& net = file.network;
  for (int i = 0; i < net.size(); ++i) {
    const auto& s = net.subsystem(i);
    if (!s.has_realization()) {
      throw std::invalid_argument("subsystem '" + s.name() + "' has no state-space realization");
    }
    const auto& ss = s.realization();
    os << "[subsystem " << s.name() << "]\n";
    os << "dims = " << s.d() << ' ' << s.m() << ' ' << s.l() << '\n';
    if (ss.states() > 0) {
      os << "A = " << matrix(ss.A) << '\n';
      os << "B = " << matrix(ss.B) << '\n';
      os << "C = " << matrix(ss.C) << '\n';
    }
    os << "D = " << matrix(ss.D) << '\n';
    const auto& u = net.uncertainty()[i];
    os << "uncertainty = " << to_string(u.kind);
    if (u.is_norm_bounded()) {
      os << ' ' << num(u.bound) << '\n';
    } else {
      os << ' ' << num(u.alpha) << ' ' << num(u.beta) << '\n';
    }
    os << '\n';
  }
  os << "[edges]\n";
  const auto& g = net.gamma();
  // Rows of Gamma in input order: input w_i^k receives output z_j^r.
  for (int i = 0; i < net.size(); ++i) {
    for (int k = 0; k < net.subsystem(i).m(); ++k) {
      for (int j = 0; j < net.size(); ++j) {
        const auto blk = g.block(i, j);
        if (!blk) continue;
        for (int r = 0; r < net.subsystem(j).l(); ++r) {
          if ((*blk)(k, r) != 0.0) {
            os << "from " << net.subsystem(j).name() << ".z" << (r + 1) << " to "
               << net.subsystem(i).name() << ".w" << (k + 1) << '\n';
          }
        }
      }
    }
  }
  if (file.grid) os << "\n[grid]\npoints = " << file.grid->to_string() << '\n';
  const SolverOptions defaults;
  const MultiplierOptions mdefaults;
  if (file.solver.tol != defaults.tol || file.solver.max_iter != defaults.max_iter ||
      file.solver.rho != defaults.rho || file.multiplier.floor != mdefaults.floor) {
    os << "\n[solver]\n";
    os << "tol = " << num(file.solver.tol) << '\n';
    os << "max_iter = " << file.solver.max_iter << '\n';
    os << "rho = " << num(file.solver.rho) << '\n';
    os << "multiplier_floor = " << num(file.multiplier.floor) << '\n';
  }
}

}  // namespace netiqc
