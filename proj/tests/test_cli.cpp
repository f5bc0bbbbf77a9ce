#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "netiqc/netfile.hpp"

using namespace netiqc;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("netiqc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd =
      std::string("\"") + NETIQC_CLI_PATH + "\" " + args + " > \"" + stdout_path + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("chain generator and analysis exit codes") {
  Scratch tmp;
  CHECK(run("chain 50 --emit " + tmp("c50.net")) == 0);
  const auto nf = load_network_file(tmp("c50.net"));
  CHECK(nf.network.size() == 50);
  CHECK(nf.network.gamma().ones() == 98);

  CHECK(run("chain 5 --gain 0.5 --emit " + tmp("ok.net")) == 0);
  CHECK(run("chain 5 --gain 1.5 --emit " + tmp("bad.net")) == 0);
  CHECK(run("analyze " + tmp("ok.net") + " --grid 0,1") == 0);
  CHECK(run("analyze " + tmp("bad.net") + " --grid 0,1") == 1);
  CHECK(run("analyze " + tmp("ok.net") + " --grid 0,1 --mode dist --x diag --merge 6") == 0);
  CHECK(run("analyze " + tmp("bad.net") + " --grid 0 --path both --format kv --out " +
            tmp("r.kv")) == 1);
  const auto kv = slurp(tmp("r.kv"));
  CHECK(kv.find("overall=Infeasible") != std::string::npos);
  CHECK(kv.find("overall_lumped=Infeasible") != std::string::npos);

  CHECK(run("analyze " + tmp("ok.net") + " --grid 1 --trace " + tmp("t.csv")) == 0);
  CHECK(slurp(tmp("t.csv")).find("# omega 1") == 0);
}

TEST_CASE("ill-posed networks are inconclusive") {
  Scratch tmp;
  std::ofstream(tmp("ill.net")) << "[subsystem s]\ndims = 1 1 1\nD = 0 1; 1 1\n"
                                   "uncertainty = normbounded 1\n[edges]\nfrom s.z1 to s.w1\n";
  CHECK(run("analyze " + tmp("ill.net") + " --grid 0") == 2);
}

TEST_CASE("usage and parse errors") {
  Scratch tmp;
  std::ofstream(tmp("junk.net")) << "[subsystem s]\ndims = 1 1\n";
  CHECK(run("analyze " + tmp("junk.net")) == 64);
  CHECK(run("analyze " + tmp("missing.net")) == 64);
  CHECK(run("") == 64);
  CHECK(run("analyze") == 64);
  CHECK(run("frobnicate") == 64);
  CHECK(run("chain 1") == 64);
  CHECK(run("chain 5 --emit " + tmp("c.net")) == 0);
  CHECK(run("analyze " + tmp("c.net") + " --mode sideways") == 64);
  CHECK(run("analyze " + tmp("c.net") + " --grid 2,1") == 64);
  CHECK(run("--help") == 0);
}

TEST_CASE("pattern export") {
  Scratch tmp;
  CHECK(run("chain 50 --emit " + tmp("c50.net")) == 0);
  CHECK(run("pattern " + tmp("c50.net") + " --omega 1 --out " + tmp("p.txt") + " --cliques " +
                tmp("k.txt"),
            tmp("summary.txt")) == 0);
  const auto summary = slurp(tmp("summary.txt"));
  CHECK(summary.find("order 148") != std::string::npos);
  CHECK(summary.find("cliques 98") != std::string::npos);
  CHECK(summary.find("max clique order 4") != std::string::npos);

  const auto form = build_sparse_lmi(load_network_file(tmp("c50.net")).network, 1.0,
                                     XMode::SharedScalar);
  const auto pat = pattern_of(form);
  std::istringstream coords(slurp(tmp("p.txt")));
  long lines = 0;
  int r, c;
  while (coords >> r >> c) {
    CHECK(pat.contains(r, c));
    ++lines;
  }
  CHECK(lines == pat.nonzeros());
  CHECK(std::ranges::count(slurp(tmp("k.txt")), '\n') == 98);

  CHECK(run("pattern " + tmp("c50.net") + " --merge 5", tmp("merged.txt")) == 0);
  CHECK(slurp(tmp("merged.txt")).find("cliques 50") != std::string::npos);
}
