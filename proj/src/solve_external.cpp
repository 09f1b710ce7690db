#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "gridplan/common.hpp"
#include "gridplan/lp_io.hpp"
#include "gridplan/solver.hpp"

namespace gridplan {

namespace {

namespace fs = std::filesystem;

std::string substitute(std::string tpl, const std::string& key, const std::string& value) {
  size_t pos = 0;
  while ((pos = tpl.find(key, pos)) != std::string::npos) {
    tpl.replace(pos, key.size(), value);
    pos += value.size();
  }
  return tpl;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string tail_of(const std::string& text, size_t max_len = 800) {
  if (text.size() <= max_len) return text;
  return "..." + text.substr(text.size() - max_len);
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tpl = (fs::temp_directory_path() / "gridplan-XXXXXX").string();
    std::vector<char> buf(tpl.begin(), tpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) {
      throw SolverCrashed("cannot create temporary directory under " +
                          fs::temp_directory_path().string());
    }
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

Solution solve_external(const MilpModel& model, const SolveParams& params,
                        const std::string& solver_command) {
  std::string tpl = solver_command;
  if (tpl.empty()) {
    const char* env = std::getenv("GRIDPLAN_SOLVER_CMD");
    tpl = env && *env ? env : default_solver_command();
  }

  TempDir tmp;
  fs::path lp_path = tmp.path / "model.lp";
  fs::path sol_path = tmp.path / "model.sol";
  fs::path err_path = tmp.path / "solver.err";
  {
    std::ofstream out(lp_path);
    out << export_lp(model);
    if (!out) throw SolverCrashed("cannot write " + lp_path.string());
  }

  char tl[32], gap[32];
  std::snprintf(tl, sizeof(tl), "%.6g", params.time_limit_s);
  std::snprintf(gap, sizeof(gap), "%.6g", params.gap_tolerance);
  std::string cmd = tpl;
  cmd = substitute(cmd, "{lp}", lp_path.string());
  cmd = substitute(cmd, "{sol}", sol_path.string());
  cmd = substitute(cmd, "{time_limit}", tl);
  cmd = substitute(cmd, "{gap}", gap);
  cmd += " 2>" + err_path.string();

  auto t0 = std::chrono::steady_clock::now();
  int rc = std::system(cmd.c_str());
  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double>(t1 - t0).count();

  int exit_code = -1;
  if (rc != -1 && WIFEXITED(rc)) exit_code = WEXITSTATUS(rc);
  if (exit_code == 127 || exit_code == 126) {
    throw SolverNotFound("external solver command failed to start (exit " +
                         std::to_string(exit_code) + "): " + tpl);
  }
  if (!fs::exists(sol_path)) {
    throw SolverCrashed("external solver wrote no solution file (exit " +
                        std::to_string(exit_code) + "): " + tail_of(read_text(err_path)));
  }
  Solution sol = parse_solution_text(read_text(sol_path), model);
  sol.wall_time_s = wall;
  return sol;
}

}  // namespace gridplan
