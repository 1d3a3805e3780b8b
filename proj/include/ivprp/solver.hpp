#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ivprp/mip_model.hpp"

namespace ivprp {

enum class SolveStatus { Optimal, Feasible, Infeasible, Timeout };

inline const char* status_tag(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Feasible: return "feasible";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

inline std::optional<SolveStatus> parse_status(const std::string& s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "feasible") return SolveStatus::Feasible;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "timeout") return SolveStatus::Timeout;
  return std::nullopt;
}

/// How to run an external solver. The command template is expanded by
/// replacing {lp}, {sol}, {timelimit} and {gap}, then run through the shell.
/// The solver writes `name value` lines to {sol}; `# status: ...` and
/// `# gap: ...` comment lines are honoured. Without a status line the exit
/// code is looked up in `exit_status`; an unmapped nonzero exit is an error
/// and an unmapped zero exit means "feasible".
struct SolverConfig {
  std::string command;
  double time_limit = 60;
  double gap = 1e-4;
  std::map<int, SolveStatus> exit_status;
  std::optional<std::filesystem::path> work_dir;
  bool keep_files = false;
};

inline void check_config(const SolverConfig& cfg) {
  if (cfg.command.find("{lp}") == std::string::npos) throw Error("solver command must contain {lp}: " + cfg.command);
  if (!(cfg.time_limit > 0)) throw Error("solver time limit must be positive");
}

/// Config from IVPRP_SOLVER_CMD, if set.
inline std::optional<SolverConfig> solver_config_from_env() {
  const char* cmd = std::getenv("IVPRP_SOLVER_CMD");
  if (!cmd || !*cmd) return std::nullopt;
  SolverConfig cfg;
  cfg.command = cmd;
  return cfg;
}

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  Assignment values;  // restricted to model variables
  std::optional<double> gap;
  std::optional<double> objective;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) s.replace(p, from.size(), to);
  return s;
}

inline std::string shell_quote(const std::string& s) { return "'" + replace_all(s, "'", "'\\''") + "'"; }

inline std::string number_arg(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

inline std::filesystem::path make_work_dir(const SolverConfig& cfg) {
  static std::atomic<unsigned> counter{0};
  const auto base = cfg.work_dir ? *cfg.work_dir : std::filesystem::temp_directory_path();
  std::filesystem::create_directories(base);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto dir = base / ("ivprp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (std::filesystem::create_directory(dir)) return dir;
  }
  throw Error("could not create a solver work directory under " + base.string());
}

}  // namespace detail

inline SolveResult solve_via_external(const MipModel& model, const SolverConfig& cfg) {
  check_config(cfg);
  const auto dir = detail::make_work_dir(cfg);
  const auto lp = dir / "model.lp", sol = dir / "model.sol";
  {
    std::ofstream out(lp);
    if (!out) throw Error("cannot write " + lp.string());
    emit_lp(model, out);
  }
  std::string cmd = cfg.command;
  cmd = detail::replace_all(cmd, "{lp}", detail::shell_quote(lp.string()));
  cmd = detail::replace_all(cmd, "{sol}", detail::shell_quote(sol.string()));
  cmd = detail::replace_all(cmd, "{timelimit}", detail::number_arg(cfg.time_limit));
  cmd = detail::replace_all(cmd, "{gap}", detail::number_arg(cfg.gap));
  const int raw = std::system(cmd.c_str());
  if (raw == -1) throw Error("could not start solver: " + cmd);
  const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + (WIFSIGNALED(raw) ? WTERMSIG(raw) : 0);

  SolveResult res;
  SolutionFile file;
  if (std::filesystem::exists(sol)) {
    std::ifstream in(sol);
    std::stringstream buf;
    buf << in.rdbuf();
    file = parse_assignment_text(buf.str());
  }
  if (!cfg.keep_files) std::filesystem::remove_all(dir);

  if (file.status) {
    auto st = parse_status(*file.status);
    if (!st) throw Error("solver reported unknown status '" + *file.status + "'");
    res.status = *st;
  } else if (auto it = cfg.exit_status.find(code); it != cfg.exit_status.end()) {
    res.status = it->second;
  } else if (code != 0) {
    throw Error("solver exited with code " + std::to_string(code) + ": " + cmd);
  } else {
    res.status = SolveStatus::Feasible;
  }
  res.gap = file.gap;
  if (res.status == SolveStatus::Optimal || res.status == SolveStatus::Feasible) {
    if (file.values.empty()) throw Error("solver reported " + std::string(status_tag(res.status)) + " but wrote no values");
    int missing = 0;
    for (const Variable& v : model.variables) {
      auto it = file.values.find(v.name);
      res.values[v.name] = it == file.values.end() ? 0.0 : it->second;
      missing += it == file.values.end();
    }
    if (missing > 0) res.warnings.push_back(std::to_string(missing) + " model variables missing from the solution, set to 0");
    res.objective = objective_value(model, res.values);
  }
  return res;
}

/// Re-solves with `fixed` variables pinned by equality rows.
inline SolveResult fix_and_resolve(const MipModel& model, const std::map<std::string, double>& fixed, const SolverConfig& cfg) {
  MipModel m = model;
  for (const auto& [name, value] : fixed) {
    const auto var = m.find(name);
    if (!var) throw Error("cannot fix unknown variable " + name);
    m.constraints.push_back({"fix_" + name, "fix", {{*var, 1.0}}, Sense::Equal, value});
  }
  return solve_via_external(m, cfg);
}

}  // namespace ivprp
