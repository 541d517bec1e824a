#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sketchmap/bitvec.hpp"

namespace sketchmap {

/// An external SMT-LIB2 solver: reads a script on stdin, answers on stdout.
struct SolverConfig {
  std::string name;
  std::vector<std::string> command;  // argv; argv[0] is looked up on PATH
  double timeout = 120.0;            // seconds per query
};

enum class SatStatus { Sat, Unsat, Timeout };

struct SolveResult {
  SatStatus status = SatStatus::Timeout;
  std::map<std::string, BitVec> model;  // only for Sat with get-value
  std::string winner;
  double seconds = 0;
};

/// Runs every solver on `script` concurrently; the first sat/unsat answer wins
/// and the remaining processes are killed. Returns Timeout once `budget`
/// (and every per-solver timeout) has passed without an answer. Throws
/// AllSolversFailed when every backend exits without a definitive answer.
SolveResult portfolio_solve(const std::string& script, const std::vector<SolverConfig>& solvers, double budget);

/// Known solvers found on PATH, in a fixed order.
std::vector<SolverConfig> default_portfolio(double timeout = 120.0);

/// Reads `{"solvers": [{"name": ..., "command": [...], "timeout": s}]}`.
std::vector<SolverConfig> load_solver_config(const std::string& path);

/// Solvers from a comma-separated list of names (as in default_portfolio) or a config file path.
std::vector<SolverConfig> resolve_solvers(const std::string& spec, double timeout);

}  // namespace sketchmap
