// cli.hpp
// Command-line front end: single inferences, Bell sweeps, phase boundaries
// and finite-difference diagnostics, all emitting CSV.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maxent::cli {

enum class Command { Infer, Bell, Phase, Thermo };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

// lo:hi:step, expanded as lo + i*step for i = 0..floor((hi-lo)/step).
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
};

// Throws std::invalid_argument on malformed text, step <= 0 or hi < lo.
GridSpec parse_grid(std::string_view text);

struct RunConfig {
  Command command = Command::Bell;
  std::string functional_spec = "shannon";
  double tol = 1e-10;
  int max_iter = 200;
  double ridge = 1e-10;
  bool verbose = false;
  std::string out;  // empty: standard output
  std::uint64_t seed = 0;

  // infer / thermo
  std::vector<std::string> observables;  // file paths or builtin:chsh, builtin:chsh_sq
  std::vector<double> targets;
  int dim = 0;
  std::optional<double> b;  // thermo shortcut for constraints {I, B}
  std::string trace;

  // bell
  GridSpec b_range{0.0, 1.0, 0.01};
  double alpha = 1.0;

  // phase
  std::string family = "tsallis";
  GridSpec q_range{1.5, 10.0, 0.5};
};

int cmd_infer(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bell(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_phase(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_thermo(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (flags, optional --config file) and dispatches. Results go to
// --out when given, otherwise to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace maxent::cli
