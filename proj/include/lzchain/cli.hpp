#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lzchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitTolerance = 3;

inline constexpr const char* kVersion = "0.1.0";

/// Effective settings of one invocation, after presets, config file and
/// command-line flags have been merged.
struct RunConfig {
  std::string command;
  std::string kind = "ising";
  int n = 201;
  double j = 1.0;
  double lambda = 0.0;
  double gamma = 1.0;
  double delta = 0.0;
  double g = 0.1;
  double v = 50.0;
  double hbar = 1.0;
  std::vector<std::string> grids;
  std::string preset;
  double t_span = 40.0;
  double tolerance = 0.02;
  std::string out;
  std::string format = "tsv";
  int precision = 17;
  bool strict_gapless = false;
};

/// key=value text that `--config` reads back into the same RunConfig.
std::string dump_config(const RunConfig& config);

/// Entry point. Returns 0 on success, 2 on invalid input, 3 when an oracle
/// run fails to converge or exceeds its tolerance.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lzchain::cli
