#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cda {

struct RunOptions {
  std::string command;  // bne, simulate, price-cdf, payoff, welfare, verify
  std::string config_path;
  std::optional<std::string> out;  // CSV destination; stdout when empty
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<int> workers;
};

const std::vector<std::string>& commands();

/// Runs one command. CSV goes to opts.out (or `csv` when unset), the human
/// summary to `report`, errors to `err`. Returns the process exit status:
/// 0 success, 1 verification failure, 2 configuration error, 3 compute error.
int run(const RunOptions& opts, std::ostream& csv, std::ostream& report, std::ostream& err);

/// Diagnostics level from CDA_LAB_LOG: 0 quiet, 1 info, 2 debug.
int log_level();

/// "%.17g"
std::string format_double(double v);

}  // namespace cda
