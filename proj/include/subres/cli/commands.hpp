#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subres/cli/config.hpp"
#include "subres/potential.hpp"

namespace subres::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

/// check-potential, verify-weight, sweep, fit-h, fit-z, quasimode, wick-verify, region-plot.
const std::vector<std::string>& command_names();

/// Runs one command against a parsed config, writing files under config.output_dir.
/// Progress and the verdict go to `out`, diagnostics to `err`. Returns the exit code.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: `subres <command> [--config f] [--set k=v]... [--jobs n] [--out d] [--seed s]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Smallest T (to `tol`) in [0, t_max] for which the admissibility scan passes,
/// assuming passing is monotone in T. Empty when t_max itself fails.
std::optional<double> bisect_t(const Potential& p, const Box& box, int samples_per_dim, double t_max,
                               std::optional<double> restricted_level = std::nullopt,
                               double tol = 1e-3);

}  // namespace subres::cli
