#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gkdv/config.hpp"
#include "gkdv/field.hpp"

namespace gkdv {

/// Exit status of `validate` when a check fails; 1..5 are the module error codes.
inline constexpr int kValidateFailed = 6;

const char* version();

/// u0 described by config.data on the config grid. Random perturbations draw
/// from config.seed.
Field make_initial_data(const RunConfig& config);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper = true;  ///< pass means value <= threshold, else value >= threshold
  bool pass = false;
};

CheckResult check_at_most(std::string name, double value, double threshold);
CheckResult check_at_least(std::string name, double value, double threshold);

/// Fast invariant suite: Airy unitarity and group law, the commutator
/// identity, conservation over a short run, the solitary-wave residual,
/// cutoff invariants, the Kato bound and the zero-coupling reduction.
std::vector<CheckResult> validate_suite(const RunConfig& config);

/// Runs config.command and writes config.txt, CSV series, snapshots,
/// plot data and manifest.json under config.out_dir. The manifest is written
/// last, also when the run fails. Returns the exit status: 0, the ExitCode of
/// the error, or kValidateFailed.
int run(const RunConfig& config);

/// Loads the config (validate may run without one), applies the overrides
/// and calls run(). A config that fails to parse still gets a manifest with
/// the error record when an output directory is known.
int run_cli(Command command, const std::optional<std::filesystem::path>& config_path,
            const std::optional<std::filesystem::path>& out_dir,
            const std::optional<std::uint64_t>& seed);

}  // namespace gkdv
