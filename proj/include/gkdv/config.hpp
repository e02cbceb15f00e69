#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "gkdv/dynamics.hpp"
#include "gkdv/reference.hpp"

namespace gkdv {

enum class Command { simulate, picard, regularity, validate };
enum class DataKind { cazenave_naumkin, traveling_wave, one_sided, file };
enum class PhiKind { none, gaussian, random };

std::string to_string(Command c);
std::string to_string(DataKind k);
std::string to_string(PhiKind k);
std::string to_string(ConstantMode m);
Command parse_command(const std::string& text);

struct DataConfig {
  DataKind kind = DataKind::cazenave_naumkin;
  // cazenave_naumkin
  std::optional<double> lambda;  ///< defaults to model.lambda
  double theta = 0.0;
  PhiKind phi = PhiKind::none;
  double phi_amplitude = 0.5;  ///< sup <x>^m |phi| as a fraction of lambda
  // traveling_wave
  double c = 1.0;
  ConstantMode constant_mode = ConstantMode::ode_derived;
  // one_sided
  double x0 = 4.0;
  int s = 4;
  int l = 2;
  double kink_amplitude = 1e-3;
  double kink_width = 4.0;
  // file
  std::string path;

  bool operator==(const DataConfig&) const = default;
};

struct RunConfig {
  Command command = Command::simulate;
  std::size_t n = 1024;
  double L = 32.0 * 3.14159265358979323846;

  double alpha = 0.5;
  int sign = 1;
  std::optional<int> s;          ///< defaults to 2m + 4
  double lambda = 0.1;
  std::optional<double> delta;   ///< unset: 1.01 times the measured delta sum of u0

  double T = 1.0;
  double dt = 1e-3;
  std::size_t slices = 16;
  Scheme scheme = Scheme::etdrk4;

  DataConfig data;

  double picard_slices_per_unit = 64.0;
  std::size_t picard_max_halvings = 6;
  std::size_t picard_max_iter = 50;
  double picard_tol = 1e-9;

  double front_v = 10.0;
  double front_eps = 0.5;
  double front_b = 2.5;
  double front_R = 10.0;

  bool snapshots = true;
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  /// alpha, sign, s and lambda; delta when set, else the ModelParams default.
  ModelParams model() const;
  int m() const;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `section.key = value` lines with `#` comments. Required keys:
/// model.alpha, data.kind, time.T. Throws ParseError with the line number on
/// unknown or repeated keys, malformed values and violated constraints.
/// `command` replaces run.command before the constraints are checked.
RunConfig parse_config(const std::string& text, std::optional<Command> command = std::nullopt);
RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

/// Every key with its value, floats at 17 significant digits, derived
/// quantities as comments. parse_config(print_config(c)) == c.
std::string print_config(const RunConfig& config);

/// The configuration `validate` runs on when no file is given.
RunConfig default_validate_config();

}  // namespace gkdv
