#pragma once

#include <stdexcept>
#include <string>

namespace gkdv {

/// Process exit status associated with each error family.
enum class ExitCode : int {
  ok = 0,
  config = 1,
  blowup = 2,
  precision = 3,
  contamination = 4,
  non_contraction = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid grid, parameters, mismatched inputs, or malformed configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

/// Configuration text that failed to parse; carries the offending line (0 if none).
class ParseError : public ConfigError {
 public:
  ParseError(int line, const std::string& what)
      : ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Non-finite values produced during time integration.
class BlowupError : public Error {
 public:
  BlowupError(double time, long last_good_slice, const std::string& what)
      : Error(ExitCode::blowup, what), time_(time), last_good_slice_(last_good_slice) {}
  double time() const noexcept { return time_; }
  long last_good_slice() const noexcept { return last_good_slice_; }

 private:
  double time_;
  long last_good_slice_;
};

/// Derivative order too high for the grid to resolve above roundoff.
class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what) : Error(ExitCode::precision, what) {}
};

/// Solution mass reaching the periodic seam, or x-weighted operations on such data.
class ContaminationError : public Error {
 public:
  explicit ContaminationError(const std::string& what) : Error(ExitCode::contamination, what) {}
};

/// Picard iteration that failed to contract.
class NonContractionError : public Error {
 public:
  explicit NonContractionError(const std::string& what)
      : Error(ExitCode::non_contraction, what) {}
};

}  // namespace gkdv
