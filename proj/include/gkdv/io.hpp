#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gkdv/field.hpp"
#include "json.hpp"

namespace gkdv {

/// %.17g: round-trip exact for float64.
std::string format_double(double v);

/// A table of named columns; one row per entry.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Header line of column names, then one line per row, '\n' line ends.
std::string to_csv(const Series& series);
/// Throws ConfigError if the file is missing or malformed.
Series read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Snapshot layout: 64-byte header ("GKDV0001", n u64, L f64, t f64,
/// flags u64 with bit 0 = real, 24 zero bytes), then n (re, im) float64
/// pairs, all little-endian.
inline constexpr std::size_t kSnapshotHeaderBytes = 64;
std::string encode_snapshot(const Field& field, double t);
void write_snapshot(const std::filesystem::path& path, const Field& field, double t);

struct Snapshot {
  Field field;
  double t = 0.0;
};
Snapshot read_snapshot(const std::filesystem::path& path);

/// Files written under one output directory, in order, for the manifest inventory.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);
  const std::filesystem::path& root() const noexcept { return root_; }
  /// `relative` may contain subdirectories, which are created.
  void write(const std::filesystem::path& relative, std::string_view bytes);
  void add(const std::filesystem::path& relative);
  const std::vector<std::filesystem::path>& files() const noexcept { return files_; }
  /// [{path, bytes, sha256}] for every recorded file.
  nlohmann::ordered_json inventory() const;

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> files_;
};

/// Reads the series behind each family from `dir` and writes
/// `plot/<family>.dat` plus `plot/plot.gp`. Families:
///   invariants  (diagnostics.csv: t, I1_re, I2, I3)
///   weighted    (diagnostics.csv: t, winf, lower, deviation)
///   persistence (persistence.csv: t, deviation, lambda_half)
///   windowed    (windowed.csv: t and one column per order)
/// Throws ConfigError for an unknown family or a missing series file.
/// Returns the written paths relative to `dir`.
std::vector<std::filesystem::path> emit_plot_data(OutputDir& out,
                                                  const std::vector<std::string>& families);

}  // namespace gkdv
