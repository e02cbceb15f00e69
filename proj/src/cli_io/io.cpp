#include "gkdv/io.hpp"

#include <openssl/evp.h>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

template <class T>
void put_le(std::string& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

template <class T>
T get_le(const std::string& in, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

struct Family {
  std::string source;
  std::vector<std::string> columns;  // empty: all
};

const std::map<std::string, Family> kFamilies = {
    {"invariants", {"diagnostics.csv", {"t", "I1_re", "I2", "I3"}}},
    {"weighted", {"diagnostics.csv", {"t", "winf", "lower", "deviation"}}},
    {"persistence", {"persistence.csv", {"t", "deviation", "lambda_half"}}},
    {"windowed", {"windowed.csv", {}}},
};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Series& s) {
  std::string out;
  for (std::size_t c = 0; c < s.columns.size(); ++c) {
    if (c) out += ',';
    out += s.columns[c];
  }
  out += '\n';
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

Series read_csv(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("missing series file " + path.string());
  std::istringstream in(read_file(path));
  std::string line;
  Series s;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file, expected a header");
  s.columns = split(line, ',');
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != s.columns.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected " +
                        std::to_string(s.columns.size()) + " cells");
    }
    std::vector<double> row;
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw ConfigError(path.string() + ":" + std::to_string(number) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    s.rows.push_back(std::move(row));
  }
  return s;
}

void atomic_write(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_file(path)); }

std::string encode_snapshot(const Field& field, double t) {
  std::string out = "GKDV0001";
  put_le(out, static_cast<std::uint64_t>(field.size()));
  put_le(out, field.grid().half_length());
  put_le(out, t);
  put_le(out, static_cast<std::uint64_t>(field.is_real() ? 1 : 0));
  out.append(kSnapshotHeaderBytes - out.size(), '\0');
  for (std::size_t j = 0; j < field.size(); ++j) {
    put_le(out, field[j].real());
    put_le(out, field[j].imag());
  }
  return out;
}

void write_snapshot(const fs::path& path, const Field& field, double t) {
  atomic_write(path, encode_snapshot(field, t));
}

Snapshot read_snapshot(const fs::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < kSnapshotHeaderBytes || bytes.compare(0, 8, "GKDV0001") != 0) {
    throw ConfigError(path.string() + ": not a snapshot file");
  }
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto L = get_le<double>(bytes, 16);
  const auto t = get_le<double>(bytes, 24);
  const auto flags = get_le<std::uint64_t>(bytes, 32);
  if (bytes.size() != kSnapshotHeaderBytes + 16 * n) {
    throw ConfigError(path.string() + ": size does not match n = " + std::to_string(n));
  }
  const SpectralGrid grid(static_cast<std::size_t>(n), L);
  CVector values(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t at = kSnapshotHeaderBytes + 16 * j;
    values[j] = Complex(get_le<double>(bytes, at), get_le<double>(bytes, at + 8));
  }
  return {Field(grid, std::move(values), (flags & 1u) != 0), t};
}

OutputDir::OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

void OutputDir::write(const fs::path& relative, std::string_view bytes) {
  atomic_write(root_ / relative, bytes);
  add(relative);
}

void OutputDir::add(const fs::path& relative) {
  for (const auto& f : files_) {
    if (f == relative) return;
  }
  files_.push_back(relative);
}

nlohmann::ordered_json OutputDir::inventory() const {
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : files_) {
    const fs::path full = root_ / f;
    list.push_back({{"path", f.generic_string()},
                    {"bytes", fs::file_size(full)},
                    {"sha256", sha256_file(full)}});
  }
  return list;
}

std::vector<fs::path> emit_plot_data(OutputDir& out, const std::vector<std::string>& families) {
  std::vector<fs::path> written;
  std::string script = "# gnuplot script for the data files in this directory\n"
                       "set terminal pngcairo size 900,600\nset key outside\nset xlabel 't'\n";
  for (const auto& name : families) {
    const auto it = kFamilies.find(name);
    if (it == kFamilies.end()) throw ConfigError("unknown plot family '" + name + "'");
    const Series s = read_csv(out.root() / it->second.source);
    std::vector<std::size_t> pick;
    if (it->second.columns.empty()) {
      for (std::size_t c = 0; c < s.columns.size(); ++c) pick.push_back(c);
    } else {
      for (const auto& col : it->second.columns) {
        std::size_t c = 0;
        while (c < s.columns.size() && s.columns[c] != col) ++c;
        if (c == s.columns.size()) {
          throw ConfigError(it->second.source + ": series lacks column '" + col + "'");
        }
        pick.push_back(c);
      }
    }
    std::string dat = "# " + name + " from " + it->second.source + "\n#";
    for (std::size_t c : pick) dat += " " + s.columns[c];
    dat += '\n';
    for (const auto& row : s.rows) {
      for (std::size_t i = 0; i < pick.size(); ++i) {
        if (i) dat += ' ';
        dat += format_double(row[pick[i]]);
      }
      dat += '\n';
    }
    const fs::path rel = fs::path("plot") / (name + ".dat");
    out.write(rel, dat);
    written.push_back(rel);

    script += "\nset output '" + name + ".png'\nset title '" + name + "'\nplot";
    for (std::size_t i = 1; i < pick.size(); ++i) {
      script += (i > 1 ? ", \\\n     " : " ") + std::string("'") + name + ".dat' using 1:" +
                std::to_string(i + 1) + " with lines title '" + s.columns[pick[i]] + "'";
    }
    script += '\n';
  }
  const fs::path gp = fs::path("plot") / "plot.gp";
  out.write(gp, script);
  written.push_back(gp);
  return written;
}

}  // namespace gkdv
