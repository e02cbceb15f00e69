#include "gkdv/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  int line(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ParseError(line(key), key + ": " + what);
  }
  void require(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  template <class F>
  void read(const std::string& key, F&& parse) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return;
    used_.insert({key, true});
    parse(it->second.value);
  }

  void real(const std::string& key, double& out) {
    read(key, [&](const std::string& v) { out = to_double(key, v); });
  }
  void real(const std::string& key, std::optional<double>& out) {
    read(key, [&](const std::string& v) { out = to_double(key, v); });
  }
  template <class I>
  void integer(const std::string& key, I& out) {
    read(key, [&](const std::string& v) { out = to_integer<I>(key, v); });
  }
  void integer(const std::string& key, std::optional<int>& out) {
    read(key, [&](const std::string& v) { out = to_integer<int>(key, v); });
  }
  void boolean(const std::string& key, bool& out) {
    read(key, [&](const std::string& v) {
      if (v == "true") {
        out = true;
      } else if (v == "false") {
        out = false;
      } else {
        fail(key, "expected true or false, got '" + v + "'");
      }
    });
  }
  template <class E>
  void choice(const std::string& key, E& out, const std::map<std::string, E>& options) {
    read(key, [&](const std::string& v) {
      const auto it = options.find(v);
      if (it == options.end()) {
        std::string list;
        for (const auto& [name, _] : options) list += (list.empty() ? "" : ", ") + name;
        fail(key, "'" + v + "' is not one of " + list);
      }
      out = it->second;
    });
  }

  double to_double(const std::string& key, const std::string& v) const {
    std::string body = v;
    double scale = 1.0;
    for (const char* suffix : {"*pi", "pi"}) {
      const std::string s = suffix;
      if (body.size() > s.size() && body.compare(body.size() - s.size(), s.size(), s) == 0) {
        body = trim(body.substr(0, body.size() - s.size()));
        scale = kPi;
        break;
      }
    }
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
    if (ec != std::errc() || ptr != body.data() + body.size() || body.empty()) {
      fail(key, "expected a real number, got '" + v + "'");
    }
    out *= scale;
    if (!std::isfinite(out)) fail(key, "value must be finite");
    return out;
  }

  template <class I>
  I to_integer(const std::string& key, const std::string& v) const {
    I out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
      fail(key, "expected an integer, got '" + v + "'");
    }
    return out;
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) throw ParseError(entry.line, "unknown key '" + key + "'");
    }
  }

  /// Keys that exist but do not apply in the current configuration.
  void reject_if_present(const std::string& key, const std::string& why) const {
    if (has(key)) fail(key, why);
  }

 private:
  std::map<std::string, Entry> entries_;
  std::map<std::string, bool> used_;
};

const std::map<std::string, Command> kCommands = {{"simulate", Command::simulate},
                                                  {"picard", Command::picard},
                                                  {"regularity", Command::regularity},
                                                  {"validate", Command::validate}};
const std::map<std::string, DataKind> kKinds = {{"cazenave_naumkin", DataKind::cazenave_naumkin},
                                                {"traveling_wave", DataKind::traveling_wave},
                                                {"one_sided", DataKind::one_sided},
                                                {"file", DataKind::file}};
const std::map<std::string, PhiKind> kPhis = {
    {"none", PhiKind::none}, {"gaussian", PhiKind::gaussian}, {"random", PhiKind::random}};
const std::map<std::string, ConstantMode> kModes = {
    {"ode_derived", ConstantMode::ode_derived}, {"paper_literal", ConstantMode::paper_literal}};
const std::map<std::string, Scheme> kSchemes = {{"etdrk4", Scheme::etdrk4},
                                                {"strang", Scheme::strang}};

template <class E>
std::string name_of(const std::map<std::string, E>& table, E value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

const char* const kCazenaveKeys[] = {"data.lambda", "data.theta", "data.phi", "data.phi_amplitude"};
const char* const kWaveKeys[] = {"data.c", "data.constant_mode"};
const char* const kOneSidedKeys[] = {"data.x0", "data.s", "data.l", "data.amplitude", "data.width"};
const char* const kFileKeys[] = {"data.path"};

void validate(const Reader& r, const RunConfig& c) {
  r.require(c.n >= 16 && (c.n & (c.n - 1)) == 0, "grid.n",
            "n = " + std::to_string(c.n) + " must be a power of two >= 16");
  r.require(c.L > 0.0, "grid.L", "L must be positive");
  r.require(c.alpha > 0.0 && c.alpha < 1.0, "model.alpha", "alpha must lie in (0, 1)");
  r.require(c.sign == 1 || c.sign == -1, "model.sign", "sign must be +1 or -1");
  const int m = c.m();
  if (c.s) {
    r.require(*c.s >= 2 * m + 4, "model.s",
              "s = " + std::to_string(*c.s) + " must be at least 2m + 4 = " + std::to_string(2 * m + 4));
  }
  r.require(c.lambda > 0.0, "model.lambda", "lambda must be positive");
  if (c.delta) r.require(*c.delta > 0.0, "model.delta", "delta must be positive");

  r.require(c.T > 0.0, "time.T", "T must be positive");
  r.require(c.dt > 0.0, "time.dt", "dt must be positive");
  r.require(c.slices >= 1, "time.slices", "slice count must be positive");
  // picard picks its own slice count; regularity stores 2 * slices.
  if (c.command != Command::picard) {
    const double stored = c.command == Command::regularity ? 2.0 * c.slices : c.slices;
    const double steps = c.T / stored / c.dt;
    r.require(std::abs(steps - std::round(steps)) <= 1e-9 * std::max(1.0, steps) && std::round(steps) >= 1,
              "time.dt",
              c.command == Command::regularity ? "dt must divide T / (2 slices)"
                                               : "dt must divide the slice spacing T / slices");
  }

  const auto& d = c.data;
  switch (d.kind) {
    case DataKind::cazenave_naumkin:
      if (d.lambda) r.require(*d.lambda > 0.0, "data.lambda", "lambda must be positive");
      r.require(d.phi_amplitude >= 0.0 && d.phi_amplitude <= 1.0, "data.phi_amplitude",
                "must lie in [0, 1]");
      break;
    case DataKind::traveling_wave:
      r.require(d.c > 0.0, "data.c", "wave speed must be positive");
      break;
    case DataKind::one_sided:
      r.require(d.s >= 1, "data.s", "s must be positive");
      r.require(d.l >= 1, "data.l", "l must be positive");
      r.require(d.kink_amplitude > 0.0, "data.amplitude", "kink amplitude must be positive");
      r.require(d.kink_width > 0.0, "data.width", "kink width must be positive");
      r.require(std::abs(d.x0) < c.L, "data.x0", "x0 must lie inside the box");
      break;
    case DataKind::file:
      r.require(!d.path.empty(), "data.path", "a snapshot path is required");
      break;
  }

  r.require(c.picard_slices_per_unit > 0.0, "picard.slices_per_unit", "must be positive");
  r.require(c.picard_max_iter >= 2, "picard.max_iter", "must be at least 2");
  r.require(c.picard_tol > 0.0, "picard.tol", "must be positive");

  r.require(c.front_v > 0.0, "front.v", "v must be positive");
  r.require(c.front_eps > 0.0, "front.eps", "eps' must be positive");
  r.require(c.front_b >= 5.0 * c.front_eps, "front.b", "b must be at least 5 eps'");
  r.require(c.front_R >= 2.0 * c.front_b - 2.0 * c.front_eps, "front.R",
            "R must be at least 2b - 2 eps'");
  r.require(!c.out_dir.empty(), "output.dir", "must not be empty");
}

}  // namespace

std::string to_string(Command c) { return name_of(kCommands, c); }
std::string to_string(DataKind k) { return name_of(kKinds, k); }
std::string to_string(PhiKind k) { return name_of(kPhis, k); }
std::string to_string(ConstantMode m) { return name_of(kModes, m); }

Command parse_command(const std::string& text) {
  const auto it = kCommands.find(text);
  if (it == kCommands.end()) throw ConfigError("unknown command '" + text + "'");
  return it->second;
}

ModelParams RunConfig::model() const {
  ModelParams p = ModelParams::make(alpha, sign, s, lambda, delta.value_or(1.0));
  return p;
}

int RunConfig::m() const { return m_of_alpha(alpha); }

RunConfig parse_config(const std::string& text, std::optional<Command> command) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(number, "expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
        key.find('.', dot + 1) != std::string::npos) {
      throw ParseError(number, "key '" + key + "' must have the form section.key");
    }
    if (value.empty()) throw ParseError(number, key + ": missing value");
    if (entries.count(key)) {
      throw ParseError(number, "key '" + key + "' repeats line " + std::to_string(entries[key].line));
    }
    entries[key] = {value, number};
  }

  Reader r(std::move(entries));
  std::string missing;
  for (const char* key : {"model.alpha", "data.kind", "time.T"}) {
    if (!r.has(key)) missing += std::string(missing.empty() ? "" : ", ") + key;
  }
  if (!missing.empty()) throw ParseError(0, "missing required keys: " + missing);

  RunConfig c;
  r.choice("run.command", c.command, kCommands);
  r.integer("run.seed", c.seed);
  r.integer("grid.n", c.n);
  r.real("grid.L", c.L);
  r.real("model.alpha", c.alpha);
  r.integer("model.sign", c.sign);
  r.integer("model.s", c.s);
  r.real("model.lambda", c.lambda);
  r.read("model.delta", [&](const std::string& v) {
    if (v == "auto") {
      c.delta.reset();
    } else {
      c.delta = r.to_double("model.delta", v);
    }
  });
  r.real("time.T", c.T);
  r.real("time.dt", c.dt);
  r.integer("time.slices", c.slices);
  r.choice("time.scheme", c.scheme, kSchemes);

  r.choice("data.kind", c.data.kind, kKinds);
  auto only_for = [&](const char* const* begin, const char* const* end, DataKind kind) {
    for (auto it = begin; it != end; ++it) {
      if (c.data.kind != kind) {
        r.reject_if_present(*it, "does not apply to data.kind = " + to_string(c.data.kind));
      }
    }
  };
  only_for(std::begin(kCazenaveKeys), std::end(kCazenaveKeys), DataKind::cazenave_naumkin);
  only_for(std::begin(kWaveKeys), std::end(kWaveKeys), DataKind::traveling_wave);
  only_for(std::begin(kOneSidedKeys), std::end(kOneSidedKeys), DataKind::one_sided);
  only_for(std::begin(kFileKeys), std::end(kFileKeys), DataKind::file);
  r.real("data.lambda", c.data.lambda);
  r.real("data.theta", c.data.theta);
  r.choice("data.phi", c.data.phi, kPhis);
  r.real("data.phi_amplitude", c.data.phi_amplitude);
  r.real("data.c", c.data.c);
  r.choice("data.constant_mode", c.data.constant_mode, kModes);
  r.real("data.x0", c.data.x0);
  r.integer("data.s", c.data.s);
  r.integer("data.l", c.data.l);
  r.real("data.amplitude", c.data.kink_amplitude);
  r.real("data.width", c.data.kink_width);
  r.read("data.path", [&](const std::string& v) { c.data.path = v; });

  r.real("picard.slices_per_unit", c.picard_slices_per_unit);
  r.integer("picard.max_halvings", c.picard_max_halvings);
  r.integer("picard.max_iter", c.picard_max_iter);
  r.real("picard.tol", c.picard_tol);

  r.real("front.v", c.front_v);
  r.real("front.eps", c.front_eps);
  r.real("front.b", c.front_b);
  r.real("front.R", c.front_R);

  r.boolean("output.snapshots", c.snapshots);
  r.read("output.dir", [&](const std::string& v) { c.out_dir = v; });

  if (command) c.command = *command;
  r.reject_unused();
  validate(r, c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Command> command) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), command);
}

std::string print_config(const RunConfig& c) {
  std::ostringstream os;
  auto kv = [&](const std::string& key, const std::string& value) { os << key << " = " << value << '\n'; };
  const int m = c.m();
  kv("run.command", to_string(c.command));
  kv("run.seed", std::to_string(c.seed));
  os << '\n';
  kv("grid.n", std::to_string(c.n));
  kv("grid.L", fmt_double(c.L));
  os << '\n';
  kv("model.alpha", fmt_double(c.alpha));
  os << "# model.m = " << m << " (derived)\n";
  kv("model.sign", std::to_string(c.sign));
  if (c.s) {
    kv("model.s", std::to_string(*c.s));
  } else {
    os << "# model.s = " << 2 * m + 4 << " (default 2m + 4)\n";
  }
  kv("model.lambda", fmt_double(c.lambda));
  kv("model.delta", c.delta ? fmt_double(*c.delta) : "auto");
  os << '\n';
  kv("time.T", fmt_double(c.T));
  kv("time.dt", fmt_double(c.dt));
  kv("time.slices", std::to_string(c.slices));
  kv("time.scheme", to_string(c.scheme));
  os << '\n';
  const auto& d = c.data;
  kv("data.kind", to_string(d.kind));
  switch (d.kind) {
    case DataKind::cazenave_naumkin:
      if (d.lambda) kv("data.lambda", fmt_double(*d.lambda));
      kv("data.theta", fmt_double(d.theta));
      kv("data.phi", to_string(d.phi));
      kv("data.phi_amplitude", fmt_double(d.phi_amplitude));
      break;
    case DataKind::traveling_wave:
      kv("data.c", fmt_double(d.c));
      kv("data.constant_mode", to_string(d.constant_mode));
      break;
    case DataKind::one_sided:
      kv("data.x0", fmt_double(d.x0));
      kv("data.s", std::to_string(d.s));
      kv("data.l", std::to_string(d.l));
      kv("data.amplitude", fmt_double(d.kink_amplitude));
      kv("data.width", fmt_double(d.kink_width));
      break;
    case DataKind::file:
      kv("data.path", d.path);
      break;
  }
  os << '\n';
  kv("picard.slices_per_unit", fmt_double(c.picard_slices_per_unit));
  kv("picard.max_halvings", std::to_string(c.picard_max_halvings));
  kv("picard.max_iter", std::to_string(c.picard_max_iter));
  kv("picard.tol", fmt_double(c.picard_tol));
  os << '\n';
  kv("front.v", fmt_double(c.front_v));
  kv("front.eps", fmt_double(c.front_eps));
  kv("front.b", fmt_double(c.front_b));
  kv("front.R", fmt_double(c.front_R));
  os << '\n';
  kv("output.snapshots", c.snapshots ? "true" : "false");
  kv("output.dir", c.out_dir);
  return os.str();
}

RunConfig default_validate_config() {
  RunConfig c;
  c.command = Command::validate;
  c.n = 512;
  c.L = 16.0 * kPi;
  c.T = 0.1;
  c.dt = 1e-3;
  c.slices = 4;
  return c;
}

}  // namespace gkdv
