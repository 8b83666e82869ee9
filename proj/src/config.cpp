#include "critmass/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "critmass/constants.hpp"

namespace critmass {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "mass",          "grid.n",           "grid.gamma",    "scheme.dt0",
      "scheme.cfl",    "scheme.t_end",     "scheme.dt_min", "scheme.dt_max",
      "scheme.dt_grow", "scheme.u_blowup_threshold",        "initial.kind",
      "initial.lambda", "initial.a",       "output.dir",    "output.snapshot_every",
      "seed"};
  return keys;
}

void flatten_into(const nlohmann::json& node, const std::string& prefix, nlohmann::json& out) {
  for (auto it = node.begin(); it != node.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten_into(*it, key, out);
    } else {
      if (out.contains(key)) throw ConfigError("duplicate key '" + key + "'");
      out[key] = *it;
    }
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double strict_double(const std::string& text) {
  if (text.empty()) throw ConfigError("empty number");
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) throw ConfigError("not a number: '" + text + "'");
  return value;
}

class Reader {
 public:
  explicit Reader(const nlohmann::json& flat) : flat_(flat) {}

  bool has(const std::string& key) const { return flat_.contains(key); }

  double number(const std::string& key) const {
    const nlohmann::json& v = flat_.at(key);
    try {
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return parse_number_token(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(key + ": " + e.what());
    }
    throw ConfigError(key + ": expected a number");
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key) || flat_.at(key).is_null()) return std::nullopt;
    return number(key);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const nlohmann::json& v = flat_.at(key);
    if (!v.is_string()) throw ConfigError(key + ": expected a string");
    return v.get<std::string>();
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15) {
      throw ConfigError(key + ": expected a nonnegative integer");
    }
    return static_cast<std::uint64_t>(v);
  }

 private:
  const nlohmann::json& flat_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

double parse_number_token(std::string_view token) {
  std::string s = trim(token);
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower.size() >= 2 && lower.compare(lower.size() - 2, 2, "pi") == 0) {
    std::string coef = trim(std::string_view(lower).substr(0, lower.size() - 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    if (coef.empty()) return kPi;
    if (coef == "-") return -kPi;
    return strict_double(coef) * kPi;
  }
  return strict_double(lower);
}

nlohmann::json flatten_document(const nlohmann::json& document) {
  if (!document.is_object()) throw ConfigError("configuration must be a JSON object");
  nlohmann::json flat = nlohmann::json::object();
  flatten_into(document, "", flat);
  return flat;
}

ExperimentConfig parse_config(const nlohmann::json& document) {
  const nlohmann::json flat = flatten_document(document);
  for (auto it = flat.begin(); it != flat.end(); ++it) {
    check(known_keys().count(it.key()) == 1, "unknown key '" + it.key() + "'");
  }
  const Reader in(flat);
  ExperimentConfig c;
  c.document = flat;

  check(in.has("mass"), "missing required key 'mass'");
  c.mass = in.number("mass");
  check(std::isfinite(c.mass) && c.mass > 0.0, "mass: must be positive");

  const std::uint64_t n = in.count("grid.n", c.grid.intervals);
  check(n >= Grid::kMinIntervals, "grid.n: must be at least 16");
  c.grid.intervals = static_cast<std::size_t>(n);
  c.grid.gamma = in.number_or("grid.gamma", c.grid.gamma);
  check(c.grid.gamma >= 1.0 && c.grid.gamma <= 3.0, "grid.gamma: must lie in [1, 3]");

  SchemeSettings& s = c.scheme;
  s.dt0 = in.number_or("scheme.dt0", s.dt0);
  s.cfl = in.number_or("scheme.cfl", s.cfl);
  s.t_end = in.number_or("scheme.t_end", s.t_end);
  s.dt_min = in.optional_number("scheme.dt_min");
  s.dt_max = in.number_or("scheme.dt_max", s.dt_max);
  s.dt_grow = in.number_or("scheme.dt_grow", s.dt_grow);
  s.u_blowup_threshold = in.optional_number("scheme.u_blowup_threshold");

  const std::string kind = in.text("initial.kind", "constant");
  try {
    c.initial.kind = parse_preset_kind(kind);
  } catch (const std::invalid_argument&) {
    throw ConfigError("initial.kind: unknown preset '" + kind + "'");
  }
  const bool has_lambda = in.has("initial.lambda");
  const bool has_a = in.has("initial.a");
  switch (c.initial.kind) {
    case PresetKind::constant:
      check(!has_lambda && !has_a, "initial: the constant preset takes no parameter");
      break;
    case PresetKind::pks:
      check(has_lambda && !has_a, "initial: pks needs initial.lambda (and no initial.a)");
      c.initial.parameter = in.number("initial.lambda");
      check(std::isfinite(c.initial.parameter) && c.initial.parameter > 0.0,
            "initial.lambda: must be positive");
      break;
    case PresetKind::barrier:
      check(has_a && !has_lambda, "initial: barrier needs initial.a (and no initial.lambda)");
      c.initial.parameter = in.number("initial.a");
      check(std::isfinite(c.initial.parameter) && c.initial.parameter > 0.0,
            "initial.a: must be positive");
      break;
  }

  c.output.dir = in.text("output.dir", c.output.dir);
  check(!c.output.dir.empty(), "output.dir: must not be empty");
  c.output.snapshot_every = in.number_or("output.snapshot_every", c.output.snapshot_every);
  c.seed = in.count("seed", 0);

  // scheme checks need a grid
  try {
    c.scheme_config(c.make_grid()).validate(c.mass);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(document);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

GridPtr ExperimentConfig::make_grid() const { return Grid::graded(grid.intervals, grid.gamma); }

SchemeConfig ExperimentConfig::scheme_config(GridPtr g) const {
  SchemeConfig s;
  s.grid = std::move(g);
  s.dt0 = scheme.dt0;
  s.cfl = scheme.cfl;
  s.t_end = scheme.t_end;
  s.snapshot_every = output.snapshot_every;
  s.u_blowup_threshold = scheme.u_blowup_threshold;
  s.dt_min = scheme.dt_min;
  s.dt_max = scheme.dt_max;
  s.dt_grow = scheme.dt_grow;
  return s;
}

MassProfile ExperimentConfig::initial_profile(GridPtr g) const {
  return preset_profile(initial.kind, initial.parameter, mass, std::move(g));
}

ExperimentConfig ExperimentConfig::with_mass(double m) const {
  nlohmann::json doc = document;
  doc["mass"] = m;
  return parse_config(doc);
}

}  // namespace critmass
