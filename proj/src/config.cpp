#include "homog/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "homog/report.hpp"

namespace homog {

namespace {

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& msg) {
  throw Error(ErrorKind::Validation, source + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops a # comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::optional<double> parse_number(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  if (s.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    return std::nullopt;
  }
  if (used != s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_items(const std::string& body, const std::string& source, int line) {
  std::vector<std::string> items;
  std::string cur;
  bool quoted = false;
  for (char c : body) {
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) parse_error(source, line, "unterminated string in array");
  if (!trim(cur).empty()) items.push_back(trim(cur));
  for (const auto& it : items) {
    if (it.empty()) parse_error(source, line, "empty array element");
  }
  return items;
}

ConfigValue parse_value(const std::string& raw, const std::string& source, int line) {
  const std::string v = trim(raw);
  if (v.empty()) parse_error(source, line, "missing value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') parse_error(source, line, "unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '[') {
    if (v.back() != ']') parse_error(source, line, "unterminated array");
    const auto items = split_items(v.substr(1, v.size() - 2), source, line);
    if (!items.empty() && items.front().front() == '"') {
      std::vector<std::string> out;
      for (const auto& it : items) {
        if (it.size() < 2 || it.front() != '"' || it.back() != '"') parse_error(source, line, "mixed array");
        out.push_back(it.substr(1, it.size() - 2));
      }
      return out;
    }
    std::vector<double> out;
    for (const auto& it : items) {
      const auto x = parse_number(it);
      if (!x) parse_error(source, line, "not a number: " + it);
      out.push_back(*x);
    }
    return out;
  }
  const auto x = parse_number(v);
  if (!x) parse_error(source, line, "cannot parse value '" + v + "'");
  return *x;
}

std::string field(const std::string& table, const std::string& key) { return table + "." + key; }

}  // namespace

ConfigDocument ConfigDocument::parse(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  std::istringstream in(text);
  std::string raw;
  std::string table;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') parse_error(source, line, "bad table header");
      table = trim(s.substr(1, s.size() - 2));
      if (table.empty()) parse_error(source, line, "empty table name");
      doc.tables_[table];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) parse_error(source, line, "expected key = value");
    if (table.empty()) parse_error(source, line, "key outside of a table");
    const std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    const int start = line;
    // Arrays may continue over several lines until the bracket closes.
    while (!value.empty() && value.front() == '[' &&
           std::count(value.begin(), value.end(), '[') > std::count(value.begin(), value.end(), ']')) {
      if (!std::getline(in, raw)) parse_error(source, start, "unterminated array");
      ++line;
      value += " " + trim(strip_comment(raw));
    }
    if (key.empty()) parse_error(source, line, "empty key");
    if (doc.tables_[table].count(key)) parse_error(source, line, "duplicate key " + field(table, key));
    doc.tables_[table][key] = parse_value(value, source, start);
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Validation, "cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path);
}

const ConfigValue* ConfigDocument::find(const std::string& table, const std::string& key) const {
  const auto t = tables_.find(table);
  if (t == tables_.end()) return nullptr;
  const auto k = t->second.find(key);
  if (k == t->second.end()) return nullptr;
  read_[field(table, key)] = true;
  return &k->second;
}

bool ConfigDocument::has(const std::string& table, const std::string& key) const {
  const auto t = tables_.find(table);
  return t != tables_.end() && t->second.count(key) > 0;
}

void ConfigDocument::set(const std::string& table, const std::string& key, ConfigValue v) {
  tables_[table][key] = std::move(v);
}

double ConfigDocument::number(const std::string& table, const std::string& key, double fallback) const {
  const auto* v = find(table, key);
  if (!v) return fallback;
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw Error(ErrorKind::Validation, field(table, key) + " must be a number");
}

std::string ConfigDocument::text(const std::string& table, const std::string& key, const std::string& fallback) const {
  const auto* v = find(table, key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  throw Error(ErrorKind::Validation, field(table, key) + " must be a string");
}

bool ConfigDocument::flag(const std::string& table, const std::string& key, bool fallback) const {
  const auto* v = find(table, key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  throw Error(ErrorKind::Validation, field(table, key) + " must be true or false");
}

std::vector<double> ConfigDocument::numbers(const std::string& table, const std::string& key,
                                            const std::vector<double>& fallback) const {
  const auto* v = find(table, key);
  if (!v) return fallback;
  if (const auto* xs = std::get_if<std::vector<double>>(v)) return *xs;
  if (const auto* d = std::get_if<double>(v)) return {*d};
  throw Error(ErrorKind::Validation, field(table, key) + " must be an array of numbers");
}

std::vector<std::string> ConfigDocument::unused() const {
  std::vector<std::string> out;
  for (const auto& [t, keys] : tables_) {
    for (const auto& [k, v] : keys) {
      if (!read_.count(field(t, k))) out.push_back(field(t, k));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& ExperimentConfig::experiment_names() {
  static const std::vector<std::string> names = {
      "integrability", "example1", "exponent-scan", "vague", "weak-lp", "m2",
      "m1-catalog", "spectral-identity", "simulate-cf", "rescale-identity", "fdd"};
  return names;
}

ExperimentConfig ExperimentConfig::from_document(ConfigDocument doc, const std::string& experiment) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end()) {
    throw Error(ErrorKind::Validation, "unknown experiment '" + experiment + "'");
  }
  ExperimentConfig c;
  const std::string named = doc.text("experiment", "name", experiment);
  if (named != experiment) {
    throw Error(ErrorKind::Validation, "experiment.name = '" + named + "' conflicts with subcommand '" + experiment + "'");
  }
  c.experiment = experiment;
  const double seed = doc.number("experiment", "seed", 1.0);
  if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9007199254740992.0) {
    throw Error(ErrorKind::Validation, "experiment.seed must be a non-negative integer");
  }
  c.seed = static_cast<std::uint64_t>(seed);
  c.out_dir = doc.text("experiment", "out", "out");
  c.doc = std::move(doc);
  return c;
}

PeriodicCoefficient ExperimentConfig::coefficient(const std::string& default_kind, double default_gamma) const {
  const std::string kind = doc.text("coefficient", "kind", default_kind);
  if (kind == "constant") return PeriodicCoefficient::constant(doc.number("coefficient", "value", 1.0));
  if (kind == "smooth_cosine") {
    return PeriodicCoefficient::smooth_cosine(doc.number("coefficient", "amplitude", 0.5),
                                              doc.number("coefficient", "offset", 1.0));
  }
  if (kind == "example1") {
    const double g = doc.number("coefficient", "gamma", default_gamma);
    if (!(g > 0.0 && g < 1.0)) throw Error(ErrorKind::Validation, "coefficient.gamma must lie in (0, 1)");
    return PeriodicCoefficient::example1(g);
  }
  throw Error(ErrorKind::Validation, "coefficient.kind must be constant, smooth_cosine or example1");
}

LevyDensity ExperimentConfig::density(double default_beta) const {
  const std::string kind = doc.text("density", "kind", "stable");
  const double beta = doc.number("density", "beta", default_beta);
  if (!(beta > 0.0 && beta < 2.0)) throw Error(ErrorKind::Validation, "density.beta must lie in (0, 2)");
  if (kind == "stable") return LevyDensity::stable_like(beta);
  if (kind == "example1ii") return LevyDensity::example1ii(beta, doc.number("density", "gamma", 0.3));
  if (kind == "truncated") {
    const double r = doc.number("density", "radius", 1.0);
    if (!(r > 0.0)) throw Error(ErrorKind::Validation, "density.radius must be positive");
    return LevyDensity::truncated_stable(beta, r);
  }
  throw Error(ErrorKind::Validation, "density.kind must be stable, example1ii or truncated");
}

TestFunction ExperimentConfig::test_function() const {
  const std::string kind = doc.text("test_function", "kind", "tent");
  if (kind == "tent") {
    const double w = doc.number("test_function", "halfwidth", 1.0);
    if (!(w > 0.0)) throw Error(ErrorKind::Validation, "test_function.halfwidth must be positive");
    return TestFunction::tent(doc.number("test_function", "center", 0.0), w);
  }
  if (kind == "bump") {
    const double r = doc.number("test_function", "radius", 1.0);
    if (!(r > 0.0)) throw Error(ErrorKind::Validation, "test_function.radius must be positive");
    return TestFunction::smooth_bump(doc.number("test_function", "center", 0.0), r);
  }
  if (kind == "piecewise_linear") {
    const auto k = doc.numbers("test_function", "knots", {});
    const auto v = doc.numbers("test_function", "values", {});
    if (k.size() != v.size() || k.size() < 3) {
      throw Error(ErrorKind::Validation, "test_function.knots and values need equal length >= 3");
    }
    return TestFunction::piecewise_linear(k, v);
  }
  throw Error(ErrorKind::Validation, "test_function.kind must be tent, bump or piecewise_linear");
}

std::vector<double> ExperimentConfig::grid(const std::string& key, const std::vector<double>& fallback,
                                           bool decreasing) const {
  auto g = doc.numbers("grids", key, fallback);
  if (g.empty()) throw Error(ErrorKind::Validation, "grids." + key + " must be nonempty");
  for (double x : g) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Validation, "grids." + key + " has a non-finite entry");
  }
  if (decreasing && !strictly_decreasing(g)) {
    throw Error(ErrorKind::Validation, "grids." + key + " must be strictly decreasing");
  }
  return g;
}

double ExperimentConfig::tolerance(double fallback) const {
  const double t = doc.number("experiment", "tolerance", fallback);
  if (!(t > 0.0)) throw Error(ErrorKind::Validation, "experiment.tolerance must be positive");
  return t;
}

std::vector<double> dyadic_grid(int n, int first) {
  std::vector<double> g;
  for (int k = first; k <= n; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

}  // namespace homog
