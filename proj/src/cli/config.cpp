#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>

#include "specsing/cli.hpp"

namespace specsing::cli {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "eta",        "kappa",      "thickness_a", "k",           "K",
      "nonlinearity.kind",        "nonlinearity.sigma",         "n_plus",
      "mode",       "steps",      "tol",         "constraint",  "seed",
      "format",     "out",        "gain",        "sweep.axis",  "sweep.from",
      "sweep.to",   "sweep.count"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  return value;
}

long parse_int(const std::string& key, const std::string& text) {
  long value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return value;
}

const std::string* find(const KeyValues& values, const std::string& key) {
  const auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues values;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(content, "line " + std::to_string(number) + " is not of the form key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(number) + " has an empty key");
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");
    if (value.empty()) throw ConfigError(key, "missing value");
    values[key] = value;
  }
  return values;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

RunConfig build_run_config(const KeyValues& values) {
  for (const auto& [key, value] : values)
    if (!known_keys().contains(key)) throw ConfigError(key, "unknown key");

  RunConfig cfg;
  auto number = [&](const std::string& key) -> std::optional<double> {
    if (const std::string* v = find(values, key)) return parse_double(key, *v);
    return std::nullopt;
  };
  auto integer = [&](const std::string& key) -> std::optional<long> {
    if (const std::string* v = find(values, key)) return parse_int(key, *v);
    return std::nullopt;
  };

  const double eta = number("eta").value_or(3.0);
  const double kappa = number("kappa").value_or(0.0);
  const double a = number("thickness_a").value_or(1.0);
  if (!(eta > 0.0)) throw ConfigError("eta", "must be positive");
  if (!(a > 0.0)) throw ConfigError("thickness_a", "must be positive");
  cfg.slab = SlabMedium(eta, kappa, a);
  cfg.kappa_given = values.contains("kappa");

  const auto k = number("k");
  const auto K = number("K");
  if (k && !(*k > 0.0)) throw ConfigError("k", "must be positive");
  if (K && !(*K > 0.0)) throw ConfigError("K", "must be positive");
  if (k && K && std::abs(*K - *k * a) > 1e-12 * std::abs(*K))
    throw ConfigError("K", "inconsistent with k * thickness_a");
  if (K) cfg.K = *K;
  else if (k) cfg.K = *k * a;

  const auto sigma = number("nonlinearity.sigma");
  std::string kind = sigma ? "kerr" : "none";
  if (const std::string* v = find(values, "nonlinearity.kind")) kind = *v;
  if (kind == "none") {
    if (sigma && *sigma != 0.0)
      throw ConfigError("nonlinearity.sigma", "nonzero sigma with nonlinearity.kind = none");
    cfg.nonlinearity = NonlinearitySpec::none();
  } else if (kind == "kerr") {
    cfg.nonlinearity = NonlinearitySpec::kerr(sigma.value_or(0.0));
  } else {
    throw ConfigError("nonlinearity.kind", "expected none or kerr, got '" + kind + "'");
  }

  cfg.n_plus = number("n_plus").value_or(1.0);
  if (!(cfg.n_plus > 0.0)) throw ConfigError("n_plus", "must be positive");

  const long mode = integer("mode").value_or(1);
  if (mode < 1 || mode > 1000000) throw ConfigError("mode", "must be in [1, 1e6]");
  cfg.mode = static_cast<int>(mode);

  const long steps = integer("steps").value_or(2048);
  if (steps < 16 || steps > 100000000) throw ConfigError("steps", "must be in [16, 1e8]");
  cfg.steps = static_cast<int>(steps);

  cfg.tol = number("tol").value_or(1e-10);
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw ConfigError("tol", "must be in (0, 1)");

  if (const std::string* v = find(values, "constraint")) {
    if (*v == "fix-eta") cfg.constraint = FinderConstraint::FixEta;
    else if (*v == "fix-k") cfg.constraint = FinderConstraint::FixK;
    else throw ConfigError("constraint", "expected fix-eta or fix-k, got '" + *v + "'");
  }
  if (const std::string* v = find(values, "seed")) {
    if (*v == "perturbative-shift") cfg.seed = SeedOrigin::PerturbativeShift;
    else if (*v == "linear-root") cfg.seed = SeedOrigin::LinearRoot;
    else throw ConfigError("seed", "expected perturbative-shift or linear-root, got '" + *v + "'");
  }
  if (const std::string* v = find(values, "format")) {
    if (*v == "csv") cfg.format = OutputFormat::Csv;
    else if (*v == "json") cfg.format = OutputFormat::Json;
    else throw ConfigError("format", "expected csv or json, got '" + *v + "'");
  }
  if (const std::string* v = find(values, "out")) cfg.out = *v;

  if (const auto g = number("gain")) cfg.gain = *g;

  if (const std::string* v = find(values, "sweep.axis")) {
    if (*v == "intensity") cfg.sweep.axis = SweepAxis::Intensity;
    else if (*v == "mode") cfg.sweep.axis = SweepAxis::Mode;
    else throw ConfigError("sweep.axis", "expected intensity or mode, got '" + *v + "'");
  }
  cfg.sweep.from = number("sweep.from").value_or(0.0);
  cfg.sweep.to = number("sweep.to").value_or(0.0);
  const long count = integer("sweep.count").value_or(0);
  if (count < 0 || count > 1000000) throw ConfigError("sweep.count", "must be in [0, 1e6]");
  cfg.sweep.count = static_cast<int>(count);
  return cfg;
}

}  // namespace specsing::cli
