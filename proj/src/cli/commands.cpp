#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specsing/cli.hpp"
#include "specsing/linear_scattering.hpp"
#include "specsing/log.hpp"
#include "specsing/nonlinear_bvp.hpp"
#include "specsing/perturbation.hpp"
#include "specsing/singularity_finder.hpp"

namespace specsing::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

using json = nlohmann::ordered_json;
using Value = std::variant<std::monostate, double, long, bool, std::string>;

class Record {
 public:
  Record& add(std::string name, Value value) {
    fields_.emplace_back(std::move(name), std::move(value));
    return *this;
  }
  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, double>) return format_number(x);
        else if constexpr (std::is_same_v<T, long>) return std::to_string(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "true" : "false";
        else return csv_escape(x);
      },
      v);
}

json json_value(const Value& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(x)) return nullptr;
          return x;
        } else return x;
      },
      v);
}

json to_json(const Record& r) {
  json obj = json::object();
  for (const auto& [name, value] : r.fields()) obj[name] = json_value(value);
  return obj;
}

json envelope(const std::string& command) {
  json doc = json::object();
  doc["schema"] = std::string(kSchema);
  doc["command"] = command;
  return doc;
}

void write_csv_header(const std::vector<std::string>& columns, std::ostream& out) {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
}

void write_csv_row(const Record& r, std::ostream& out) {
  bool first = true;
  for (const auto& [name, value] : r.fields()) {
    out << (first ? "" : ",") << csv_cell(value);
    first = false;
  }
  out << '\n';
}

void emit_record(const RunConfig& cfg, const std::string& command, const Record& r,
                 std::ostream& out) {
  if (cfg.format == OutputFormat::Json) {
    json doc = envelope(command);
    doc["result"] = to_json(r);
    out << doc.dump(2) << '\n';
    return;
  }
  std::vector<std::string> columns;
  for (const auto& f : r.fields()) columns.push_back(f.first);
  write_csv_header(columns, out);
  write_csv_row(r, out);
}

FinderConfig finder_config(const RunConfig& cfg, FinderConstraint fallback) {
  FinderConfig fc;
  fc.shooting.steps = cfg.steps;
  fc.tol = cfg.tol;
  fc.seed = cfg.seed;
  fc.constraint = cfg.constraint.value_or(fallback);
  return fc;
}

Record singularity_record(const SingularityResult& r, const NonlinearitySpec& nl) {
  Record rec;
  rec.add("eta", r.eta)
      .add("kappa_star", r.kappa_star)
      .add("K_star", r.K_star)
      .add("N_plus_re", r.N_plus.real())
      .add("N_plus_im", r.N_plus.imag())
      .add("intensity", r.intensity())
      .add("g", r.gain.g)
      .add("g0", r.gain.g0)
      .add("residual", r.residual)
      .add("iterations", static_cast<long>(r.iterations));
  (void)nl;
  return rec;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> columns = {
      "eta", "kappa_star", "K_star", "N_plus_re", "N_plus_im", "intensity",
      "g",   "g0",         "residual", "iterations", "status"};
  return columns;
}

std::vector<double> linspace(double from, double to, int count) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    grid.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
  return grid;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BelowThreshold*>(&e)) return kExitBelowThreshold;
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const BlowUpError*>(&e) ||
      dynamic_cast<const DegenerateSystem*>(&e) || dynamic_cast<const SingularityProximity*>(&e))
    return kExitNonConvergence;
  return kExitInvalidInput;
}

}  // namespace

int cmd_threshold(const RunConfig& cfg, std::ostream& out) {
  const double a = cfg.slab.thickness();
  const LinearSingularity lin = find_linear_singularity(cfg.slab.eta(), cfg.mode);
  const double g0 = threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, a);
  const double g0_approx = threshold_gain_g0_approx(lin.eta0, a);
  Record r;
  r.add("eta0", lin.eta0)
      .add("kappa0", lin.kappa0)
      .add("K0", lin.K0)
      .add("k0", lin.K0 / a)
      .add("mode", static_cast<long>(lin.mode_index))
      .add("thickness_a", a)
      .add("residual_L", lin.residual)
      .add("g0_exact", g0)
      .add("g0_approx", g0_approx)
      .add("g0_relative_gap", std::abs(g0 - g0_approx) / g0)
      .add("g0_from_kappa", gain_from_kappa(lin.kappa0, lin.K0, a));
  emit_record(cfg, "threshold", r, out);
  return kExitOk;
}

int cmd_find_ss(const RunConfig& cfg, std::ostream& out) {
  const double a = cfg.slab.thickness();
  const LinearSingularity lin = find_linear_singularity(cfg.slab.eta(), cfg.mode);
  Record r;
  r.add("eta0", lin.eta0)
      .add("kappa0", lin.kappa0)
      .add("K0", lin.K0)
      .add("k0", lin.K0 / a)
      .add("wavelength", 2.0 * std::numbers::pi * a / lin.K0)
      .add("mode", static_cast<long>(lin.mode_index))
      .add("residual_L", lin.residual)
      .add("iterations", static_cast<long>(lin.iterations))
      .add("g0", threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, a));
  emit_record(cfg, "find-ss", r, out);
  return kExitOk;
}

int cmd_find_nss(const RunConfig& cfg, std::ostream& out) {
  const FinderConfig fc = finder_config(cfg, FinderConstraint::FixEta);
  const SingularityResult s =
      find_nonlinear_singularity(cfg.slab.eta(), cfg.nonlinearity, cplx(cfg.n_plus, 0.0),
                                 cfg.slab.thickness(), cfg.mode, fc);
  Record r = singularity_record(s, cfg.nonlinearity);
  r.add("excess", s.gain.excess)
      .add("mode", static_cast<long>(s.mode_index))
      .add("constraint", std::string(to_string(s.constraint)))
      .add("seed_origin", std::string(to_string(s.seed_origin)))
      .add("validity_gauge", cfg.nonlinearity.sigma() * std::norm(s.N_plus));
  emit_record(cfg, "find-nss", r, out);
  return kExitOk;
}

int cmd_intensity(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.gain) throw ConfigError("gain", "required by the intensity command");
  const double eta = cfg.slab.eta();
  const double a = cfg.slab.thickness();
  const double g = *cfg.gain;
  const double sigma = cfg.nonlinearity.sigma();
  const LinearSingularity lin = find_linear_singularity(eta, cfg.mode);
  const double g0 = threshold_gain_g0(lin.eta0, lin.kappa0, lin.K0, a);
  const FinderConfig fc = finder_config(cfg, FinderConstraint::FixK);

  Record r;
  r.add("g", g).add("g0", g0);
  if (g <= g0) {
    r.add("closed_form_intensity", 0.0)
        .add("finder_intensity", 0.0)
        .add("relative_gap", 0.0)
        .add("validity_gauge", 0.0)
        .add("closed_form_reliable", true)
        .add("eta_star", eta)
        .add("kappa_star", lin.kappa0)
        .add("K_star", lin.K0)
        .add("secant_iterations", 0L)
        .add("constraint", std::string(to_string(fc.constraint)))
        .add("status", std::string("below_threshold"));
    emit_record(cfg, "intensity", r, out);
    log::warn("gain {} does not exceed the threshold g0 = {}", g, g0);
    return kExitBelowThreshold;
  }
  const EmissionReport closed = emitted_intensity(eta, g, g0, sigma);
  const IntensityResult found = intensity_for_gain(eta, cfg.nonlinearity, g, a, cfg.mode, fc);
  const double finder_half = 0.5 * found.N_plus_mag2;
  r.add("closed_form_intensity", closed.half_intensity)
      .add("finder_intensity", finder_half)
      .add("relative_gap", std::abs(finder_half - closed.half_intensity) / closed.half_intensity)
      .add("validity_gauge", sigma * found.N_plus_mag2)
      .add("closed_form_reliable", closed.reliable)
      .add("eta_star", found.result.eta)
      .add("kappa_star", found.result.kappa_star)
      .add("K_star", found.result.K_star)
      .add("secant_iterations", static_cast<long>(found.iterations))
      .add("constraint", std::string(to_string(fc.constraint)))
      .add("status", std::string("ok"));
  emit_record(cfg, "intensity", r, out);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const FinderConfig fc = finder_config(cfg, FinderConstraint::FixEta);
  const double eta = cfg.slab.eta();
  const double a = cfg.slab.thickness();
  const std::vector<double> grid = linspace(cfg.sweep.from, cfg.sweep.to, cfg.sweep.count);

  std::vector<SweepRow> rows;
  if (cfg.sweep.axis == SweepAxis::Intensity) {
    rows = sweep_intensity(eta, cfg.nonlinearity, a, cfg.mode, grid, fc);
  } else {
    std::vector<int> modes;
    for (const double m : grid) modes.push_back(static_cast<int>(std::lround(m)));
    rows = sweep_modes(eta, cfg.nonlinearity, cplx(cfg.n_plus, 0.0), a, modes, fc);
  }

  std::vector<Record> records;
  for (const SweepRow& row : rows) {
    Record rec;
    if (row.result) {
      rec = singularity_record(*row.result, cfg.nonlinearity);
    } else {
      const bool by_intensity = cfg.sweep.axis == SweepAxis::Intensity;
      const double np = by_intensity ? std::sqrt(std::max(row.parameter, 0.0)) : cfg.n_plus;
      rec.add("eta", eta)
          .add("kappa_star", std::monostate{})
          .add("K_star", std::monostate{})
          .add("N_plus_re", np)
          .add("N_plus_im", 0.0)
          .add("intensity", 0.5 * np * np)
          .add("g", std::monostate{})
          .add("g0", std::monostate{})
          .add("residual", std::monostate{})
          .add("iterations", std::monostate{});
    }
    rec.add("status", row.status);
    records.push_back(std::move(rec));
  }

  if (cfg.format == OutputFormat::Json) {
    json doc = envelope("sweep");
    doc["axis"] = cfg.sweep.axis == SweepAxis::Intensity ? "intensity" : "mode";
    doc["constraint"] = to_string(fc.constraint);
    json list = json::array();
    for (const Record& rec : records) list.push_back(to_json(rec));
    doc["rows"] = std::move(list);
    out << doc.dump(2) << '\n';
  } else {
    write_csv_header(sweep_columns(), out);
    for (const Record& rec : records) write_csv_row(rec, out);
  }
  return kExitOk;
}

int cmd_field_profile(const RunConfig& cfg, std::ostream& out) {
  const double eta = cfg.slab.eta();
  double kappa = cfg.slab.kappa();
  double K = cfg.K.value_or(0.0);
  if (!cfg.kappa_given || !cfg.K) {
    const LinearSingularity lin = find_linear_singularity(eta, cfg.mode);
    if (!cfg.kappa_given) kappa = lin.kappa0;
    if (!cfg.K) K = lin.K0;
  }
  const cplx n(eta, kappa);
  const cplx N_plus(cfg.n_plus, 0.0);
  const double gamma = cfg.nonlinearity.gamma(K);

  ShootingConfig sc;
  sc.steps = cfg.steps;
  sc.record_trajectory = true;
  const ShootingResult shot = integrate_zeta(n, K, gamma, cfg.nonlinearity.function(), N_plus, sc);
  const ScatteringAmplitudes amp =
      assemble_left_solution(compute_G(shot.state0, K), K, N_plus);

  FieldTrajectory rows = *shot.trajectory;
  std::reverse(rows.begin(), rows.end());

  if (cfg.format == OutputFormat::Json) {
    auto complex_json = [](cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; };
    json doc = envelope("field-profile");
    doc["parameters"] = json{{"eta", eta},     {"kappa", kappa}, {"K", K},
                             {"gamma", gamma}, {"steps", cfg.steps},
                             {"thickness_a", cfg.slab.thickness()}};
    doc["amplitudes"] = json{{"N_plus", complex_json(amp.N_plus)},
                             {"N_minus", complex_json(amp.N_minus)},
                             {"N_minus_tilde", complex_json(amp.N_minus_tilde)}};
    json traj = json::array();
    for (const FieldState& s : rows)
      traj.push_back(json{{"x", s.x},
                          {"re_psi", s.psi.real()},
                          {"im_psi", s.psi.imag()},
                          {"re_dpsi", s.dpsi.real()},
                          {"im_dpsi", s.dpsi.imag()}});
    doc["trajectory"] = std::move(traj);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }

  auto pair = [](cplx z) { return format_number(z.real()) + " " + format_number(z.imag()); };
  out << "# schema = " << kSchema << '\n'
      << "# eta = " << format_number(eta) << '\n'
      << "# kappa = " << format_number(kappa) << '\n'
      << "# K = " << format_number(K) << '\n'
      << "# gamma = " << format_number(gamma) << '\n'
      << "# N_plus = " << pair(amp.N_plus) << '\n'
      << "# N_minus = " << pair(amp.N_minus) << '\n'
      << "# N_minus_tilde = " << pair(amp.N_minus_tilde) << '\n';
  write_csv_header({"x", "re_psi", "im_psi", "re_dpsi", "im_dpsi"}, out);
  for (const FieldState& s : rows) {
    out << format_number(s.x) << ',' << format_number(s.psi.real()) << ','
        << format_number(s.psi.imag()) << ',' << format_number(s.dpsi.real()) << ','
        << format_number(s.dpsi.imag()) << '\n';
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  log::configure_from_env();

  CLI::App app{"Linear and nonlinear spectral singularities of a gain slab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "flat key = value parameter file");

  // Flag name -> config key. Values stay strings here so that config file
  // and flags go through the same validation.
  const std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--eta", "eta"},
      {"--kappa", "kappa"},
      {"--thickness", "thickness_a"},
      {"--k", "k"},
      {"--K", "K"},
      {"--kind", "nonlinearity.kind"},
      {"--sigma", "nonlinearity.sigma"},
      {"--n-plus", "n_plus"},
      {"--mode", "mode"},
      {"--steps", "steps"},
      {"--tol", "tol"},
      {"--constraint", "constraint"},
      {"--seed", "seed"},
      {"--format", "format"},
      {"--out", "out"},
      {"--gain", "gain"},
      {"--axis", "sweep.axis"},
      {"--from", "sweep.from"},
      {"--to", "sweep.to"},
      {"--count", "sweep.count"},
  };
  std::map<std::string, std::string> flag_values;
  for (const auto& [flag, key] : flag_keys)
    app.add_option(flag, flag_values[key], "overrides config key '" + key + "'");

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const std::vector<Command> commands = {
      {"threshold", "linear threshold gain g0 (exact and small-kappa forms) and the linear root",
       cmd_threshold},
      {"find-ss", "linear spectral singularity (kappa0, K0) of the selected mode branch",
       cmd_find_ss},
      {"find-nss", "nonlinear spectral singularity by direct integration and Newton iteration",
       cmd_find_nss},
      {"intensity",
       "emitted intensity |N+|^2/2 for --gain: closed form vs finder (default --constraint fix-k)",
       cmd_intensity},
      {"sweep",
       "continuation sweep; --axis intensity (|N+|^2 grid) or mode; columns: eta, kappa_star, "
       "K_star, N_plus_re, N_plus_im, intensity (=|N+|^2/2), g, g0, residual, iterations, status",
       cmd_sweep},
      {"field-profile",
       "interior field x, re_psi, im_psi, re_dpsi, im_dpsi (steps+1 rows) and exterior amplitudes",
       cmd_field_profile},
  };
  for (const Command& c : commands) app.add_subcommand(c.name, c.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidInput;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const auto it = std::find_if(commands.begin(), commands.end(),
                               [&](const Command& c) { return chosen->get_name() == c.name; });

  try {
    KeyValues values;
    if (!config_path.empty()) values = read_config_file(config_path);
    for (const auto& [flag, key] : flag_keys)
      if (app.count(flag) > 0) values[key] = flag_values[key];
    const RunConfig cfg = build_run_config(values);

    if (cfg.out.empty()) return it->fn(cfg, out);
    std::ostringstream buffer;
    const int status = it->fn(cfg, buffer);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw ConfigError("out", "cannot open '" + cfg.out + "' for writing");
    file << buffer.str();
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace specsing::cli
