#pragma once

// Command-line front end. Parameters come from a flat `key = value` file
// (--config) and from flags; flags win. Data goes to --out or stdout as CSV
// or JSON; diagnostics go to stderr only.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "specsing/errors.hpp"
#include "specsing/singularity_finder.hpp"
#include "specsing/slab_model.hpp"

namespace specsing::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitNonConvergence = 3,
  kExitBelowThreshold = 4,
};

enum class OutputFormat { Csv, Json };
enum class SweepAxis { Intensity, Mode };

inline constexpr std::string_view kSchema = "specsing/1";

// Rejected configuration value; names the offending key.
class ConfigError : public InvalidParameter {
 public:
  ConfigError(std::string key, const std::string& message)
      : InvalidParameter("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

// Parses `key = value` lines; '#' starts a comment. Throws ConfigError for
// lines without '=' or with an unknown key.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::string& path);

struct SweepSpec {
  SweepAxis axis = SweepAxis::Intensity;
  double from = 0.0;
  double to = 0.0;
  int count = 0;
};

struct RunConfig {
  SlabMedium slab{3.0, 0.0, 1.0};
  bool kappa_given = false;
  std::optional<double> K;  // from K, or from k * thickness_a
  NonlinearitySpec nonlinearity;
  double n_plus = 1.0;
  int mode = 1;
  int steps = 2048;
  double tol = 1e-10;
  std::optional<FinderConstraint> constraint;
  SeedOrigin seed = SeedOrigin::PerturbativeShift;
  OutputFormat format = OutputFormat::Csv;
  std::string out;  // empty: stdout
  std::optional<double> gain;
  SweepSpec sweep;
};

// Validates every key and builds the run record. Throws ConfigError.
RunConfig build_run_config(const KeyValues& values);

// Full entry point; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Individual commands write their report to `out` and return an exit status.
int cmd_threshold(const RunConfig& cfg, std::ostream& out);
int cmd_find_ss(const RunConfig& cfg, std::ostream& out);
int cmd_find_nss(const RunConfig& cfg, std::ostream& out);
int cmd_intensity(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_field_profile(const RunConfig& cfg, std::ostream& out);

// 17 significant digits, '.' decimal point regardless of locale.
std::string format_number(double value);

}  // namespace specsing::cli
