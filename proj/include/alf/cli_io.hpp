#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alf/core.hpp"
#include "alf/scenarios.hpp"

namespace alf::io {

/// Malformed config text or a schema violation, with a 1-based position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Output file could not be written or read back.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigValue {
  std::string text;
  std::size_t line = 0;
  std::size_t column = 0;
};

/// Flat "section.key" -> value map read from INI-style text:
///
///   # comment
///   [grid]
///   x_samples = 1024
///   [stage.1]
///   kind = propagate
///
/// Keys outside any section keep their bare name. Duplicate keys are errors.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const ConfigValue& at(const std::string& key) const;
  const std::map<std::string, ConfigValue>& values() const { return values_; }

  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  /// Position of the end of the text, for errors about missing keys.
  std::size_t last_line() const { return last_line_; }

  /// Throws ConfigError for the first key that no lookup has touched.
  void reject_unused() const;

 private:
  std::map<std::string, ConfigValue> values_;
  std::size_t last_line_ = 1;
  mutable std::map<std::string, bool> used_;
};

struct OutputOptions {
  bool snapshots = true;
  bool heatmaps = true;
  bool tables = true;
};

enum class ScenarioKind { train, cubic_sweep };

/// A config resolved into runnable objects. `echo` lists every physical and
/// pipeline parameter actually used, defaults included, as "key = value".
struct Scenario {
  ScenarioKind kind = ScenarioKind::train;
  std::optional<scenarios::OpticalTrain> train;
  std::optional<scenarios::CubicSweepConfig> sweep;
  OutputOptions output;
  std::vector<std::string> echo;
};

struct RunOverrides {
  /// Multiplies both sample counts.
  std::size_t grid_scale = 1;
  std::optional<bool> compare_oracle;
};

/// Builds the scenario; throws ConfigError on schema violations and on
/// parameters the library rejects.
Scenario build_scenario(const Config& config, const RunOverrides& overrides = {});

/// Exact decimal text of a double (17 significant digits, round-trips bitwise).
std::string format_number(double v);
double parse_number(const std::string& text);

/// Comma-separated table with two axis header lines:
///   # rows <name> <count> <first> <step>
///   # cols <name> <count> <first> <step>
/// followed by one line per row.
struct AxisInfo {
  std::string name;
  double first = 0.0;
  double step = 0.0;
};

void write_table(const std::filesystem::path& path, const Array2D& data, const AxisInfo& rows,
                 const AxisInfo& cols);
Array2D read_table(const std::filesystem::path& path);

/// Writes <stem>.csv (table), <stem>.ppm (P6, x across, theta up, red positive,
/// blue negative, mid-gray zero) and <stem>.meta (scale and axes). Returns the
/// three paths.
std::vector<std::filesystem::path> export_heatmap(const AugmentedLightField& lf,
                                                  const std::filesystem::path& stem);
std::vector<std::filesystem::path> export_heatmap(const Array2D& data, const AxisInfo& rows,
                                                  const AxisInfo& cols,
                                                  const std::filesystem::path& stem);

/// RGB of the diverging palette for v in [-1, 1].
struct Rgb {
  unsigned char r, g, b;
};
Rgb diverging_color(double v);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

enum ExitCode { kSuccess = 0, kFailure = 1, kConfigError = 2, kAborted = 3 };

struct RunOutcome {
  int exit_code = kSuccess;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Loads the config, runs the scenario and writes every output plus
/// manifest.json into output_dir. Never throws.
RunOutcome run(const std::filesystem::path& config_path, const std::filesystem::path& output_dir,
               const RunOverrides& overrides = {});

}  // namespace alf::io
