#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "alf/cli_io.hpp"
#include "alf/elements.hpp"

namespace alf::io {

namespace {

std::string trim(const std::string& s, std::size_t* lead = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

std::string position_message(const std::string& message, std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << message;
  return os.str();
}

bool valid_key(const std::string& key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

}  // namespace

ConfigError::ConfigError(std::string message, std::size_t line, std::size_t column)
    : std::runtime_error(position_message(message, line, column)), line_(line), column_(column) {}

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t lead = 0;
    const std::string s = trim(raw, &lead);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s[0] == '[') {
      const std::string h = trim(s.substr(0, s.find_first_of("#;")));
      if (h.back() != ']') throw ConfigError("section header is missing ']'", line, lead + s.size() + 1);
      section = trim(h.substr(1, h.size() - 2));
      if (!valid_key(section)) throw ConfigError("invalid section name", line, lead + 2);
      continue;
    }
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, lead + 1);
    const std::string key = trim(raw.substr(0, eq));
    if (!valid_key(key)) throw ConfigError("invalid key", line, lead + 1);
    std::size_t vlead = 0;
    std::string rest = raw.substr(eq + 1);
    for (std::size_t c = 0; c < rest.size(); ++c) {
      if ((rest[c] == '#' || rest[c] == ';') && (c == 0 || std::isspace(static_cast<unsigned char>(rest[c - 1])))) {
        rest.resize(c);
        break;
      }
    }
    const std::string value = trim(rest, &vlead);
    const std::size_t vcol = eq + 2 + vlead;
    if (value.empty()) throw ConfigError("missing value", line, vcol);
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) throw ConfigError("duplicate key '" + full + "'", line, lead + 1);
    cfg.values_[full] = ConfigValue{value, line, vcol};
  }
  cfg.last_line_ = line + 1;
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigValue& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'", last_line_, 1);
  used_[key] = true;
  return it->second;
}

std::string Config::text(const std::string& key) const { return at(key).text; }

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const {
  const auto& v = at(key);
  double out = 0.0;
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "' expects a number, got '" + v.text + "'", v.line,
                      v.column + static_cast<std::size_t>(ptr - v.text.data()));
  }
  return out;
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::size_t Config::count(const std::string& key) const {
  const auto& v = at(key);
  std::size_t out = 0;
  const char* end = v.text.data() + v.text.size();
  const auto [ptr, ec] = std::from_chars(v.text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v.text + "'", v.line,
                      v.column + static_cast<std::size_t>(ptr - v.text.data()));
  }
  return out;
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  return has(key) ? count(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (v.text == "on" || v.text == "true" || v.text == "yes") return true;
  if (v.text == "off" || v.text == "false" || v.text == "no") return false;
  throw ConfigError("'" + key + "' expects on or off, got '" + v.text + "'", v.line, v.column);
}

void Config::reject_unused() const {
  for (const auto& [key, v] : values_) {
    if (!used_.count(key)) throw ConfigError("unknown key '" + key + "'", v.line, 1);
  }
}

namespace {

// Shortest text that reads back as the same double.
std::string echo_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// Config lookups that also record the resolved value for the manifest echo.
class Reader {
 public:
  explicit Reader(const Config& cfg) : cfg_(cfg) {}

  double number(const std::string& key) { return record(key, cfg_.number(key)); }
  double number(const std::string& key, double fallback) {
    return record(key, cfg_.number(key, fallback));
  }
  std::size_t count(const std::string& key, std::size_t scale = 1) {
    const std::size_t v = cfg_.count(key) * scale;
    echo.push_back(key + " = " + std::to_string(v));
    return v;
  }
  std::size_t count_or(const std::string& key, std::size_t fallback) {
    const std::size_t v = cfg_.count(key, fallback);
    echo.push_back(key + " = " + std::to_string(v));
    return v;
  }
  bool flag(const std::string& key, bool fallback) {
    const bool v = cfg_.flag(key, fallback);
    echo.push_back(key + " = " + (v ? "on" : "off"));
    return v;
  }
  std::string choice(const std::string& key, const std::vector<std::string>& options,
                     std::optional<std::string> fallback = std::nullopt) {
    std::string v;
    if (!cfg_.has(key) && fallback) {
      v = *fallback;
    } else {
      const auto& cv = cfg_.at(key);
      v = cv.text;
      if (std::find(options.begin(), options.end(), v) == options.end()) {
        std::string list;
        for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
        throw ConfigError("'" + key + "' must be one of " + list + ", got '" + v + "'", cv.line,
                          cv.column);
      }
    }
    echo.push_back(key + " = " + v);
    return v;
  }
  std::vector<double> list(const std::string& key) {
    const auto& cv = cfg_.at(key);
    std::vector<double> out;
    std::istringstream in(cv.text);
    std::string tok;
    while (in >> tok) {
      double v = 0.0;
      const char* end = tok.data() + tok.size();
      const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
      if (ec != std::errc() || ptr != end) {
        throw ConfigError("'" + key + "' expects space-separated numbers, got '" + tok + "'",
                          cv.line, cv.column + cv.text.find(tok));
      }
      out.push_back(v);
    }
    if (out.empty()) throw ConfigError("'" + key + "' is empty", cv.line, cv.column);
    std::string joined;
    for (double v : out) joined += (joined.empty() ? "" : " ") + echo_number(v);
    echo.push_back(key + " = " + joined);
    return out;
  }

  const Config& config() const { return cfg_; }
  std::vector<std::string> echo;

 private:
  double record(const std::string& key, double v) {
    echo.push_back(key + " = " + echo_number(v));
    return v;
  }

  const Config& cfg_;
};

ConfigError at_key(const Config& cfg, const std::string& key, const std::string& message) {
  if (cfg.has(key)) {
    const auto& v = cfg.at(key);
    return ConfigError(message, v.line, v.column);
  }
  return ConfigError(message, cfg.last_line(), 1);
}

PhaseSpaceGrid read_grid(Reader& r, std::size_t scale) {
  const std::size_t n = r.count("grid.x_samples", scale);
  const double x_extent = r.number("grid.x_extent");
  const std::size_t m = r.count("grid.theta_samples", scale);
  const double theta_extent = r.number("grid.theta_extent");
  const double wavelength = r.number("grid.wavelength");
  const double limit = r.number("grid.paraxial_limit", PhaseSpaceGrid::kDefaultParaxialLimit);
  try {
    return PhaseSpaceGrid::make(n, x_extent, m, theta_extent, wavelength, limit);
  } catch (const InvalidConfiguration& e) {
    throw at_key(r.config(), "grid.x_samples", e.what());
  }
}

scenarios::Source read_source(Reader& r) {
  const std::string kind = r.choice("source.kind", {"plane_wave", "point"});
  if (kind == "plane_wave") return scenarios::PlaneWave{r.number("source.theta0", 0.0)};
  scenarios::PointSource p;
  p.x0 = r.number("source.x0", 0.0);
  p.half_angle = r.number("source.half_angle");
  p.taper = r.number("source.taper", p.taper);
  return p;
}

ComplexField coded_pattern(const PhaseSpaceGrid& g, double width, const std::vector<double>& cells) {
  ComplexField t(g);
  const double cell = width / static_cast<double>(cells.size());
  for (std::size_t i = 0; i < g.x_samples(); ++i) {
    const double s = (g.x(i) + 0.5 * width) / cell;
    if (s < 0.0 || s >= static_cast<double>(cells.size())) continue;
    t[i] = cells[static_cast<std::size_t>(s)];
  }
  return t;
}

std::vector<double> polynomial_phase(const PhaseSpaceGrid& g, const std::vector<double>& c) {
  std::vector<double> phase(g.x_samples(), 0.0);
  for (std::size_t i = 0; i < g.x_samples(); ++i) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * g.x(i) + c[k];
    phase[i] = acc;
  }
  return phase;
}

scenarios::Stage read_stage(Reader& r, const std::string& p, const PhaseSpaceGrid& g) {
  const std::string kind =
      r.choice(p + "kind", {"propagate", "pinhole", "two_pinholes", "rect_aperture", "amplitude_grating",
                            "coded_aperture", "prism", "lens", "cubic_phase", "phase_grating",
                            "phase_plate", "hologram"});
  if (kind == "propagate") {
    const double z = r.number(p + "z");
    if (!(z >= 0.0)) throw at_key(r.config(), p + "z", "propagation distance must be non-negative");
    return scenarios::Propagate{z};
  }
  ElementSpec e;
  if (kind == "pinhole") {
    e = Pinhole{r.number(p + "x0", 0.0)};
  } else if (kind == "two_pinholes") {
    const double a = r.number(p + "a");
    e = TwoPinholes{a, r.number(p + "b")};
  } else if (kind == "rect_aperture") {
    e = RectAperture{r.number(p + "width")};
  } else if (kind == "amplitude_grating") {
    const double m = r.number(p + "modulation", 1.0);
    e = AmplitudeGrating{m, r.number(p + "period")};
  } else if (kind == "coded_aperture") {
    const double width = r.number(p + "width");
    e = CodedAperture{coded_pattern(g, width, r.list(p + "pattern"))};
  } else if (kind == "prism") {
    e = Prism{r.number(p + "alpha")};
  } else if (kind == "lens") {
    e = Lens{r.number(p + "focal_length")};
  } else if (kind == "cubic_phase") {
    e = CubicPhase{r.number(p + "alpha")};
  } else if (kind == "phase_grating") {
    const double phi0 = r.number(p + "phi0");
    e = PhaseGrating{phi0, r.number(p + "period")};
  } else if (kind == "phase_plate") {
    e = PhasePlate{polynomial_phase(g, r.list(p + "coefficients"))};
  } else {
    const double d = r.number(p + "distance");
    const std::string c = r.choice(p + "cross_term", {"none", "published", "exact"}, "published");
    e = Hologram{d, c == "none" ? CrossTerm::none
                                : c == "exact" ? CrossTerm::exact : CrossTerm::published};
  }
  try {
    validate_element(e, g);
  } catch (const InvalidConfiguration& ex) {
    throw at_key(r.config(), p + "kind", ex.what());
  }
  return scenarios::ElementStage{std::move(e)};
}

std::vector<std::string> stage_prefixes(const Config& cfg) {
  std::vector<std::pair<std::size_t, std::string>> found;
  for (const auto& [key, v] : cfg.values()) {
    if (key.rfind("stage.", 0) != 0) continue;
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) throw ConfigError("stage keys look like stage.N.key", v.line, 1);
    const std::string id = key.substr(6, dot - 6);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), n);
    if (ec != std::errc() || ptr != id.data() + id.size()) {
      throw ConfigError("stage index '" + id + "' is not an integer", v.line, 1);
    }
    const std::string prefix = "stage." + id + ".";
    if (std::find_if(found.begin(), found.end(), [&](const auto& f) { return f.second == prefix; }) ==
        found.end()) {
      found.emplace_back(n, prefix);
    }
  }
  std::sort(found.begin(), found.end());
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].first == found[i - 1].first) {
      throw at_key(cfg, found[i].second + "kind", "stage index used twice");
    }
  }
  std::vector<std::string> out;
  for (auto& f : found) out.push_back(std::move(f.second));
  return out;
}

}  // namespace

Scenario build_scenario(const Config& cfg, const RunOverrides& overrides) {
  if (overrides.grid_scale == 0) throw ConfigError("grid scale must be >= 1", 1, 1);
  Reader r(cfg);
  Scenario sc;
  const std::string kind = r.choice("scenario.kind", {"train", "cubic_sweep"}, "train");
  sc.kind = kind == "train" ? ScenarioKind::train : ScenarioKind::cubic_sweep;
  if (overrides.grid_scale != 1) {
    r.echo.push_back("grid.scale = " + std::to_string(overrides.grid_scale));
  }
  const auto grid = read_grid(r, overrides.grid_scale);

  scenarios::OracleOptions oracle;
  oracle.enabled = overrides.compare_oracle.value_or(cfg.flag("pipeline.oracle", true));
  r.echo.push_back(std::string("pipeline.oracle = ") + (oracle.enabled ? "on" : "off"));
  oracle.pad_factor = r.count_or("pipeline.oracle_pad", oracle.pad_factor);
  if (oracle.pad_factor < 1) throw at_key(cfg, "pipeline.oracle_pad", "oracle_pad must be >= 1");
  const auto kernels = r.choice("pipeline.kernels", {"canonical", "transmittance"}, "canonical") ==
                               "canonical"
                           ? scenarios::KernelMode::canonical
                           : scenarios::KernelMode::transmittance;

  if (sc.kind == ScenarioKind::cubic_sweep) {
    scenarios::CubicSweepConfig c{grid, 0.0, 0.0, 0.0, 0.0, {}, 0.0, oracle, kernels};
    c.focal_length = r.number("cubic.focal_length");
    c.aperture = r.number("cubic.aperture");
    c.alpha = r.number("cubic.alpha");
    c.image_distance = r.number("cubic.image_distance");
    c.defocus = r.list("cubic.defocus");
    c.source_half_angle = r.number("cubic.source_half_angle");
    sc.sweep = std::move(c);
  } else {
    scenarios::OpticalTrain t{grid, read_source(r), {}, scenarios::Observation::intensity,
                              oracle, kernels, 0.9};
    t.abort_fraction = r.number("pipeline.abort_fraction", t.abort_fraction);
    const auto prefixes = stage_prefixes(cfg);
    if (prefixes.empty()) throw ConfigError("no stages defined", cfg.last_line(), 1);
    for (const auto& p : prefixes) t.stages.push_back(read_stage(r, p, grid));
    sc.train = std::move(t);
  }

  sc.output.snapshots = r.flag("output.snapshots", sc.kind == ScenarioKind::train);
  sc.output.heatmaps = r.flag("output.heatmaps", true);
  sc.output.tables = r.flag("output.tables", true);
  if (sc.train && sc.output.snapshots) sc.train->observation = scenarios::Observation::full_phase_space;
  if (sc.train) {
    try {
      scenarios::validate_train(*sc.train);
    } catch (const InvalidConfiguration& e) {
      throw ConfigError(e.what(), cfg.last_line(), 1);
    }
  }
  cfg.reject_unused();
  sc.echo = std::move(r.echo);
  return sc;
}

}  // namespace alf::io
