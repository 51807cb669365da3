#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "alf/cli_io.hpp"
#include "alf/elements.hpp"

namespace alf::io {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw IoError("not a number: '" + text + "'");
  return v;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string axis_line(const char* which, const AxisInfo& a, std::size_t count) {
  return std::string("# ") + which + " " + a.name + " " + std::to_string(count) + " " +
         format_number(a.first) + " " + format_number(a.step) + "\n";
}

AxisInfo x_axis(const PhaseSpaceGrid& g) { return {"x", g.x(0), g.dx()}; }
AxisInfo theta_axis(const PhaseSpaceGrid& g) { return {"theta", g.theta(0), g.dtheta()}; }

}  // namespace

void write_table(const std::filesystem::path& path, const Array2D& data, const AxisInfo& rows,
                 const AxisInfo& cols) {
  auto out = open_out(path);
  out << axis_line("rows", rows, data.rows()) << axis_line("cols", cols, data.cols());
  std::string line;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j) line += ',';
      line += format_number(data(i, j));
    }
    line += '\n';
    out << line;
  }
  close_checked(out, path);
}

Array2D read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  for (int h = 0; h < 2; ++h) {
    if (!std::getline(in, line)) throw IoError(path.string() + ": missing axis header");
    std::istringstream hs(line);
    std::string hash, which, name;
    std::size_t n = 0;
    if (!(hs >> hash >> which >> name >> n) || hash != "#") {
      throw IoError(path.string() + ": malformed axis header '" + line + "'");
    }
    (which == "rows" ? rows : cols) = n;
  }
  Array2D out(rows, cols);
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (i >= rows) throw IoError(path.string() + ": more rows than declared");
    std::size_t j = 0;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto comma = std::min(line.find(',', start), line.size());
      if (j >= cols) throw IoError(path.string() + ": row " + std::to_string(i) + " is too long");
      out(i, j++) = parse_number(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (j != cols) throw IoError(path.string() + ": row " + std::to_string(i) + " is too short");
    ++i;
  }
  if (i != rows) throw IoError(path.string() + ": fewer rows than declared");
  return out;
}

Rgb diverging_color(double v) {
  const double t = std::clamp(v, -1.0, 1.0);
  const auto lerp = [](double a, double b, double s) {
    return static_cast<unsigned char>(std::lround(a + (b - a) * s));
  };
  if (t >= 0.0) return {lerp(128, 255, t), lerp(128, 0, t), lerp(128, 0, t)};
  return {lerp(128, 0, -t), lerp(128, 0, -t), lerp(128, 255, -t)};
}

std::vector<std::filesystem::path> export_heatmap(const Array2D& data, const AxisInfo& rows,
                                                  const AxisInfo& cols,
                                                  const std::filesystem::path& stem) {
  for (double v : data.data()) {
    if (!std::isfinite(v)) throw InvalidConfiguration("heatmap: data contains non-finite values");
  }
  auto with = [&](const char* ext) {
    auto p = stem;
    p += ext;
    return p;
  };
  const auto csv = with(".csv");
  const auto ppm = with(".ppm");
  const auto meta = with(".meta");
  write_table(csv, data, rows, cols);

  const double scale = data.max_abs();
  const std::size_t width = data.rows();
  const std::size_t height = data.cols();
  std::string pixels(width * height * 3, '\0');
  for (std::size_t r = 0; r < height; ++r) {
    const std::size_t j = height - 1 - r;
    for (std::size_t i = 0; i < width; ++i) {
      const Rgb c = diverging_color(scale > 0.0 ? data(i, j) / scale : 0.0);
      const std::size_t k = 3 * (r * width + i);
      pixels[k] = static_cast<char>(c.r);
      pixels[k + 1] = static_cast<char>(c.g);
      pixels[k + 2] = static_cast<char>(c.b);
    }
  }
  auto img = open_out(ppm);
  img << "P6\n" << width << " " << height << "\n255\n";
  img.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  close_checked(img, ppm);

  nlohmann::ordered_json m;
  m["image"] = ppm.filename().string();
  m["table"] = csv.filename().string();
  m["scale"] = format_number(scale);
  m["palette"] = "blue at -scale, mid-gray at 0, red at +scale";
  m["horizontal"] = {{"axis", rows.name}, {"count", width}, {"first", format_number(rows.first)},
                     {"step", format_number(rows.step)}};
  m["vertical_upward"] = {{"axis", cols.name}, {"count", height}, {"first", format_number(cols.first)},
                          {"step", format_number(cols.step)}};
  auto side = open_out(meta);
  side << m.dump(2) << "\n";
  close_checked(side, meta);
  return {csv, ppm, meta};
}

std::vector<std::filesystem::path> export_heatmap(const AugmentedLightField& lf,
                                                  const std::filesystem::path& stem) {
  return export_heatmap(lf.radiance(), x_axis(lf.grid()), theta_axis(lf.grid()), stem);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw IoError("sha256: digest init failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

namespace {

std::string stage_tag(const scenarios::Stage& s) {
  if (std::holds_alternative<scenarios::Propagate>(s)) return "propagate";
  return element_tag(std::get<scenarios::ElementStage>(s).element);
}

std::string two_digits(std::size_t i) {
  std::ostringstream os;
  os << std::setw(2) << std::setfill('0') << i;
  return os.str();
}

nlohmann::ordered_json number_list(std::span<const double> v) {
  auto out = nlohmann::ordered_json::array();
  for (double x : v) out.push_back(format_number(x));
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  close_checked(out, path);
}

void write_train(const Scenario& sc, const std::filesystem::path& dir,
                 std::vector<std::filesystem::path>& files) {
  const auto& train = *sc.train;
  const auto result = scenarios::run_train(train);
  const auto& rep = result.report;
  const auto& g = train.grid;

  if (sc.output.tables) {
    Array2D profile(g.x_samples(), rep.oracle_run ? 2 : 1);
    for (std::size_t i = 0; i < g.x_samples(); ++i) {
      profile(i, 0) = rep.alf_intensity.values[i];
      if (rep.oracle_run) profile(i, 1) = rep.oracle_intensity.values[i];
    }
    const auto path = dir / "intensity.csv";
    write_table(path, profile, x_axis(g), {rep.oracle_run ? "alf,oracle" : "alf", 0.0, 1.0});
    files.push_back(path);
  }

  if (sc.output.snapshots) {
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      const std::string name = "snapshot_" + two_digits(k) + "_" +
                               (k == 0 ? std::string("source") : stage_tag(train.stages[k - 1]));
      if (sc.output.heatmaps) {
        for (auto& p : export_heatmap(result.snapshots[k], dir / name)) files.push_back(p);
      } else if (sc.output.tables) {
        const auto path = dir / (name + ".csv");
        write_table(path, result.snapshots[k].radiance(), x_axis(g), theta_axis(g));
        files.push_back(path);
      }
    }
  }

  nlohmann::ordered_json j;
  j["oracle_run"] = rep.oracle_run;
  j["relative_l2_error"] = format_number(rep.relative_l2_error);
  j["peak_position_offset_cells"] = rep.peak_position_offset;
  j["truncation_loss"] = format_number(rep.truncation_loss);
  j["alf_power"] = format_number(rep.alf_intensity.power());
  j["warnings"] = rep.warnings;
  const auto path = dir / "report.json";
  write_json(path, j);
  files.push_back(path);
}

void write_sweep(const Scenario& sc, const std::filesystem::path& dir,
                 std::vector<std::filesystem::path>& files) {
  const auto& c = *sc.sweep;
  const auto res = scenarios::cubic_phase_psf_sweep(c);
  const auto& g = c.grid;
  const AxisInfo defocus{"defocus_index", 0.0, 1.0};
  auto psf_table = [&](const std::vector<IntensityProfile>& psfs, const char* file) {
    if (psfs.empty()) return;
    Array2D t(g.x_samples(), psfs.size());
    for (std::size_t k = 0; k < psfs.size(); ++k) {
      for (std::size_t i = 0; i < g.x_samples(); ++i) t(i, k) = psfs[k].values[i];
    }
    write_table(dir / file, t, x_axis(g), defocus);
    files.push_back(dir / file);
  };
  auto matrix = [&](const Array2D& m, const char* file) {
    if (m.size() == 0) return;
    write_table(dir / file, m, defocus, defocus);
    files.push_back(dir / file);
  };
  if (sc.output.tables) {
    psf_table(res.alf_psfs, "psf_alf.csv");
    psf_table(res.oracle_psfs, "psf_oracle.csv");
    matrix(res.alf_similarity, "similarity_alf.csv");
    matrix(res.oracle_similarity, "similarity_oracle.csv");
  }
  auto min_of = [](const Array2D& m) {
    return m.size() ? *std::min_element(m.data().begin(), m.data().end()) : 0.0;
  };
  nlohmann::ordered_json j;
  j["defocus"] = number_list(c.defocus);
  j["alf_min_similarity"] = format_number(min_of(res.alf_similarity));
  j["alf_skewness"] = number_list(res.alf_skewness);
  if (!res.oracle_psfs.empty()) {
    j["oracle_min_similarity"] = format_number(min_of(res.oracle_similarity));
    j["oracle_skewness"] = number_list(res.oracle_skewness);
  }
  const auto path = dir / "report.json";
  write_json(path, j);
  files.push_back(path);
}

void write_manifest(const std::filesystem::path& config_path, const std::filesystem::path& dir,
                    const std::vector<std::string>& echo, RunOutcome& outcome) {
  nlohmann::ordered_json m;
  m["config"] = config_path.filename().string();
  m["config_sha256"] = sha256_file(config_path);
  m["exit_code"] = outcome.exit_code;
  m["message"] = outcome.message;
  m["config_echo"] = echo;
  auto list = nlohmann::ordered_json::array();
  for (const auto& f : outcome.files) {
    list.push_back({{"path", f.filename().string()},
                    {"bytes", std::filesystem::file_size(f)},
                    {"sha256", sha256_file(f)}});
  }
  m["files"] = list;
  const auto path = dir / "manifest.json";
  write_json(path, m);
  outcome.files.push_back(path);
}

}  // namespace

RunOutcome run(const std::filesystem::path& config_path, const std::filesystem::path& output_dir,
               const RunOverrides& overrides) {
  RunOutcome outcome;
  Scenario sc;
  try {
    sc = build_scenario(Config::load(config_path), overrides);
  } catch (const ConfigError& e) {
    return {kConfigError, config_path.string() + ": " + e.what(), {}};
  } catch (const IoError& e) {
    return {kConfigError, e.what(), {}};
  }
  try {
    std::filesystem::create_directories(output_dir);
    try {
      if (sc.kind == ScenarioKind::train) {
        write_train(sc, output_dir, outcome.files);
      } else {
        write_sweep(sc, output_dir, outcome.files);
      }
    } catch (const scenarios::ScenarioAborted& e) {
      outcome.exit_code = kAborted;
      outcome.message = e.what();
    } catch (const InvalidConfiguration& e) {
      outcome.exit_code = kConfigError;
      outcome.message = e.what();
    }
    write_manifest(config_path, output_dir, sc.echo, outcome);
  } catch (const std::exception& e) {
    return {kFailure, e.what(), outcome.files};
  }
  return outcome;
}

}  // namespace alf::io
