#include "evalanche/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "evalanche/errors.hpp"

namespace evalanche {

using nlohmann::json;

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    fields.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size();
}

double require_double(const std::string& text, const std::string& what) {
  double x;
  if (!parse_double(trim(text), x)) throw ConfigError("malformed " + what + ": '" + text + "'");
  return x;
}

std::size_t require_index(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("malformed " + what + ": '" + text + "'");
  }
  return value;
}

LogValue parse_log10(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf") return LogValue::infinity();
  if (t == "-inf") return LogValue::zero();
  return LogValue::from_log10(require_double(t, "log10 value"));
}

json log10_json(LogValue v) {
  if (v.is_infinite()) return "inf";
  if (v.is_zero()) return "-inf";
  return quantized_log10(v);
}

LogValue log10_from_json(const json& j) {
  if (j.is_string()) return parse_log10(j.get<std::string>());
  if (!j.is_number()) throw ConfigError("expected a log10 number or \"inf\"/\"-inf\"");
  return LogValue::from_log10(j.get<double>());
}

Gaussian gaussian_from_json(const json& j, const char* field) {
  if (!j.is_object()) throw ConfigError(std::string(field) + " must be an object");
  Gaussian g;
  for (const auto& [key, value] : j.items()) {
    if (key == "mean") {
      g.mean = value.get<double>();
    } else if (key == "sd") {
      g.sd = value.get<double>();
    } else {
      throw ConfigError(std::string("unknown field ") + field + "." + key);
    }
  }
  return g;
}

json to_json(const Gaussian& g) { return {{"mean", g.mean}, {"sd", g.sd}}; }

std::string getline_stripped(std::istream& in, bool& ok) {
  std::string line;
  ok = static_cast<bool>(std::getline(in, line));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

SeriesKind parse_kind(const std::string& text) {
  const std::string t = trim(text);
  if (t == "diagonal") return SeriesKind::kDiagonal;
  if (t == "subdiagonal") return SeriesKind::kSubdiagonal;
  throw ConfigError("unknown series kind '" + text + "'");
}

}  // namespace

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

MergeSpec parse_merge_spec(std::string_view text) {
  try {
    if (text.size() >= 2 && (text[0] == 'u' || text[0] == 'U')) {
      const std::size_t n = require_index(std::string(text.substr(1)), "merge spec");
      return MergeSpec::nesp(n);
    }
    if (text.substr(0, 4) == "mix:") {
      std::vector<double> weights;
      for (const std::string& field : split(text.substr(4), ',')) {
        weights.push_back(require_double(field, "mixture weight"));
      }
      return MergeSpec::mixture(std::move(weights));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown merge spec '" + std::string(text) + "' (use u<n> or mix:w0,w1,...)");
}

json to_json(const MergeSpec& spec) {
  if (spec.kind() == MergeSpec::Kind::kNesp) return {{"kind", "nesp"}, {"n", spec.max_degree()}};
  return {{"kind", "mixture"}, {"weights", spec.weights()}};
}

MergeSpec merge_spec_from_json(const json& j) {
  try {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("merge spec needs a \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "nesp") return MergeSpec::nesp(j.at("n").get<std::size_t>());
    if (kind == "mixture") return MergeSpec::mixture(j.at("weights").get<std::vector<double>>());
    throw ConfigError("unknown merge kind '" + kind + "'");
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed merge spec: ") + e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  return {
      {"k", cfg.k},
      {"n_false", cfg.n_false},
      {"null_dist", to_json(cfg.null_dist)},
      {"true_dist_false_nulls", to_json(cfg.true_dist_false_nulls)},
      {"bet_dist", to_json(cfg.bet_dist)},
      {"steps", cfg.steps},
      {"scheduler", cfg.scheduler},
      {"seed", cfg.seed},
      {"tracked_rows", cfg.tracked_rows},
      {"merge_diagonal", to_json(cfg.merge_diagonal)},
      {"merge_subdiagonal", to_json(cfg.merge_subdiagonal)},
      {"merge_matrix", to_json(cfg.merge_matrix)},
      {"checkpoints", cfg.checkpoints},
      {"region_alphas", cfg.region_alphas},
  };
}

ExperimentConfig config_from_json(const json& root) {
  const json& j = root.is_object() && root.contains("config") ? root.at("config") : root;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "k") cfg.k = value.get<std::size_t>();
      else if (key == "n_false") cfg.n_false = value.get<std::size_t>();
      else if (key == "null_dist") cfg.null_dist = gaussian_from_json(value, "null_dist");
      else if (key == "true_dist_false_nulls")
        cfg.true_dist_false_nulls = gaussian_from_json(value, "true_dist_false_nulls");
      else if (key == "bet_dist") cfg.bet_dist = gaussian_from_json(value, "bet_dist");
      else if (key == "steps") cfg.steps = value.get<std::size_t>();
      else if (key == "scheduler") cfg.scheduler = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "tracked_rows") cfg.tracked_rows = value.get<std::vector<std::size_t>>();
      else if (key == "merge_diagonal") cfg.merge_diagonal = merge_spec_from_json(value);
      else if (key == "merge_subdiagonal") cfg.merge_subdiagonal = merge_spec_from_json(value);
      else if (key == "merge_matrix") cfg.merge_matrix = merge_spec_from_json(value);
      else if (key == "checkpoints") cfg.checkpoints = value.get<std::vector<std::size_t>>();
      else if (key == "region_alphas") cfg.region_alphas = value.get<std::vector<double>>();
      else throw ConfigError("unknown config field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json make_manifest(const ExperimentConfig& cfg, std::size_t replicates) {
  json m = {{"tool", "evalanche"}, {"version", std::string(kVersion)}, {"config", to_json(cfg)}};
  if (replicates > 0) m["replicates"] = replicates;
  return m;
}

std::vector<LogValue> read_values(std::istream& in) {
  std::vector<LogValue> values;
  std::string line;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string token;
    bool header = false;
    std::vector<LogValue> row;
    while (fields >> token) {
      double x;
      if (!parse_double(token, x)) {
        if (first_content_line) {
          header = true;
          break;
        }
        throw ConfigError("malformed value '" + token + "'");
      }
      try {
        row.push_back(LogValue::from_linear(x));
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
    }
    if (header || !row.empty()) first_content_line = false;
    if (!header) values.insert(values.end(), row.begin(), row.end());
  }
  if (values.empty()) throw ConfigError("no values found");
  return values;
}

std::vector<LogValue> read_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open values file " + path.string());
  return read_values(in);
}

std::vector<SeriesRecord> series_records(const RunResult& run) {
  std::vector<SeriesRecord> records;
  std::size_t steps = 0;
  for (const auto& s : run.diagonal_series) steps = std::max(steps, s.values.size());
  for (std::size_t n = 1; n <= steps; ++n) {
    for (const auto* group : {&run.diagonal_series, &run.subdiagonal_series}) {
      for (const DiagonalSeries& s : *group) {
        records.push_back({n, s.row, s.kind, s.values[n - 1]});
      }
    }
  }
  return records;
}

std::string format_linear(LogValue v) {
  if (v.is_zero()) return "0";
  // Derived from the written log10 text, so re-serializing a parsed file
  // reproduces the column; 10 digits is what 12-digit log10 text supports.
  const double x = std::pow(10.0, quantized_log10(v));
  if (!std::isnormal(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void write_series_csv(std::ostream& out, std::span<const SeriesRecord> records) {
  out << "step,row,kind,log10_value,value\n";
  for (const SeriesRecord& rec : records) {
    out << rec.step << ',' << rec.row << ',' << to_string(rec.kind) << ','
        << format_log10(rec.value) << ',' << format_linear(rec.value) << '\n';
  }
}

std::vector<SeriesRecord> read_series_csv(std::istream& in) {
  bool ok;
  const std::string header = getline_stripped(in, ok);
  if (!ok || header != "step,row,kind,log10_value,value") {
    throw ConfigError("series CSV: unexpected header '" + header + "'");
  }
  std::vector<SeriesRecord> records;
  while (true) {
    const std::string line = getline_stripped(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw ConfigError("series CSV: expected 5 fields in '" + line + "'");
    records.push_back({require_index(f[0], "step"), require_index(f[1], "row"), parse_kind(f[2]),
                       parse_log10(f[3])});
  }
  return records;
}

json series_to_json(std::span<const SeriesRecord> records) {
  json arr = json::array();
  for (const SeriesRecord& rec : records) {
    arr.push_back({{"step", rec.step},
                   {"row", rec.row},
                   {"kind", std::string(to_string(rec.kind))},
                   {"log10_value", log10_json(rec.value)}});
  }
  return {{"series", arr}};
}

std::vector<SeriesRecord> series_from_json(const json& j) {
  std::vector<SeriesRecord> records;
  try {
    for (const json& rec : j.at("series")) {
      records.push_back({rec.at("step").get<std::size_t>(), rec.at("row").get<std::size_t>(),
                         parse_kind(rec.at("kind").get<std::string>()),
                         log10_from_json(rec.at("log10_value"))});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed series JSON: ") + e.what());
  }
  return records;
}

void write_matrix_csv(std::ostream& out, const DiscoveryMatrix& m) {
  out << "r,j,log10_value,bucket\n";
  for (std::size_t r = 1; r <= m.size(); ++r) {
    const auto row = m.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << r << ',' << j << ',' << format_log10(row[j]) << ',' << to_string(colorize(row[j]))
          << '\n';
    }
  }
}

DiscoveryMatrix read_matrix_csv(std::istream& in) {
  bool ok;
  const std::string header = getline_stripped(in, ok);
  if (!ok || header != "r,j,log10_value,bucket") {
    throw ConfigError("matrix CSV: unexpected header '" + header + "'");
  }
  struct Cell {
    std::size_t r, j;
    LogValue v;
  };
  std::vector<Cell> cells;
  std::size_t k = 0;
  while (true) {
    const std::string line = getline_stripped(in, ok);
    if (!ok) break;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw ConfigError("matrix CSV: expected 4 fields in '" + line + "'");
    Cell c{require_index(f[0], "row"), require_index(f[1], "column"), parse_log10(f[2])};
    const auto bucket = parse_color_bucket(trim(f[3]));
    if (!bucket) throw ConfigError("matrix CSV: unknown bucket '" + f[3] + "'");
    if (*bucket != colorize(c.v)) {
      throw ConfigError("matrix CSV: bucket '" + f[3] + "' does not match value in '" + line + "'");
    }
    if (c.r < 1 || c.j > c.r) throw ConfigError("matrix CSV: cell outside the lower triangle");
    k = std::max(k, c.r);
    cells.push_back(c);
  }
  if (k == 0) throw ConfigError("matrix CSV: no cells");
  if (cells.size() != k * (k + 3) / 2) {
    throw ConfigError("matrix CSV: expected " + std::to_string(k * (k + 3) / 2) + " cells, found " +
                      std::to_string(cells.size()));
  }
  DiscoveryMatrix m(k);
  std::vector<bool> seen(cells.size(), false);
  for (const Cell& c : cells) {
    const std::size_t index = (c.r - 1) * (c.r + 2) / 2 + c.j;
    if (seen[index]) throw ConfigError("matrix CSV: duplicate cell");
    seen[index] = true;
    m.at(c.r, c.j) = c.v;
  }
  return m;
}

json matrix_to_json(const DiscoveryMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 1; r <= m.size(); ++r) {
    json row = json::array();
    for (LogValue v : m.row(r)) row.push_back(log10_json(v));
    rows.push_back(std::move(row));
  }
  return {{"k", m.size()}, {"regularized", m.regularized()}, {"log10_values", rows}};
}

DiscoveryMatrix matrix_from_json(const json& j) {
  try {
    const std::size_t k = j.at("k").get<std::size_t>();
    const json& rows = j.at("log10_values");
    if (rows.size() != k) throw ConfigError("matrix JSON: expected " + std::to_string(k) + " rows");
    DiscoveryMatrix m(k);
    for (std::size_t r = 1; r <= k; ++r) {
      const json& row = rows.at(r - 1);
      if (row.size() != r + 1) throw ConfigError("matrix JSON: row " + std::to_string(r) + " has wrong length");
      for (std::size_t c = 0; c <= r; ++c) m.at(r, c) = log10_from_json(row.at(c));
    }
    m.set_regularized(j.value("regularized", false));
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed matrix JSON: ") + e.what());
  }
}

void write_heatmap_svg(std::ostream& out, const DiscoveryMatrix& m, HeatmapOptions options) {
  const int c = options.cell_size;
  const auto k = static_cast<int>(m.size());
  const int width = (k + 1) * c;
  const int height = k * c;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (int r = 1; r <= k; ++r) {
    const auto row = m.row(static_cast<std::size_t>(r));
    for (int j = 0; j <= r; ++j) {
      out << "<rect x=\"" << j * c << "\" y=\"" << (r - 1) * c << "\" width=\"" << c
          << "\" height=\"" << c << "\" fill=\"" << hex_color(colorize(row[j])) << "\" data-r=\""
          << r << "\" data-j=\"" << j << "\"/>\n";
    }
  }
  out << "</g>\n</svg>\n";
}

void write_series_svg(std::ostream& out, std::span<const DiagonalSeries> series) {
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  constexpr double kWidth = 800, kHeight = 400, kMargin = 50;
  std::size_t steps = 0;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    steps = std::max(steps, s.values.size());
    for (LogValue v : s.values) {
      if (!v.is_finite()) continue;
      lo = std::min(lo, v.log10());
      hi = std::max(hi, v.log10());
    }
  }
  if (hi - lo < 1.0) hi = lo + 1.0;
  auto px = [&](std::size_t step) {
    return kMargin + (steps <= 1 ? 0.0 : (kWidth - 2 * kMargin) * static_cast<double>(step - 1) /
                                             static_cast<double>(steps - 1));
  };
  auto py = [&](double l) {
    l = std::clamp(l, lo, hi);
    return kHeight - kMargin - (kHeight - 2 * kMargin) * (l - lo) / (hi - lo);
  };
  char buf[96];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"400\" "
         "viewBox=\"0 0 800 400\">\n<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" "
         "fill=\"#ffffff\"/>\n";
  std::snprintf(buf, sizeof(buf), "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#000000\"/>\n",
                kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin);
  out << buf;
  std::snprintf(buf, sizeof(buf), "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#000000\"/>\n",
                kMargin, kMargin, kMargin, kHeight - kMargin);
  out << buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"5\" y=\"%g\" font-size=\"10\">%.3g</text>\n", kMargin, hi);
  out << buf;
  std::snprintf(buf, sizeof(buf), "<text x=\"5\" y=\"%g\" font-size=\"10\">%.3g</text>\n",
                kHeight - kMargin, lo);
  out << buf;
  out << "<text x=\"400\" y=\"390\" font-size=\"12\" text-anchor=\"middle\">step</text>\n";
  out << "<text x=\"12\" y=\"200\" font-size=\"12\" transform=\"rotate(-90 12 200)\" "
         "text-anchor=\"middle\">log10 value</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t n = 1; n <= s.values.size(); ++n) {
      const LogValue v = s.values[n - 1];
      const double l = v.is_zero() ? lo : v.is_infinite() ? hi : v.log10();
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", n == 1 ? "" : " ", px(n), py(l));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf), "<text x=\"%g\" y=\"%g\" font-size=\"10\" fill=\"%s\">%s r=%zu</text>\n",
                  kWidth - kMargin - 120, kMargin + 12.0 * static_cast<double>(i), color,
                  std::string(to_string(s.kind)).c_str(), s.row);
    out << buf;
  }
  out << "</svg>\n";
}

void write_regions_csv(std::ostream& out, std::span<const ConfidenceRegion> regions) {
  out << "row,alpha,lower_bound,members\n";
  for (const ConfidenceRegion& region : regions) {
    out << region.r << ',' << format_double(region.alpha) << ',';
    if (region.lower_bound) out << *region.lower_bound;
    out << ',';
    for (std::size_t i = 0; i < region.members.size(); ++i) {
      out << (i ? ";" : "") << region.members[i];
    }
    out << '\n';
  }
}

json regions_to_json(std::span<const ConfidenceRegion> regions) {
  json arr = json::array();
  for (const ConfidenceRegion& region : regions) {
    json entry = {{"row", region.r},
                  {"alpha", std::isinf(region.alpha) ? json("inf") : json(region.alpha)},
                  {"members", region.members}};
    entry["lower_bound"] = region.lower_bound ? json(*region.lower_bound) : json(nullptr);
    arr.push_back(std::move(entry));
  }
  return {{"regions", arr}};
}

void write_summary_csv(std::ostream& out, const ReplicationSummary& summary) {
  out << "statistic,min_log10,q1_log10,median_log10,q3_log10,max_log10\n";
  for (const auto& [name, q] : summary.quantiles) {
    out << name << ',' << format_log10(q.min) << ',' << format_log10(q.q1) << ','
        << format_log10(q.median) << ',' << format_log10(q.q3) << ',' << format_log10(q.max) << '\n';
  }
}

}  // namespace evalanche
