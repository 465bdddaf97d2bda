#ifndef EVALANCHE_IO_HPP
#define EVALANCHE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "evalanche/discovery.hpp"
#include "evalanche/simulate.hpp"

namespace evalanche {

inline constexpr std::string_view kVersion = "0.1.0";

// Merge specs ---------------------------------------------------------------

/// "u<n>" or "mix:w0,w1,...". Throws ConfigError.
MergeSpec parse_merge_spec(std::string_view text);

/// {"kind":"nesp","n":2} or {"kind":"mixture","weights":[0,0.5,0.5]}.
nlohmann::json to_json(const MergeSpec& spec);
MergeSpec merge_spec_from_json(const nlohmann::json& j);

// Experiment configuration ----------------------------------------------------

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Accepts a bare config object or a manifest ({"config": {...}, ...}).
/// Missing fields keep their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// {"tool", "version", "config"}: enough to rerun `simulate` bit-exactly.
nlohmann::json make_manifest(const ExperimentConfig& cfg, std::size_t replicates = 0);

// Values ------------------------------------------------------------------------

/// Linear-scale values separated by commas, whitespace or newlines; "inf" is
/// accepted, '#' starts a comment, and a non-numeric first line is a header.
std::vector<LogValue> read_values(std::istream& in);
std::vector<LogValue> read_values_file(const std::filesystem::path& path);

// Series ------------------------------------------------------------------------

struct SeriesRecord {
  std::size_t step = 0;
  std::size_t row = 0;
  SeriesKind kind = SeriesKind::kDiagonal;
  LogValue value;

  friend bool operator==(const SeriesRecord&, const SeriesRecord&) = default;
};

/// Ordered by step, then diagonal rows, then subdiagonal rows (config order).
std::vector<SeriesRecord> series_records(const RunResult& run);

/// Header "step,row,kind,log10_value,value"; `value` is empty when the linear
/// value is outside the normal double range (exact zero is written as 0).
void write_series_csv(std::ostream& out, std::span<const SeriesRecord> records);
std::vector<SeriesRecord> read_series_csv(std::istream& in);
nlohmann::json series_to_json(std::span<const SeriesRecord> records);
std::vector<SeriesRecord> series_from_json(const nlohmann::json& j);

/// Linear value text for the `value` column, 10 significant digits computed
/// from the 12-digit log10 text ("" when out of range).
std::string format_linear(LogValue v);

// Matrices ----------------------------------------------------------------------

/// Header "r,j,log10_value,bucket", rows r = 1..K, columns j = 0..r.
void write_matrix_csv(std::ostream& out, const DiscoveryMatrix& m);
/// The regularized flag is not stored; the result is unregularized.
DiscoveryMatrix read_matrix_csv(std::istream& in);
nlohmann::json matrix_to_json(const DiscoveryMatrix& m);
DiscoveryMatrix matrix_from_json(const nlohmann::json& j);

struct HeatmapOptions {
  int cell_size = 12;
};

/// Standalone SVG: one rect per cell, row 1 at the top, column j = 0 on the
/// left, filled with hex_color(colorize(D_{r,j})).
void write_heatmap_svg(std::ostream& out, const DiscoveryMatrix& m, HeatmapOptions options = {});

/// Line chart of log10 values over steps, one polyline per series.
void write_series_svg(std::ostream& out, std::span<const DiagonalSeries> series);

// Reports -----------------------------------------------------------------------

/// Header "row,alpha,lower_bound,members"; members separated by ';'.
void write_regions_csv(std::ostream& out, std::span<const ConfidenceRegion> regions);
nlohmann::json regions_to_json(std::span<const ConfidenceRegion> regions);

/// Header "statistic,min_log10,q1_log10,median_log10,q3_log10,max_log10".
void write_summary_csv(std::ostream& out, const ReplicationSummary& summary);

/// Shortest round-trip text for a double ("inf" for infinity).
std::string format_double(double x);

}  // namespace evalanche

#endif  // EVALANCHE_IO_HPP
