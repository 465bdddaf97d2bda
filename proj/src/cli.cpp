#include "evalanche/cli.hpp"

#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "evalanche/discovery.hpp"
#include "evalanche/errors.hpp"
#include "evalanche/io.hpp"
#include "evalanche/oracle.hpp"
#include "evalanche/poly.hpp"
#include "evalanche/simulate.hpp"

namespace evalanche {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

// "98,99,100" or "98-101" or a mix; empty means every row 1..k.
std::vector<std::size_t> parse_rows(const std::string& text, std::size_t k) {
  std::vector<std::size_t> rows;
  if (text.empty()) {
    rows.resize(k);
    std::iota(rows.begin(), rows.end(), std::size_t{1});
    return rows;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        rows.push_back(std::stoul(item));
      } else {
        const std::size_t lo = std::stoul(item.substr(0, dash));
        const std::size_t hi = std::stoul(item.substr(dash + 1));
        for (std::size_t r = lo; r <= hi; ++r) rows.push_back(r);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("malformed --rows entry '" + item + "'");
    }
  }
  for (std::size_t r : rows) {
    if (r < 1 || r > k) throw ConfigError("row " + std::to_string(r) + " outside 1.." + std::to_string(k));
  }
  return rows;
}

// JSON by extension or a leading '{'; CSV otherwise.
DiscoveryMatrix load_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path.string());
  in >> std::ws;
  const bool as_json = path.extension() == ".json" || in.peek() == '{';
  if (as_json) {
    try {
      return matrix_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed matrix JSON: ") + e.what());
    }
  }
  return read_matrix_csv(in);
}

void write_matrix(std::ostream& out, const DiscoveryMatrix& m, const std::string& format) {
  if (format == "json") {
    out << matrix_to_json(m).dump(2) << '\n';
  } else {
    write_matrix_csv(out, m);
  }
}

struct RowValue {
  std::size_t row;
  SeriesKind kind;
  LogValue value;
};

void write_row_values(std::ostream& out, const std::vector<RowValue>& rows, const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const RowValue& rv : rows) {
      arr.push_back({{"row", rv.row},
                     {"kind", std::string(to_string(rv.kind))},
                     {"log10_value", format_log10(rv.value)},
                     {"value", format_linear(rv.value)}});
    }
    out << json{{"rows", arr}}.dump(2) << '\n';
    return;
  }
  out << "row,kind,log10_value,value\n";
  for (const RowValue& rv : rows) {
    out << rv.row << ',' << to_string(rv.kind) << ',' << format_log10(rv.value) << ','
        << format_linear(rv.value) << '\n';
  }
}

MultiaffinePoly load_poly(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open polynomial file " + path.string());
  try {
    const json j = json::parse(in);
    MultiaffinePoly p(j.at("k").get<unsigned>());
    for (const json& term : j.at("terms")) {
      p.add_term(term.at("vars").get<std::vector<unsigned>>(), term.at("coef").get<double>());
    }
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed polynomial JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

struct SimulateOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
  std::size_t replicates = 0;
  bool plot = false;
};

void run_simulate(const SimulateOptions& opt, std::ostream& out) {
  ExperimentConfig cfg = opt.config.empty() ? ExperimentConfig{} : load_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.validate();
  const fs::path dir = opt.out_dir;
  ensure_directory(dir);

  open_output(dir / "manifest.json") << make_manifest(cfg, opt.replicates).dump(2) << '\n';

  const RunResult run = run_experiment(cfg);
  const auto records = series_records(run);
  if (opt.format == "json") {
    open_output(dir / "series.json") << series_to_json(records).dump(2) << '\n';
  } else {
    auto f = open_output(dir / "series.csv");
    write_series_csv(f, records);
  }
  if (opt.plot) {
    std::vector<DiagonalSeries> all = run.diagonal_series;
    all.insert(all.end(), run.subdiagonal_series.begin(), run.subdiagonal_series.end());
    auto f = open_output(dir / "series.svg");
    write_series_svg(f, all);
  }
  {
    auto f = open_output(dir / "final_table.csv");
    f << "k,rank,log10_value,false_null\n";
    const RankedValues ranked = rank(run.final_table);
    std::vector<std::size_t> rank_of(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) rank_of[ranked.perm[i]] = i + 1;
    for (std::size_t k = 0; k < run.final_table.size(); ++k) {
      f << k + 1 << ',' << rank_of[k] << ',' << format_log10(run.final_table[k]) << ','
        << (k < cfg.n_false ? 1 : 0) << '\n';
    }
  }
  const std::string ext = opt.format == "json" ? ".json" : ".csv";
  for (const MatrixCheckpoint& c : run.matrices) {
    const std::string stem = "matrix_" + std::to_string(c.step);
    {
      auto f = open_output(dir / (stem + ext));
      write_matrix(f, c.raw, opt.format);
    }
    {
      auto f = open_output(dir / (stem + "_regularized" + ext));
      write_matrix(f, c.regularized, opt.format);
    }
    {
      auto f = open_output(dir / ("heatmap_" + std::to_string(c.step) + ".svg"));
      write_heatmap_svg(f, c.regularized);
    }
    std::vector<ConfidenceRegion> regions;
    for (std::size_t r : cfg.tracked_rows) {
      for (double alpha : cfg.region_alphas) regions.push_back(confidence_region(c.regularized, r, alpha));
    }
    auto f = open_output(dir / ("regions_" + std::to_string(c.step) + ext));
    if (opt.format == "json") {
      f << regions_to_json(regions).dump(2) << '\n';
    } else {
      write_regions_csv(f, regions);
    }
  }
  if (opt.replicates > 0) {
    std::vector<std::uint64_t> seeds(opt.replicates);
    std::iota(seeds.begin(), seeds.end(), cfg.seed);
    auto f = open_output(dir / "summary.csv");
    write_summary_csv(f, replicate(cfg, seeds));
  }
  out << "wrote " << dir.string() << '\n';
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple testing with test martingales: NESP merging, discovery matrices, "
               "confidence regions and the Gaussian simulation study."};
  app.name(args.empty() ? "evalanche" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  const std::vector<std::string> formats{"csv", "json"};
  std::string format = "csv";

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "Run the seeded simulation and write an output bundle");
  sim->add_option("--config", sim_opt.config, "Experiment config JSON (or a manifest.json)")
      ->check(CLI::ExistingFile);
  sim->add_option("--seed", sim_opt.seed, "Override the config seed");
  sim->add_option("--out", sim_opt.out_dir, "Output directory")->required();
  sim->add_option("--format", sim_opt.format, "Data file format")->check(CLI::IsMember(formats));
  sim->add_option("--replicates", sim_opt.replicates,
                  "Also run seeds seed..seed+N-1 and write summary.csv");
  sim->add_flag("--plot", sim_opt.plot, "Write series.svg");

  std::string values_path, merge_text, rows_text, heatmap_path, out_path, matrix_path, poly_path;
  bool regularize_flag = false;
  std::size_t row = 0;
  double alpha = 10.0;
  std::uint64_t seed = 42;
  std::size_t trials = 100;

  auto add_values = [&](CLI::App* sub, const char* default_merge) {
    sub->callback([&merge_text, default_merge] {
      if (merge_text.empty()) merge_text = default_merge;
    });
    sub->add_option("--values", values_path, "Martingale values (linear scale, CSV)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--merge", merge_text,
                    std::string("u<n> or mix:w0,w1,... (default ") + default_merge + ")");
    sub->add_option("--format", format)->check(CLI::IsMember(formats));
  };

  auto* diag = app.add_subcommand("diagonal", "Discovery diagonal d_r for the given values");
  add_values(diag, "u1");
  diag->add_option("--rows", rows_text, "Rows, e.g. 98,99 or 1-10 (default: all)");

  auto* subdiag = app.add_subcommand("subdiag", "Discovery subdiagonal d'_r for the given values");
  add_values(subdiag, "u2");
  subdiag->add_option("--rows", rows_text, "Rows, e.g. 98,99 or 1-10 (default: all)");

  auto* matrix = app.add_subcommand("matrix", "Discovery matrix D_{r,j}");
  add_values(matrix, "u1");
  matrix->add_flag("--regularize", regularize_flag, "Replace rows by their running minimum");
  matrix->add_option("--heatmap", heatmap_path, "Write an SVG heatmap");
  matrix->add_option("--out", out_path, "Matrix file (default: standard output)");

  auto* region = app.add_subcommand("region", "Confidence region for the number of justified discoveries");
  region->add_option("--matrix", matrix_path, "Matrix CSV or JSON")->required()->check(CLI::ExistingFile);
  region->add_option("--row", row, "Row r")->required();
  region->add_option("--alpha", alpha, "Significance level (> 0)");
  region->add_option("--format", format)->check(CLI::IsMember(formats));

  auto* merge = app.add_subcommand("merge", "Merge values with a NESP or NESP mixture");
  add_values(merge, "u1");

  auto* validate = app.add_subcommand("validate-poly", "Validate and decompose a multiaffine polynomial");
  validate->add_option("--poly", poly_path, "Polynomial JSON {k, terms:[{vars, coef}]}")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--format", format)->check(CLI::IsMember(formats));

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Certify the algorithms against enumeration oracles");
  oracle_cmd->add_option("--seed", seed, "Seed");
  oracle_cmd->add_option("--trials", trials, "Instances per check");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) {
      run_simulate(sim_opt, out);
    } else if (*diag || *subdiag) {
      const auto values = read_values_file(values_path);
      const MergeSpec spec = parse_merge_spec(merge_text);
      const RankedValues ranked = rank(values);
      std::vector<RowValue> rows;
      for (std::size_t r : parse_rows(rows_text, values.size())) {
        rows.push_back(*diag ? RowValue{r, SeriesKind::kDiagonal, diagonal_row(ranked, r, spec)}
                             : RowValue{r, SeriesKind::kSubdiagonal, subdiagonal_row(ranked, r, spec)});
      }
      write_row_values(out, rows, format);
    } else if (*matrix) {
      const auto values = read_values_file(values_path);
      DiscoveryMatrix m = discovery_matrix(rank(values), parse_merge_spec(merge_text));
      if (regularize_flag) m = regularize(std::move(m));
      if (out_path.empty()) {
        write_matrix(out, m, format);
      } else {
        auto f = open_output(out_path);
        write_matrix(f, m, format);
      }
      if (!heatmap_path.empty()) {
        auto f = open_output(heatmap_path);
        write_heatmap_svg(f, m);
      }
    } else if (*region) {
      const DiscoveryMatrix m = regularize(load_matrix(matrix_path));
      const ConfidenceRegion cr = confidence_region(m, row, alpha);
      if (format == "json") {
        out << regions_to_json(std::span(&cr, 1)).dump(2) << '\n';
      } else {
        write_regions_csv(out, std::span(&cr, 1));
      }
    } else if (*merge) {
      const auto values = read_values_file(values_path);
      const MergeSpec spec = parse_merge_spec(merge_text);
      const LogValue v = mixture_merge(spec, values);
      if (format == "json") {
        out << json{{"merge", spec.to_string()}, {"log10_value", format_log10(v)},
                    {"value", format_linear(v)}}.dump(2)
            << '\n';
      } else {
        out << "merge,log10_value,value\n"
            << spec.to_string() << ',' << format_log10(v) << ',' << format_linear(v) << '\n';
      }
    } else if (*validate) {
      const MultiaffinePoly p = load_poly(poly_path);
      const PolyVerdict verdict = validate_merging_polynomial(p);
      const DecomposeResult d = decompose_symmetric(p);
      if (format == "json") {
        json j = {{"valid", verdict.valid()}, {"violations", json::array()}};
        for (const Violation& v : verdict.violations) j["violations"].push_back(v.message);
        if (d.ok()) {
          j["symmetric"] = true;
          j["weights"] = d.decomposition->weights;
          j["convex"] = d.decomposition->convex;
        } else {
          j["symmetric"] = false;
          j["asymmetry"] = d.asymmetry->message;
        }
        out << j.dump(2) << '\n';
      } else {
        out << (verdict.valid() ? "valid" : "invalid") << '\n';
        for (const Violation& v : verdict.violations) out << "violation: " << v.message << '\n';
        if (d.ok()) {
          out << "symmetric: weights";
          for (double w : d.decomposition->weights) out << ' ' << format_double(w);
          out << (d.decomposition->convex ? " (convex NESP mixture)" : " (not convex)") << '\n';
        } else {
          out << d.asymmetry->message << '\n';
        }
      }
    } else if (*oracle_cmd) {
      std::vector<oracle::CheckResult> results{
          oracle::check_nesp_enumeration(seed, trials),
          oracle::check_cross_paths(seed + 1, trials),
      };
      for (const MergeSpec& spec : {MergeSpec::nesp(1), MergeSpec::nesp(2),
                                    MergeSpec::mixture({0.0, 0.5, 0.5})}) {
        results.push_back(oracle::check_algorithms(seed + 2, trials, spec));
      }
      bool all = true;
      for (const auto& r : results) {
        out << (r.passed() ? "PASS " : "FAIL ") << r.name << ": " << r.instances
            << " instances, max error " << r.max_error << " (tolerance " << r.tolerance << ")\n";
        all = all && r.passed();
      }
      return all ? kExitOk : kExitNumerical;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace evalanche
