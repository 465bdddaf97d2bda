#include "evalanche/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "evalanche/errors.hpp"

namespace evalanche {

double Rng::uniform_open_closed() {
  // 53 random bits -> (0, 1]
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) throw DomainError("uniform_index: empty range");
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

double Rng::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  const double u1 = uniform_open_closed();
  const double u2 = uniform_open_closed();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + sd * radius * std::cos(angle);
}

void ExperimentConfig::validate() const {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (n_false > k) throw ConfigError("n_false must not exceed k");
  for (const Gaussian* g : {&null_dist, &true_dist_false_nulls, &bet_dist}) {
    if (!(g->sd > 0.0) || !std::isfinite(g->sd) || !std::isfinite(g->mean)) {
      throw ConfigError("distributions need a finite mean and a positive finite sd");
    }
  }
  if (scheduler != "uniform") throw ConfigError("unknown scheduler '" + scheduler + "'");
  for (std::size_t r : tracked_rows) {
    if (r < 1 || r > k) throw ConfigError("tracked row " + std::to_string(r) + " outside 1..k");
  }
  for (std::size_t c : checkpoints) {
    if (c > steps) throw ConfigError("checkpoint " + std::to_string(c) + " beyond the last step");
  }
  for (double a : region_alphas) {
    if (!(a > 0.0)) throw ConfigError("region alphas must be positive");
  }
}

namespace {

MatrixCheckpoint make_checkpoint(std::size_t step, const MartingaleTable& table,
                                 const MergeSpec& spec) {
  MatrixCheckpoint c;
  c.step = step;
  c.ranked = rank(table);
  c.raw = discovery_matrix(c.ranked, spec);
  c.regularized = regularize(c.raw);
  return c;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  RunResult result;
  result.final_table = MartingaleTable(cfg.k);
  for (std::size_t i = 0; i < cfg.n_false; ++i) result.ground_truth.push_back(i);
  for (std::size_t r : cfg.tracked_rows) {
    result.diagonal_series.push_back({r, SeriesKind::kDiagonal, {}});
    result.subdiagonal_series.push_back({r, SeriesKind::kSubdiagonal, {}});
    result.diagonal_series.back().values.reserve(cfg.steps);
    result.subdiagonal_series.back().values.reserve(cfg.steps);
  }

  std::vector<std::size_t> checkpoints = cfg.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  auto next_checkpoint = checkpoints.begin();

  MartingaleTable& table = result.final_table;
  if (next_checkpoint != checkpoints.end() && *next_checkpoint == 0) {
    result.matrices.push_back(make_checkpoint(0, table, cfg.merge_matrix));
    ++next_checkpoint;
  }

  Rng rng(cfg.seed);
  for (std::size_t n = 1; n <= cfg.steps; ++n) {
    const std::size_t k = rng.uniform_index(cfg.k);
    const Gaussian& truth = k < cfg.n_false ? cfg.true_dist_false_nulls : cfg.null_dist;
    const double x = rng.normal(truth.mean, truth.sd);
    table.step(k, lr_increment(x, cfg.null_dist, cfg.bet_dist));

    if (!cfg.tracked_rows.empty()) {
      const RankedValues ranked = rank(table);
      for (std::size_t i = 0; i < cfg.tracked_rows.size(); ++i) {
        const std::size_t r = cfg.tracked_rows[i];
        result.diagonal_series[i].values.push_back(diagonal_row(ranked, r, cfg.merge_diagonal));
        result.subdiagonal_series[i].values.push_back(
            subdiagonal_row(ranked, r, cfg.merge_subdiagonal));
      }
    }
    if (next_checkpoint != checkpoints.end() && *next_checkpoint == n) {
      result.matrices.push_back(make_checkpoint(n, table, cfg.merge_matrix));
      ++next_checkpoint;
    }
  }
  return result;
}

Quantiles summarize(std::vector<LogValue> samples) {
  if (samples.empty()) throw DomainError("summarize: no samples");
  std::sort(samples.begin(), samples.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const LogValue a = samples[lo], b = samples[hi];
    if (frac == 0.0 || a == b) return a;
    if (!a.is_finite() || !b.is_finite()) return frac < 0.5 ? a : b;
    return LogValue::from_log(a.log() + frac * (b.log() - a.log()));
  };
  return {samples.front(), at(0.25), at(0.5), at(0.75), samples.back()};
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EVALANCHE_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return n;
}

namespace {

std::map<std::string, LogValue> run_statistics(const RunResult& run) {
  std::map<std::string, LogValue> stats;
  for (const auto* group : {&run.diagonal_series, &run.subdiagonal_series}) {
    for (const DiagonalSeries& s : *group) {
      if (s.values.empty()) continue;
      stats[std::string(to_string(s.kind)) + "_r" + std::to_string(s.row)] = s.values.back();
    }
  }
  if (!run.matrices.empty()) {
    const MatrixCheckpoint& last = run.matrices.back();
    for (const DiagonalSeries& s : run.diagonal_series) {
      const std::size_t r = s.row;
      const std::string prefix = "D_" + std::to_string(r) + "_";
      for (std::size_t offset = 0; offset <= 2 && offset <= r; ++offset) {
        stats[prefix + std::to_string(r - offset)] = last.regularized.at(r, r - offset);
      }
    }
  }
  // U_2(S^r, S^K): the r-th largest value paired with the smallest.
  const RankedValues ranked = rank(run.final_table);
  for (const DiagonalSeries& s : run.diagonal_series) {
    const std::vector<LogValue> pair{ranked.sorted[s.row - 1], ranked.sorted.back()};
    stats["pair_u2_r" + std::to_string(s.row)] = nesp_log(pair, 2);
  }
  const auto values = run.final_table.values();
  stats["max_martingale"] = *std::max_element(values.begin(), values.end());
  return stats;
}

}  // namespace

ReplicationSummary replicate(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw DomainError("replicate: no seeds");
  cfg.validate();
  std::vector<std::map<std::string, LogValue>> per_seed(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        ExperimentConfig c = cfg;
        c.seed = seeds[i];
        per_seed[i] = run_statistics(run_experiment(c));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(worker_count(), seeds.size());
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  ReplicationSummary summary;
  summary.seeds.assign(seeds.begin(), seeds.end());
  for (const auto& stats : per_seed) {
    for (const auto& [name, value] : stats) summary.samples[name].push_back(value);
  }
  for (const auto& [name, values] : summary.samples) summary.quantiles[name] = summarize(values);
  return summary;
}

}  // namespace evalanche
