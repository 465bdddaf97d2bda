#ifndef EVALANCHE_SIMULATE_HPP
#define EVALANCHE_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "evalanche/discovery.hpp"
#include "evalanche/martingales.hpp"
#include "evalanche/merge.hpp"

namespace evalanche {

/// Deterministic random source: std::mt19937_64 (its output sequence is
/// fixed by the standard) with distributions implemented here rather than
/// by <random>, whose distributions are implementation-defined.
///
/// uniform_index uses rejection sampling on the raw 64-bit output; normal()
/// uses the Box-Muller transform on 53-bit uniforms and caches the second
/// variate of each pair.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform_open_closed();
  /// Uniform on {0, ..., n-1}.
  std::size_t uniform_index(std::size_t n);
  double normal(double mean, double sd);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct ExperimentConfig {
  std::size_t k = 200;
  /// Hypotheses 1..n_false are false nulls.
  std::size_t n_false = 100;
  Gaussian null_dist{0.0, 1.0};
  Gaussian true_dist_false_nulls{-1.0, 1.0};
  Gaussian bet_dist{-1.0, 1.0};
  std::size_t steps = 10000;
  std::string scheduler = "uniform";
  std::uint64_t seed = 42;
  /// 1-based row indices r.
  std::vector<std::size_t> tracked_rows{98, 99, 100, 101};
  MergeSpec merge_diagonal = MergeSpec::nesp(1);
  MergeSpec merge_subdiagonal = MergeSpec::nesp(2);
  MergeSpec merge_matrix = MergeSpec::nesp(1);
  /// Steps after which the full discovery matrix is emitted (0 = initial).
  std::vector<std::size_t> checkpoints{10000};
  /// Significance levels for the confidence regions reported per checkpoint.
  std::vector<double> region_alphas{10.0, 100.0, 1e8};

  /// Throws ConfigError on invariant violations.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// One tracked row's d_{r,n} or d'_{r,n}; values[n-1] is the value after step n.
struct DiagonalSeries {
  std::size_t row = 0;
  SeriesKind kind = SeriesKind::kDiagonal;
  std::vector<LogValue> values;
};

struct MatrixCheckpoint {
  std::size_t step = 0;
  RankedValues ranked;
  DiscoveryMatrix raw;
  DiscoveryMatrix regularized;
};

struct RunResult {
  MartingaleTable final_table{1};
  std::vector<DiagonalSeries> diagonal_series;
  std::vector<DiagonalSeries> subdiagonal_series;
  std::vector<MatrixCheckpoint> matrices;
  /// 0-based indices of the false nulls; simulation ground truth only.
  std::vector<std::size_t> ground_truth;
};

/// Seeded simulation: each step draws k_n uniformly, draws an observation
/// from the false-null truth (k_n < n_false) or the null, multiplies S^(k_n)
/// by the likelihood-ratio bet, re-ranks, and records the tracked rows.
RunResult run_experiment(const ExperimentConfig& cfg);

struct Quantiles {
  LogValue min, q1, median, q3, max;
};

/// Quantiles (linear interpolation between order statistics, on the log scale).
Quantiles summarize(std::vector<LogValue> samples);

struct ReplicationSummary {
  std::vector<std::uint64_t> seeds;
  /// Statistic name -> per-seed values, in seed order.
  std::map<std::string, std::vector<LogValue>> samples;
  std::map<std::string, Quantiles> quantiles;
};

/// Runs cfg once per seed (concurrently, up to worker_count() threads) and
/// aggregates final diagonal/subdiagonal values, D_{r,r}, D_{r,r-1} and
/// D_{r,r-2} of the last checkpoint (regularized), U_2(S^r, S^K) of the final
/// table, and the largest martingale.
ReplicationSummary replicate(const ExperimentConfig& cfg, std::span<const std::uint64_t> seeds);

/// Hardware concurrency, capped by EVALANCHE_THREADS when set.
std::size_t worker_count();

}  // namespace evalanche

#endif  // EVALANCHE_SIMULATE_HPP
