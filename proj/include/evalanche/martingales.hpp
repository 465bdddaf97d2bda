#ifndef EVALANCHE_MARTINGALES_HPP
#define EVALANCHE_MARTINGALES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "evalanche/log_value.hpp"

namespace evalanche {

struct Gaussian {
  double mean = 0.0;
  double sd = 1.0;

  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

/// Likelihood ratio density_bet(x) / density_null(x): the betting factor of a
/// Sceptic who bets that x comes from `bet` rather than `null`. It has
/// expectation 1 when x ~ null.
LogValue lr_increment(double x, const Gaussian& null, const Gaussian& bet);

/// K uncorrelated test martingales S^(1..K). Every entry starts at 1 and a
/// step multiplies exactly one entry. Indices are 0-based.
class MartingaleTable {
 public:
  explicit MartingaleTable(std::size_t k);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t step_count() const noexcept { return steps_; }
  std::span<const LogValue> values() const noexcept { return values_; }
  LogValue operator[](std::size_t k) const { return values_[k]; }

  /// Multiplies entry k by `multiplier` and advances the step counter.
  void step(std::size_t k, LogValue multiplier);

  friend bool operator==(const MartingaleTable&, const MartingaleTable&) = default;

 private:
  std::vector<LogValue> values_;
  std::size_t steps_ = 0;
};

/// Value-returning form of MartingaleTable::step.
MartingaleTable step(MartingaleTable table, std::size_t k, LogValue multiplier);

/// Values sorted in non-increasing order. perm[i] is the original (0-based)
/// index of sorted[i]; ties keep the smaller original index first, so the
/// first r positions are the rejection set R_r.
struct RankedValues {
  std::vector<LogValue> sorted;
  std::vector<std::size_t> perm;

  std::size_t size() const noexcept { return sorted.size(); }
};

RankedValues rank(std::span<const LogValue> values);
RankedValues rank(const MartingaleTable& table);

}  // namespace evalanche

#endif  // EVALANCHE_MARTINGALES_HPP
