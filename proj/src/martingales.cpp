#include "evalanche/martingales.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "evalanche/errors.hpp"

namespace evalanche {

namespace {

double log_density(double x, const Gaussian& g) {
  const double z = (x - g.mean) / g.sd;
  return -0.5 * z * z - std::log(g.sd);
}

}  // namespace

LogValue lr_increment(double x, const Gaussian& null, const Gaussian& bet) {
  if (!std::isfinite(x)) throw DomainError("lr_increment: observation is not finite");
  if (!(null.sd > 0.0) || !(bet.sd > 0.0)) {
    throw DomainError("lr_increment: standard deviations must be positive");
  }
  // The 1/sqrt(2 pi) constants cancel.
  return LogValue::from_log(log_density(x, bet) - log_density(x, null));
}

MartingaleTable::MartingaleTable(std::size_t k) : values_(k, LogValue::one()) {
  if (k == 0) throw DomainError("MartingaleTable: need at least one hypothesis");
}

void MartingaleTable::step(std::size_t k, LogValue multiplier) {
  if (k >= values_.size()) {
    throw DomainError("MartingaleTable::step: index " + std::to_string(k) + " out of range");
  }
  values_[k] *= multiplier;
  ++steps_;
}

MartingaleTable step(MartingaleTable table, std::size_t k, LogValue multiplier) {
  table.step(k, multiplier);
  return table;
}

RankedValues rank(std::span<const LogValue> values) {
  RankedValues ranked;
  ranked.perm.resize(values.size());
  std::iota(ranked.perm.begin(), ranked.perm.end(), std::size_t{0});
  std::stable_sort(ranked.perm.begin(), ranked.perm.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  ranked.sorted.reserve(values.size());
  for (std::size_t i : ranked.perm) ranked.sorted.push_back(values[i]);
  return ranked;
}

RankedValues rank(const MartingaleTable& table) { return rank(table.values()); }

}  // namespace evalanche
