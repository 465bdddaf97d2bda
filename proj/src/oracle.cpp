#include "evalanche/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "evalanche/discovery.hpp"
#include "evalanche/errors.hpp"
#include "evalanche/martingales.hpp"
#include "evalanche/simulate.hpp"

namespace evalanche::oracle {

namespace {

double log_error(LogValue a, LogValue b) {
  if (a == b) return 0.0;
  if (!a.is_finite() || !b.is_finite()) return std::numeric_limits<double>::infinity();
  return std::abs(a.log() - b.log());
}

double relative_error(LogValue path, LogValue reference) {
  const double x = path.to_linear(), y = reference.to_linear();
  if (x == y) return 0.0;
  return std::abs(x - y) / std::abs(y);
}

}  // namespace

LogValue nesp_enumerate(std::span<const LogValue> values, std::size_t n) {
  const std::size_t k = values.size();
  if (n < 1 || n > k || k > 20) throw DomainError("nesp_enumerate: need 1 <= n <= K <= 20");
  std::vector<long double> linear;
  for (LogValue v : values) {
    if (v.is_infinite()) throw DomainError("nesp_enumerate: finite values only");
    linear.push_back(std::exp(static_cast<long double>(v.log())));
  }
  long double total = 0.0L;
  long double count = 0.0L;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != n) continue;
    long double product = 1.0L;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::uint32_t{1} << i)) product *= linear[i];
    }
    total += product;
    count += 1.0L;
  }
  return LogValue::from_log(static_cast<double>(std::log(total / count)));
}

std::vector<LogValue> log_uniform_values(std::uint64_t seed, std::size_t k, double lo, double hi) {
  Rng rng(seed);
  const double a = std::log(lo), b = std::log(hi);
  std::vector<LogValue> values;
  for (std::size_t i = 0; i < k; ++i) {
    values.push_back(LogValue::from_log(a + (b - a) * rng.uniform_open_closed()));
  }
  return values;
}

CheckResult check_nesp_enumeration(std::uint64_t seed, std::size_t instances, std::size_t max_k) {
  CheckResult result{"nesp_log vs subset enumeration", 0, 0.0, 1e-9};
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t k = 1 + rng.uniform_index(max_k);
    const std::size_t n = 1 + rng.uniform_index(k);
    const auto values = log_uniform_values(seed * 1000003 + i, k, 1e-6, 1e6);
    result.max_error = std::max(result.max_error,
                                log_error(nesp_log(values, n), nesp_enumerate(values, n)));
    ++result.instances;
  }
  return result;
}

CheckResult check_cross_paths(std::uint64_t seed, std::size_t instances, std::size_t max_k) {
  CheckResult result{"nesp_powersum/nesp_bell vs nesp_log", 0, 0.0, 1e-8};
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t k = 1 + rng.uniform_index(max_k);
    std::vector<LogValue> values;
    for (std::size_t v = 0; v < k; ++v) {
      values.push_back(LogValue::from_linear(0.1 + 9.9 * rng.uniform_open_closed()));
    }
    for (std::size_t n = 1; n <= std::min<std::size_t>(6, k); ++n) {
      const LogValue reference = nesp_log(values, n);
      result.max_error = std::max(result.max_error, relative_error(nesp_bell(values, n), reference));
      if (n <= 4) {
        result.max_error =
            std::max(result.max_error, relative_error(nesp_powersum(values, n), reference));
      }
    }
    ++result.instances;
  }
  return result;
}

CheckResult check_algorithms(std::uint64_t seed, std::size_t instances, const MergeSpec& spec,
                             std::size_t max_k) {
  CheckResult result{"discovery algorithms vs brute force (" + spec.to_string() + ")", 0, 0.0, 1e-9};
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t k = 1 + rng.uniform_index(max_k);
    const auto values = log_uniform_values(seed * 1000003 + i, k, 1e-4, 1e4);
    const RankedValues ranked = rank(values);
    const DiscoveryMatrix m = discovery_matrix(ranked, spec);
    for (std::size_t r = 1; r <= k; ++r) {
      const auto check = [&](LogValue algorithm, SubsetConstraint c, std::size_t j) {
        result.max_error = std::max(result.max_error,
                                    log_error(algorithm, brute_force_bound(values, c, r, j, spec)));
      };
      check(diagonal_row(ranked, r, spec), SubsetConstraint::kIntersectsTop, 0);
      check(subdiagonal_row(ranked, r, spec), SubsetConstraint::kAtLeastTwoInTop, 0);
      for (std::size_t j = 0; j <= r; ++j) check(m.at(r, j), SubsetConstraint::kExactlyMissing, j);
    }
    ++result.instances;
  }
  return result;
}

}  // namespace evalanche::oracle
