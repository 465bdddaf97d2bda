#ifndef EVALANCHE_ORACLE_HPP
#define EVALANCHE_ORACLE_HPP

// Independent reference computations used to certify the library: plain
// subset enumeration, sharing no code path with the log-domain recurrence.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evalanche/log_value.hpp"
#include "evalanche/merge.hpp"

namespace evalanche::oracle {

/// U_n by enumerating every n-subset in long double, normalized by the number
/// of subsets visited (no binomial formula). Requires 1 <= n <= size <= 20 and
/// finite values.
LogValue nesp_enumerate(std::span<const LogValue> values, std::size_t n);

struct CheckResult {
  std::string name;
  std::size_t instances = 0;
  /// Largest |log(path) - log(reference)| or relative error, per check.
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return max_error <= tolerance; }
};

/// nesp_log vs enumeration: K <= max_k, 1 <= n <= K, log-uniform values in
/// [1e-6, 1e6], |delta log| <= 1e-9.
CheckResult check_nesp_enumeration(std::uint64_t seed, std::size_t instances, std::size_t max_k = 12);

/// nesp_powersum (n <= 4) and nesp_bell (n <= 6) vs nesp_log: K <= max_k,
/// values uniform in [0.1, 10], relative error <= 1e-8.
CheckResult check_cross_paths(std::uint64_t seed, std::size_t instances, std::size_t max_k = 50);

/// diagonal_row, subdiagonal_row and every discovery_matrix entry vs
/// brute_force_bound: K <= max_k, log-uniform values in [1e-4, 1e4],
/// |delta log| <= 1e-9.
CheckResult check_algorithms(std::uint64_t seed, std::size_t instances, const MergeSpec& spec,
                             std::size_t max_k = 10);

/// Log-uniform on [lo, hi] from a seeded stream.
std::vector<LogValue> log_uniform_values(std::uint64_t seed, std::size_t k, double lo, double hi);

}  // namespace evalanche::oracle

#endif  // EVALANCHE_ORACLE_HPP
