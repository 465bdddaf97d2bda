#ifndef EVALANCHE_MERGE_HPP
#define EVALANCHE_MERGE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "evalanche/log_value.hpp"

namespace evalanche {

/// A symmetric martingale merging function, defined for every arity: either a
/// single normalized elementary symmetric polynomial U_n or a convex mixture
/// sum_n w_n U_n with U_0 = 1.
///
/// On m < n arguments U_n is evaluated as U_m (the arity rule); this keeps
/// every spec defined for any number of arguments from 1 to K.
class MergeSpec {
 public:
  enum class Kind { kNesp, kMixture };

  /// U_n, n >= 1.
  static MergeSpec nesp(std::size_t n);
  /// sum_n weights[n] U_n. Weights must be nonnegative and sum to 1 within 1e-12.
  static MergeSpec mixture(std::vector<double> weights);

  Kind kind() const noexcept { return kind_; }
  /// Largest n with a nonzero weight.
  std::size_t max_degree() const noexcept { return max_degree_; }
  /// Weights indexed by n = 0..max_degree (a unit vector for kNesp).
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// "u2", "mix:0,0.5,0.5", ... (the command-line notation).
  std::string to_string() const;

  friend bool operator==(const MergeSpec&, const MergeSpec&) = default;

 private:
  MergeSpec(Kind kind, std::vector<double> weights);

  Kind kind_;
  std::vector<double> weights_;
  std::size_t max_degree_ = 0;
};

/// Streaming log-domain elementary symmetric polynomials e_0..e_d of the
/// values added so far, via e_j <- e_j + s * e_{j-1}. Every term is
/// nonnegative, so there is no cancellation.
///
/// Copying an accumulator and adding more values is how the discovery
/// algorithms extend a base index set by successive suffix elements.
class EspAccumulator {
 public:
  explicit EspAccumulator(std::size_t max_degree);

  void add(LogValue v);

  std::size_t size() const noexcept { return count_; }
  std::size_t max_degree() const noexcept { return log_e_.size() - 1; }
  bool has_infinity() const noexcept { return has_infinity_; }

  /// U_min(n, size()) of the values added so far; 1 when n == 0 or the
  /// accumulator is empty, +inf when any value is +inf and n >= 1.
  LogValue nesp(std::size_t n) const;

 private:
  std::vector<double> log_e_;
  std::vector<double> log_binom_;  // log C(count_, j)
  std::size_t count_ = 0;
  bool has_infinity_ = false;
};

/// F(values) for the accumulated values; F of the empty set is 1.
LogValue evaluate(const MergeSpec& spec, const EspAccumulator& acc);

/// U_n(values) with the arity rule. Throws DomainError on empty input or n == 0.
LogValue nesp_log(std::span<const LogValue> values, std::size_t n);

/// U_n via the explicit power-sum formulas for n = 1..4, in linear double
/// arithmetic. Cross-check path for well-conditioned inputs only.
/// Throws DomainError for other n, NumericalError on overflow or cancellation.
LogValue nesp_powersum(std::span<const LogValue> values, std::size_t n);

/// U_n = (m-n)!/m! * B_n(p_1, -p_2, 2! p_3, ..., (-1)^{n-1} (n-1)! p_n), with
/// the complete Bell polynomial B_n evaluated by its binomial recurrence.
/// Cross-check path; same conditioning caveats as nesp_powersum.
LogValue nesp_bell(std::span<const LogValue> values, std::size_t n);

/// sum_n w_n U_n(values), accumulated by log-sum-exp.
LogValue mixture_merge(const MergeSpec& spec, std::span<const LogValue> values);

/// f(e1, e2) = (e1/(1+e1) + e2/(1+e2)) (1 + e1 e2) / 2, an ie-merging
/// function that is not a polynomial.
LogValue ie_example_f(LogValue e1, LogValue e2);

}  // namespace evalanche

#endif  // EVALANCHE_MERGE_HPP
