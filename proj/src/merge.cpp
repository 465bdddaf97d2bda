#include "evalanche/merge.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "evalanche/errors.hpp"

namespace evalanche {

namespace {

constexpr double kWeightTolerance = 1e-12;
// The linear cross-check paths give up when rounding noise (about
// kNoiseUlps * eps times the largest term) could exceed this fraction of the
// result.
constexpr double kMaxNoiseFraction = 1e-6;
constexpr double kNoiseUlps = 16.0;

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

// log(1 + e^x)
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct LinearValues {
  std::vector<double> values;
  bool has_infinity = false;
};

LinearValues to_linear_checked(std::span<const LogValue> values) {
  LinearValues out;
  out.values.reserve(values.size());
  for (LogValue v : values) {
    if (v.is_infinite()) out.has_infinity = true;
    const double x = v.to_linear();
    if (!v.is_infinite() && !std::isfinite(x)) {
      throw NumericalError("value exceeds the linear double range");
    }
    out.values.push_back(x);
  }
  return out;
}

std::vector<double> power_sums(std::span<const double> xs, std::size_t n) {
  std::vector<double> p(n + 1, 0.0);
  for (double x : xs) {
    double xp = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
      xp *= x;
      p[i] += xp;
    }
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (!std::isfinite(p[i])) throw NumericalError("power sum overflow");
  }
  return p;
}

// m (m-1) ... (m-n+1)
double falling_factorial(std::size_t m, std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 0; i < n; ++i) f *= static_cast<double>(m - i);
  return f;
}

// Rejects a negative result whose magnitude exceeds the cancellation
// tolerance relative to `scale`; tiny negative residue is clamped to 0.
LogValue checked_result(double value, double scale, const char* path) {
  if (!std::isfinite(value)) throw NumericalError(std::string(path) + ": overflow");
  const double noise = kNoiseUlps * std::numeric_limits<double>::epsilon() * scale;
  if (!(noise <= kMaxNoiseFraction * value)) {
    throw NumericalError(std::string(path) + ": catastrophic cancellation");
  }
  return LogValue::from_linear(value);
}

}  // namespace

MergeSpec::MergeSpec(Kind kind, std::vector<double> weights)
    : kind_(kind), weights_(std::move(weights)) {
  while (weights_.size() > 1 && weights_.back() == 0.0) weights_.pop_back();
  max_degree_ = weights_.size() - 1;
}

MergeSpec MergeSpec::nesp(std::size_t n) {
  if (n == 0) throw DomainError("nesp: degree must be at least 1");
  std::vector<double> w(n + 1, 0.0);
  w[n] = 1.0;
  return MergeSpec(Kind::kNesp, std::move(w));
}

MergeSpec MergeSpec::mixture(std::vector<double> weights) {
  if (weights.empty()) throw DomainError("mixture: no weights");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw DomainError("mixture: weights must be finite and nonnegative");
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > kWeightTolerance) {
    throw DomainError("mixture: weights sum to " + shortest(total) + ", not 1");
  }
  return MergeSpec(Kind::kMixture, std::move(weights));
}

std::string MergeSpec::to_string() const {
  if (kind_ == Kind::kNesp) return "u" + std::to_string(max_degree_);
  std::string s = "mix:";
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (i > 0) s += ',';
    s += shortest(weights_[i]);
  }
  return s;
}

EspAccumulator::EspAccumulator(std::size_t max_degree)
    : log_e_(max_degree + 1, -std::numeric_limits<double>::infinity()),
      log_binom_(max_degree + 1, 0.0) {
  log_e_[0] = 0.0;
}

void EspAccumulator::add(LogValue v) {
  const std::size_t m = count_ + 1;
  const std::size_t top = std::min(m, max_degree());
  if (v.is_infinite()) {
    has_infinity_ = true;
  } else if (!v.is_zero()) {
    for (std::size_t j = top; j >= 1; --j) {
      log_e_[j] = log_add(log_e_[j], v.log() + log_e_[j - 1]);
    }
  }
  // C(m, j) = C(m-1, j) * m / (m - j), and C(m, m) = 1.
  for (std::size_t j = 1; j <= top; ++j) {
    if (j == m) {
      log_binom_[j] = 0.0;
    } else {
      log_binom_[j] += std::log(static_cast<double>(m) / static_cast<double>(m - j));
    }
  }
  count_ = m;
}

LogValue EspAccumulator::nesp(std::size_t n) const {
  const std::size_t effective = std::min(n, count_);
  if (effective == 0) return LogValue::one();
  if (effective > max_degree()) {
    throw DomainError("EspAccumulator: degree " + std::to_string(effective) +
                      " exceeds accumulator degree " + std::to_string(max_degree()));
  }
  if (has_infinity_) return LogValue::infinity();
  return LogValue::from_log(log_e_[effective] - log_binom_[effective]);
}

LogValue evaluate(const MergeSpec& spec, const EspAccumulator& acc) {
  if (acc.size() == 0) return LogValue::one();
  if (spec.kind() == MergeSpec::Kind::kNesp) return acc.nesp(spec.max_degree());
  const auto& w = spec.weights();
  LogValue total = LogValue::zero();
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (w[n] == 0.0) continue;
    total += LogValue::from_linear(w[n]) * acc.nesp(n);
  }
  return total;
}

LogValue nesp_log(std::span<const LogValue> values, std::size_t n) {
  if (values.empty()) throw DomainError("nesp_log: empty argument list");
  if (n == 0) throw DomainError("nesp_log: degree must be at least 1");
  EspAccumulator acc(std::min(n, values.size()));
  for (LogValue v : values) acc.add(v);
  return acc.nesp(n);
}

LogValue mixture_merge(const MergeSpec& spec, std::span<const LogValue> values) {
  if (values.empty()) throw DomainError("mixture_merge: empty argument list");
  EspAccumulator acc(std::min(spec.max_degree(), values.size()));
  for (LogValue v : values) acc.add(v);
  return evaluate(spec, acc);
}

LogValue nesp_powersum(std::span<const LogValue> values, std::size_t n) {
  if (n < 1 || n > 4) {
    throw DomainError("nesp_powersum: only n = 1..4 is supported; use nesp_bell");
  }
  if (values.empty()) throw DomainError("nesp_powersum: empty argument list");
  const LinearValues lin = to_linear_checked(values);
  if (lin.has_infinity) return LogValue::infinity();
  const std::size_t m = lin.values.size();
  n = std::min(n, m);
  // Fewer than n nonzero values: every n-subset contains a zero.
  if (static_cast<std::size_t>(std::count_if(lin.values.begin(), lin.values.end(),
                                             [](double x) { return x != 0.0; })) < n) {
    return LogValue::zero();
  }
  const auto p = power_sums(lin.values, n);
  const double p1 = p[1];
  double numerator = 0.0;
  switch (n) {
    case 1:
      numerator = p1;
      break;
    case 2:
      numerator = p1 * p1 - p[2];
      break;
    case 3:
      numerator = p1 * p1 * p1 - 3.0 * p[2] * p1 + 2.0 * p[3];
      break;
    case 4:
      numerator = p1 * p1 * p1 * p1 - 6.0 * p[2] * p1 * p1 + 8.0 * p[3] * p1 +
                  3.0 * p[2] * p[2] - 6.0 * p[4];
      break;
  }
  const double denominator = falling_factorial(m, n);
  return checked_result(numerator / denominator, std::pow(p1, static_cast<double>(n)) / denominator,
                        "nesp_powersum");
}

LogValue nesp_bell(std::span<const LogValue> values, std::size_t n) {
  if (values.empty()) throw DomainError("nesp_bell: empty argument list");
  if (n == 0) throw DomainError("nesp_bell: degree must be at least 1");
  const LinearValues lin = to_linear_checked(values);
  if (lin.has_infinity) return LogValue::infinity();
  const std::size_t m = lin.values.size();
  n = std::min(n, m);
  // Fewer than n nonzero values: every n-subset contains a zero.
  if (static_cast<std::size_t>(std::count_if(lin.values.begin(), lin.values.end(),
                                             [](double x) { return x != 0.0; })) < n) {
    return LogValue::zero();
  }
  const auto p = power_sums(lin.values, n);

  // x_i = (-1)^{i-1} (i-1)! p_i
  std::vector<double> x(n + 1, 0.0);
  double factorial = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i > 1) factorial *= static_cast<double>(i - 1);
    x[i] = (i % 2 == 1 ? 1.0 : -1.0) * factorial * p[i];
  }

  // B_{k+1} = sum_{i=0}^{k} C(k, i) B_{k-i} x_{i+1}; bell_abs tracks the same
  // recurrence on |x| as the scale for the cancellation check.
  std::vector<double> bell(n + 1, 0.0), bell_abs(n + 1, 0.0);
  bell[0] = bell_abs[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double binom = 1.0;
    for (std::size_t i = 0; i <= k; ++i) {
      bell[k + 1] += binom * bell[k - i] * x[i + 1];
      bell_abs[k + 1] += binom * bell_abs[k - i] * std::abs(x[i + 1]);
      binom = binom * static_cast<double>(k - i) / static_cast<double>(i + 1);
    }
  }
  const double denominator = falling_factorial(m, n);
  return checked_result(bell[n] / denominator, bell_abs[n] / denominator, "nesp_bell");
}

LogValue ie_example_f(LogValue e1, LogValue e2) {
  if (e1.is_infinite() || e2.is_infinite()) return LogValue::infinity();
  // log(e / (1 + e)) = -softplus(-log e)
  const double frac1 = e1.is_zero() ? e1.log() : -softplus(-e1.log());
  const double frac2 = e2.is_zero() ? e2.log() : -softplus(-e2.log());
  const double sum = log_add(frac1, frac2);
  if (sum == -std::numeric_limits<double>::infinity()) return LogValue::zero();
  const double prod = (e1 * e2).log();
  const double one_plus = prod == -std::numeric_limits<double>::infinity() ? 0.0 : softplus(prod);
  return LogValue::from_log(sum + one_plus - std::numbers::ln2);
}

}  // namespace evalanche
