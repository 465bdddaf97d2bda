#ifndef EVALANCHE_LOG_VALUE_HPP
#define EVALANCHE_LOG_VALUE_HPP

#include <compare>
#include <iosfwd>
#include <limits>
#include <string>

namespace evalanche {

/// A value in [0, +inf] stored as its natural logarithm.
///
/// log = -inf represents 0 and log = +inf represents +inf. NaN is never
/// stored. Martingale values and merged evidence routinely span 1e-25 to
/// 1e20 and beyond, so all arithmetic stays on the log scale: products are
/// log additions and sums use log-sum-exp.
///
/// +inf is absorbing for multiplication, including 0 * inf = inf: a merging
/// function evaluates to +inf as soon as any argument is +inf.
class LogValue {
 public:
  /// The multiplicative identity, 1.
  constexpr LogValue() noexcept = default;

  static LogValue from_linear(double x);
  static LogValue from_log(double log_e);
  static LogValue from_log10(double log10_value);

  static constexpr LogValue zero() noexcept { return LogValue(-kInf, 0); }
  static constexpr LogValue one() noexcept { return LogValue(0.0, 0); }
  static constexpr LogValue infinity() noexcept { return LogValue(kInf, 0); }

  constexpr double log() const noexcept { return log_; }
  double log10() const noexcept;
  /// exp(log); underflows to 0 or overflows to +inf outside double range.
  double to_linear() const noexcept;

  constexpr bool is_zero() const noexcept { return log_ == -kInf; }
  constexpr bool is_infinite() const noexcept { return log_ == kInf; }
  constexpr bool is_finite() const noexcept { return !is_zero() && !is_infinite(); }

  LogValue& operator*=(LogValue rhs) noexcept;
  LogValue& operator/=(LogValue rhs);
  LogValue& operator+=(LogValue rhs) noexcept;

  friend LogValue operator*(LogValue a, LogValue b) noexcept { return a *= b; }
  friend LogValue operator/(LogValue a, LogValue b) { return a /= b; }
  friend LogValue operator+(LogValue a, LogValue b) noexcept { return a += b; }

  friend constexpr bool operator==(LogValue a, LogValue b) noexcept {
    return a.log_ == b.log_;
  }
  friend constexpr std::partial_ordering operator<=>(LogValue a, LogValue b) noexcept {
    return a.log_ <=> b.log_;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr LogValue(double log_e, int) noexcept : log_(log_e) {}

  double log_ = 0.0;
};

/// log(exp(a) + exp(b)), exact for infinite arguments.
double log_add(double a, double b) noexcept;

/// log10 of v with 12 significant digits ("%.12g"; "inf", "-inf" at the ends).
/// This is the text used by every file format.
std::string format_log10(LogValue v);

/// format_log10(v) read back as a double: the resolution at which values are
/// compared against decimal thresholds, so that classification is a function
/// of the serialized text.
double quantized_log10(LogValue v);

std::ostream& operator<<(std::ostream& os, LogValue v);

}  // namespace evalanche

#endif  // EVALANCHE_LOG_VALUE_HPP
