#include "evalanche/log_value.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <string>

#include "evalanche/errors.hpp"

namespace evalanche {

LogValue LogValue::from_linear(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw DomainError("LogValue: linear value must lie in [0, +inf], got " + std::to_string(x));
  }
  return LogValue(std::log(x), 0);
}

LogValue LogValue::from_log(double log_e) {
  if (std::isnan(log_e)) throw DomainError("LogValue: log value is NaN");
  return LogValue(log_e, 0);
}

LogValue LogValue::from_log10(double log10_value) {
  if (std::isnan(log10_value)) throw DomainError("LogValue: log10 value is NaN");
  return LogValue(log10_value * std::numbers::ln10, 0);
}

double LogValue::log10() const noexcept { return log_ / std::numbers::ln10; }

double LogValue::to_linear() const noexcept { return std::exp(log_); }

LogValue& LogValue::operator*=(LogValue rhs) noexcept {
  if (is_infinite() || rhs.is_infinite()) {
    log_ = kInf;
  } else {
    log_ += rhs.log_;
  }
  return *this;
}

LogValue& LogValue::operator/=(LogValue rhs) {
  if (rhs.is_zero()) throw DomainError("LogValue: division by zero");
  if (rhs.is_infinite()) {
    if (is_infinite()) throw DomainError("LogValue: inf / inf");
    log_ = -kInf;
  } else if (!is_infinite()) {
    log_ -= rhs.log_;
  }
  return *this;
}

LogValue& LogValue::operator+=(LogValue rhs) noexcept {
  log_ = log_add(log_, rhs.log_);
  return *this;
}

double log_add(double a, double b) noexcept {
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  if (lo == -std::numeric_limits<double>::infinity() ||
      hi == std::numeric_limits<double>::infinity()) {
    return hi;
  }
  return hi + std::log1p(std::exp(lo - hi));
}

std::string format_log10(LogValue v) {
  if (v.is_infinite()) return "inf";
  if (v.is_zero()) return "-inf";
  double l = v.log10();
  if (l == 0.0) l = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", l);
  return buf;
}

double quantized_log10(LogValue v) {
  if (v.is_infinite()) return std::numeric_limits<double>::infinity();
  if (v.is_zero()) return -std::numeric_limits<double>::infinity();
  return std::strtod(format_log10(v).c_str(), nullptr);
}

std::ostream& operator<<(std::ostream& os, LogValue v) {
  return os << "exp(" << v.log() << ")";
}

}  // namespace evalanche
