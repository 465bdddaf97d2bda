#include <doctest.h>

#include <cmath>
#include <limits>

#include "evalanche/errors.hpp"
#include "evalanche/log_value.hpp"

using namespace evalanche;

TEST_CASE("LogValue round-trips linear doubles") {
  // exp(log x) loses about |log x| ulps.
  for (double x : {1e-300, 1e-25, 7.8e-25, 0.5, 1.0, 3.0, 60.1, 1.07e8, 1e20, 1e300}) {
    CHECK(LogValue::from_linear(x).to_linear() == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK(LogValue::from_linear(0.0).is_zero());
  CHECK(LogValue::from_linear(0.0).to_linear() == 0.0);
  CHECK(LogValue::from_linear(std::numeric_limits<double>::infinity()).is_infinite());
  CHECK(LogValue{} == LogValue::one());
}

TEST_CASE("LogValue rejects NaN and negative values") {
  CHECK_THROWS_AS(LogValue::from_linear(-1.0), DomainError);
  CHECK_THROWS_AS(LogValue::from_linear(std::nan("")), DomainError);
  CHECK_THROWS_AS(LogValue::from_log(std::nan("")), DomainError);
}

TEST_CASE("LogValue arithmetic") {
  const auto a = LogValue::from_linear(8.0), b = LogValue::from_linear(4.0);
  CHECK((a * b).to_linear() == doctest::Approx(32.0));
  CHECK((a + b).to_linear() == doctest::Approx(12.0));
  CHECK((a / b).to_linear() == doctest::Approx(2.0));
  CHECK((a + LogValue::zero()) == a);
  CHECK((a * LogValue::zero()).is_zero());
  CHECK((a + LogValue::infinity()).is_infinite());
  // +inf is absorbing, even against 0.
  CHECK((LogValue::zero() * LogValue::infinity()).is_infinite());
  CHECK_THROWS_AS(a / LogValue::zero(), DomainError);

  // Far beyond the linear double range.
  const auto huge = LogValue::from_log(5000.0);
  CHECK((huge * huge).log() == doctest::Approx(10000.0));
  CHECK((huge + huge).log() == doctest::Approx(5000.0 + std::log(2.0)));
}

TEST_CASE("LogValue ordering") {
  CHECK(LogValue::zero() < LogValue::from_linear(1e-300));
  CHECK(LogValue::from_linear(1e300) < LogValue::infinity());
  CHECK(LogValue::from_linear(2.0) > LogValue::one());
}

TEST_CASE("format_log10 uses 12 significant digits and is stable under re-parsing") {
  CHECK(format_log10(LogValue::from_linear(100.0)) == "2");
  CHECK(format_log10(LogValue::one()) == "0");
  CHECK(format_log10(LogValue::from_linear(1.0 / 3.0)) == "-0.47712125472");
  CHECK(format_log10(LogValue::zero()) == "-inf");
  CHECK(format_log10(LogValue::infinity()) == "inf");
  for (double x : {1e-25, 0.123456789, 5.5, 1e8, 3.3e19}) {
    const LogValue v = LogValue::from_linear(x);
    const std::string text = format_log10(v);
    CHECK(format_log10(LogValue::from_log10(std::stod(text))) == text);
  }
}
