#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "evalanche/errors.hpp"
#include "evalanche/merge.hpp"
#include "evalanche/oracle.hpp"
#include "evalanche/simulate.hpp"
#include "helpers.hpp"

using namespace evalanche;
using evalanche::testing::lin;
using evalanche::testing::log_diff;

namespace {

// Pair enumeration by hand, for the worked values below.
double pair_mean(const std::vector<double>& s) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    for (std::size_t b = a + 1; b < s.size(); ++b) {
      sum += s[a] * s[b];
      ++count;
    }
  }
  return sum / count;
}

const MergeSpec kMix12 = MergeSpec::mixture({0.0, 0.5, 0.5});

}  // namespace

TEST_CASE("nesp_log worked values") {
  CHECK(pair_mean({1, 2, 3, 4}) == doctest::Approx(35.0 / 6.0));
  CHECK(pair_mean({8, 4, 1}) == doctest::Approx(44.0 / 3.0));

  CHECK(log_diff(nesp_log(lin({1, 1, 1, 1}), 2), LogValue::one()) <= 1e-12);
  CHECK(nesp_log(lin({8, 4}), 2).to_linear() == doctest::Approx(32.0).epsilon(1e-13));
  CHECK(nesp_log(lin({1, 2, 3, 4}), 2).to_linear() == doctest::Approx(35.0 / 6.0).epsilon(1e-13));
  CHECK(nesp_log(lin({8, 4, 1}), 2).to_linear() == doctest::Approx(44.0 / 3.0).epsilon(1e-13));
  CHECK(nesp_log(lin({8, 4, 1}), 1).to_linear() == doctest::Approx(13.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("nesp_log arity rule and edge cases") {
  // n > m evaluates U_m: U_2 of one argument is U_1.
  CHECK(nesp_log(lin({8}), 2).to_linear() == doctest::Approx(8.0));
  CHECK(nesp_log(lin({8, 4}), 5).to_linear() == doctest::Approx(32.0));
  CHECK_THROWS_AS(nesp_log({}, 1), DomainError);
  CHECK_THROWS_AS(nesp_log(lin({1.0}), 0), DomainError);
  CHECK(nesp_log(lin({1, 0, 3}), 3).is_zero());
  CHECK(nesp_log(lin({1, 0, 3}), 2).to_linear() == doctest::Approx(1.0));
}

TEST_CASE("infinity propagates through NESPs and mixtures") {
  auto values = lin({1, 2, 3});
  values.push_back(LogValue::infinity());
  for (std::size_t n = 1; n <= 4; ++n) CHECK(nesp_log(values, n).is_infinite());
  CHECK(mixture_merge(kMix12, values).is_infinite());
  CHECK(mixture_merge(MergeSpec::mixture({0.9, 0.1}), values).is_infinite());
  // U_0 alone ignores its arguments.
  CHECK(mixture_merge(MergeSpec::mixture({1.0}), values) == LogValue::one());
  values.push_back(LogValue::zero());
  CHECK(nesp_log(values, 2).is_infinite());
}

TEST_CASE("nesp_log matches subset enumeration over a wide range") {
  Rng rng(7);
  double worst = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(12);
    const std::size_t n = 1 + rng.uniform_index(k);
    const auto values = oracle::log_uniform_values(1000 + trial, k, 1e-6, 1e6);
    worst = std::max(worst, log_diff(nesp_log(values, n), oracle::nesp_enumerate(values, n)));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("nesp_log stays accurate where power sums cancel") {
  // One dominant value: p1^2 - p2 loses everything in double precision.
  auto values = lin({1e12, 1e-3, 1e-3});
  const double exact = (1e12 * 1e-3 * 2 + 1e-6) / 3.0;
  CHECK(nesp_log(values, 2).to_linear() == doctest::Approx(exact).epsilon(1e-12));
  CHECK(log_diff(nesp_log(values, 2), oracle::nesp_enumerate(values, 2)) <= 1e-12);
}

TEST_CASE("nesp_powersum worked values and errors") {
  CHECK(nesp_powersum(lin({1, 2, 3, 4}), 2).to_linear() == doctest::Approx(35.0 / 6.0));
  std::vector<LogValue> c(7, LogValue::from_linear(2.5));
  CHECK(nesp_powersum(c, 3).to_linear() == doctest::Approx(2.5 * 2.5 * 2.5));
  std::vector<LogValue> ones(50, LogValue::one());
  CHECK(nesp_powersum(ones, 4).to_linear() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(nesp_powersum(ones, 5), DomainError);
  CHECK_THROWS_AS(nesp_powersum(ones, 0), DomainError);
  CHECK_THROWS_AS(nesp_powersum(lin({1e200, 1e200}), 2), NumericalError);
}

TEST_CASE("nesp_bell worked values and errors") {
  // sigma_3(1,2,3,4) = 6 + 8 + 12 + 24 = 50 over C(4,3) = 4 subsets.
  CHECK(nesp_bell(lin({1, 2, 3, 4}), 1).to_linear() == doctest::Approx(2.5));
  CHECK(nesp_bell(lin({1, 2, 3, 4}), 3).to_linear() == doctest::Approx(12.5));
  CHECK(oracle::nesp_enumerate(lin({1, 2, 3, 4}), 3).to_linear() == doctest::Approx(12.5));
  CHECK(nesp_bell(lin({2, 2}), 2).to_linear() == doctest::Approx(4.0));
  // Cancellation: the true U_2 is ~6.7e8 but the power sums only resolve 1e24 * eps.
  for (std::size_t n = 2; n <= 4; ++n) {
    CHECK_THROWS_AS(nesp_bell(lin({1e12, 1e-3, 1e-3, 1e-3}), n), NumericalError);
    CHECK_THROWS_AS(nesp_powersum(lin({1e12, 1e-3, 1e-3, 1e-3}), n), NumericalError);
  }
  // Exact zeros are recognized rather than reported as cancellation.
  CHECK(nesp_bell(lin({0, 1}), 2).is_zero());
  CHECK(nesp_powersum(lin({0, 1, 0}), 2).is_zero());
  CHECK(nesp_bell(lin({0, 2, 4}), 2).to_linear() == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("power-sum and Bell paths agree with nesp_log") {
  Rng rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(50);
    std::vector<LogValue> values;
    for (std::size_t i = 0; i < k; ++i) values.push_back(LogValue::from_linear(0.1 + 9.9 * rng.uniform_open_closed()));
    for (std::size_t n = 1; n <= 6; ++n) {
      const double reference = nesp_log(values, n).to_linear();
      worst = std::max(worst, std::abs(nesp_bell(values, n).to_linear() / reference - 1.0));
      if (n <= 4) worst = std::max(worst, std::abs(nesp_powersum(values, n).to_linear() / reference - 1.0));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("MergeSpec validation") {
  CHECK_THROWS_AS(MergeSpec::nesp(0), DomainError);
  CHECK_THROWS_AS(MergeSpec::mixture({}), DomainError);
  CHECK_THROWS_AS(MergeSpec::mixture({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(MergeSpec::mixture({1.5, -0.5}), DomainError);
  CHECK_NOTHROW(MergeSpec::mixture({0.2, 0.3, 0.5 + 5e-13}));
  CHECK(MergeSpec::mixture({0.0, 0.5, 0.5, 0.0}).max_degree() == 2);
  CHECK(MergeSpec::nesp(3).to_string() == "u3");
  CHECK(kMix12.to_string() == "mix:0,0.5,0.5");
}

TEST_CASE("mixture_merge worked values") {
  CHECK(mixture_merge(kMix12, lin({8, 4})).to_linear() == doctest::Approx(19.0));
  CHECK(mixture_merge(MergeSpec::mixture({1.0}), lin({8, 4, 0.1})) == LogValue::one());
  CHECK(mixture_merge(MergeSpec::nesp(1), lin({8, 4, 1})).to_linear() == doctest::Approx(13.0 / 3.0));
  const auto values = lin({0.3, 7, 2, 11});
  CHECK(mixture_merge(MergeSpec::nesp(2), values) == nesp_log(values, 2));
  CHECK_THROWS_AS(mixture_merge(kMix12, {}), DomainError);
}

TEST_CASE("every merge is normalized on all-ones input") {
  for (std::size_t m = 1; m <= 60; m += 7) {
    std::vector<LogValue> ones(m, LogValue::one());
    for (std::size_t n = 1; n <= 6; ++n) CHECK(std::abs(nesp_log(ones, n).log()) <= 1e-12);
    CHECK(std::abs(mixture_merge(kMix12, ones).log()) <= 1e-12);
    CHECK(std::abs(mixture_merge(MergeSpec::mixture({0.1, 0.2, 0.3, 0.4}), ones).log()) <= 1e-12);
  }
  CHECK(ie_example_f(LogValue::one(), LogValue::one()) == LogValue::one());
}

TEST_CASE("merges are monotone in every argument") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(10);
    auto values = oracle::log_uniform_values(50 + trial, k, 1e-3, 1e3);
    const std::size_t i = rng.uniform_index(k);
    auto bigger = values;
    bigger[i] = values[i] * LogValue::from_linear(1.0 + 5.0 * rng.uniform_open_closed());
    for (std::size_t n = 1; n <= 4; ++n) CHECK(nesp_log(bigger, n) >= nesp_log(values, n));
    CHECK(mixture_merge(kMix12, bigger) >= mixture_merge(kMix12, values));
  }
}

TEST_CASE("EspAccumulator evaluates the empty set to 1") {
  EspAccumulator acc(2);
  CHECK(evaluate(kMix12, acc) == LogValue::one());
  CHECK(acc.nesp(2) == LogValue::one());
  acc.add(LogValue::from_linear(8.0));
  CHECK(acc.nesp(2).to_linear() == doctest::Approx(8.0));
  acc.add(LogValue::from_linear(4.0));
  CHECK(acc.nesp(2).to_linear() == doctest::Approx(32.0));
  acc.add(LogValue::from_linear(1.0));
  CHECK(acc.nesp(2).to_linear() == doctest::Approx(44.0 / 3.0));
  CHECK_THROWS_AS(acc.nesp(3), DomainError);
}

TEST_CASE("ie_example_f") {
  CHECK(ie_example_f(LogValue::one(), LogValue::one()) == LogValue::one());
  CHECK(ie_example_f(LogValue::zero(), LogValue::zero()).is_zero());
  const auto one = LogValue::one(), three = LogValue::from_linear(3.0);
  CHECK(ie_example_f(one, three).to_linear() == doctest::Approx(2.5));
  CHECK(ie_example_f(three, one) == ie_example_f(one, three));
  CHECK(ie_example_f(LogValue::infinity(), LogValue::zero()).is_infinite());
  // Far outside the linear range: f(e, e) ~ e^2 / 1 for large e.
  const auto big = LogValue::from_log(800.0);
  CHECK(ie_example_f(big, big).log() == doctest::Approx(1600.0));
}
