#ifndef EVALANCHE_TESTS_HELPERS_HPP
#define EVALANCHE_TESTS_HELPERS_HPP

#include <cmath>
#include <initializer_list>
#include <vector>

#include "evalanche/log_value.hpp"

namespace evalanche::testing {

inline std::vector<LogValue> lin(std::initializer_list<double> xs) {
  std::vector<LogValue> out;
  for (double x : xs) out.push_back(LogValue::from_linear(x));
  return out;
}

inline double log_diff(LogValue a, LogValue b) {
  if (a == b) return 0.0;
  return std::abs(a.log() - b.log());
}

}  // namespace evalanche::testing

#endif
