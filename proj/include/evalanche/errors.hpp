#ifndef EVALANCHE_ERRORS_HPP
#define EVALANCHE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evalanche {

/// An argument lies outside the domain of the operation (empty input,
/// index out of range, malformed merge specification, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A floating-point path overflowed or lost too much precision to be trusted.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or file contents.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace evalanche

#endif  // EVALANCHE_ERRORS_HPP
