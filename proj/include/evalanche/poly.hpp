#ifndef EVALANCHE_POLY_HPP
#define EVALANCHE_POLY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evalanche/merge.hpp"

namespace evalanche {

/// Bitmask over variables 1..k: bit (i-1) set means s_i is in the monomial.
using Monomial = std::uint32_t;

/// A multiaffine polynomial in at most 20 variables: every monomial is a
/// product of distinct variables, keyed by its variable subset.
class MultiaffinePoly {
 public:
  static constexpr unsigned kMaxVariables = 20;

  explicit MultiaffinePoly(unsigned k);

  /// Adds `coefficient` to the monomial over `variables` (1-based indices).
  MultiaffinePoly& add_term(std::span<const unsigned> variables, double coefficient);
  MultiaffinePoly& add_term(std::initializer_list<unsigned> variables, double coefficient);
  MultiaffinePoly& set(Monomial subset, double coefficient);

  /// The polynomial sum_n weights[n] U_n written out monomial by monomial.
  static MultiaffinePoly from_spec(unsigned k, const MergeSpec& spec);

  unsigned variables() const noexcept { return k_; }
  const std::map<Monomial, double>& coefficients() const noexcept { return coeffs_; }
  double coefficient(Monomial subset) const;

  /// Direct evaluation at linear-scale arguments.
  double evaluate(std::span<const double> s) const;

 private:
  unsigned k_;
  std::map<Monomial, double> coeffs_;
};

struct Violation {
  enum class Kind { kNonPositiveCoefficient, kNotNormalized };
  Kind kind;
  std::optional<Monomial> subset;  // set for kNonPositiveCoefficient
  double value;                    // the coefficient, or the sum of coefficients
  std::string message;
};

struct PolyVerdict {
  std::vector<Violation> violations;
  bool valid() const noexcept { return violations.empty(); }
};

/// Checks that p is positive (every stored nonzero coefficient > 0) and
/// normalized (coefficients sum to 1 within 1e-12).
PolyVerdict validate_merging_polynomial(const MultiaffinePoly& p);

struct Decomposition {
  /// lambda_n = c_n * C(k, n), n = 0..k.
  std::vector<double> weights;
  /// True iff the weights are nonnegative and sum to 1, i.e. p is a valid
  /// symmetric merging polynomial and `weights` is a convex NESP mixture.
  bool convex = false;

  /// Mixture spec; throws DomainError unless convex.
  MergeSpec spec() const;
};

struct AsymmetryWitness {
  Monomial first;
  Monomial second;
  std::string message;
};

/// Either the NESP weights of a symmetric p or the first pair of equal-size
/// subsets whose coefficients differ by more than 1e-12.
struct DecomposeResult {
  std::optional<Decomposition> decomposition;
  std::optional<AsymmetryWitness> asymmetry;
  bool ok() const noexcept { return decomposition.has_value(); }
};

DecomposeResult decompose_symmetric(const MultiaffinePoly& p);

std::string subset_to_string(Monomial subset);

}  // namespace evalanche

#endif  // EVALANCHE_POLY_HPP
