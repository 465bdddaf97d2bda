#include "evalanche/poly.hpp"

#include <bit>
#include <cmath>

#include "evalanche/errors.hpp"

namespace evalanche {

namespace {

constexpr double kStructuralTolerance = 1e-12;

double binomial(unsigned n, unsigned k) {
  double c = 1.0;
  for (unsigned i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return std::round(c);
}

}  // namespace

MultiaffinePoly::MultiaffinePoly(unsigned k) : k_(k) {
  if (k > kMaxVariables) {
    throw DomainError("MultiaffinePoly: at most " + std::to_string(kMaxVariables) +
                      " variables are supported");
  }
}

MultiaffinePoly& MultiaffinePoly::add_term(std::span<const unsigned> variables, double coefficient) {
  Monomial subset = 0;
  for (unsigned v : variables) {
    if (v < 1 || v > k_) {
      throw DomainError("MultiaffinePoly: variable index " + std::to_string(v) + " out of range");
    }
    const Monomial bit = Monomial{1} << (v - 1);
    if (subset & bit) {
      throw DomainError("MultiaffinePoly: variable s" + std::to_string(v) +
                        " repeated in a monomial (not multiaffine)");
    }
    subset |= bit;
  }
  coeffs_[subset] += coefficient;
  return *this;
}

MultiaffinePoly& MultiaffinePoly::add_term(std::initializer_list<unsigned> variables,
                                           double coefficient) {
  return add_term(std::span<const unsigned>(variables.begin(), variables.size()), coefficient);
}

MultiaffinePoly& MultiaffinePoly::set(Monomial subset, double coefficient) {
  if (k_ < 32 && (subset >> k_) != 0) throw DomainError("MultiaffinePoly: subset out of range");
  coeffs_[subset] = coefficient;
  return *this;
}

MultiaffinePoly MultiaffinePoly::from_spec(unsigned k, const MergeSpec& spec) {
  MultiaffinePoly p(k);
  const auto& w = spec.weights();
  for (Monomial subset = 0; subset < (Monomial{1} << k); ++subset) {
    const auto n = static_cast<unsigned>(std::popcount(subset));
    if (n < w.size() && w[n] > 0.0) p.coeffs_[subset] = w[n] / binomial(k, n);
  }
  return p;
}

double MultiaffinePoly::coefficient(Monomial subset) const {
  auto it = coeffs_.find(subset);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double MultiaffinePoly::evaluate(std::span<const double> s) const {
  if (s.size() != k_) throw DomainError("MultiaffinePoly: wrong number of arguments");
  double total = 0.0;
  for (const auto& [subset, c] : coeffs_) {
    double term = c;
    for (unsigned i = 0; i < k_; ++i) {
      if (subset & (Monomial{1} << i)) term *= s[i];
    }
    total += term;
  }
  return total;
}

std::string subset_to_string(Monomial subset) {
  std::string s = "{";
  bool first = true;
  for (unsigned i = 0; i < 32; ++i) {
    if (subset & (Monomial{1} << i)) {
      if (!first) s += ',';
      s += std::to_string(i + 1);
      first = false;
    }
  }
  return s + "}";
}

PolyVerdict validate_merging_polynomial(const MultiaffinePoly& p) {
  PolyVerdict verdict;
  double total = 0.0;
  for (const auto& [subset, c] : p.coefficients()) {
    total += c;
    if (c == 0.0) continue;
    if (!(c > 0.0)) {
      verdict.violations.push_back({Violation::Kind::kNonPositiveCoefficient, subset, c,
                                    "coefficient of " + subset_to_string(subset) + " is " +
                                        std::to_string(c) + " (must be positive)"});
    }
  }
  if (!(std::abs(total - 1.0) <= kStructuralTolerance)) {
    verdict.violations.push_back({Violation::Kind::kNotNormalized, std::nullopt, total,
                                  "not normalized: coefficients sum to " + std::to_string(total)});
  }
  return verdict;
}

MergeSpec Decomposition::spec() const {
  if (!convex) throw DomainError("decomposition is not a convex mixture of NESPs");
  return MergeSpec::mixture(weights);
}

DecomposeResult decompose_symmetric(const MultiaffinePoly& p) {
  const unsigned k = p.variables();
  // First subset seen for each degree, and its coefficient.
  std::vector<std::optional<Monomial>> representative(k + 1);
  std::vector<double> common(k + 1, 0.0);
  DecomposeResult result;
  for (Monomial subset = 0; subset < (Monomial{1} << k); ++subset) {
    const auto n = static_cast<unsigned>(std::popcount(subset));
    const double c = p.coefficient(subset);
    if (!representative[n]) {
      representative[n] = subset;
      common[n] = c;
    } else if (std::abs(c - common[n]) > kStructuralTolerance) {
      result.asymmetry = AsymmetryWitness{
          *representative[n], subset,
          "asymmetric: " + subset_to_string(*representative[n]) + " has coefficient " +
              std::to_string(common[n]) + " but " + subset_to_string(subset) + " has " +
              std::to_string(c)};
      return result;
    }
  }
  Decomposition d;
  d.weights.resize(k + 1);
  double total = 0.0;
  bool nonnegative = true;
  for (unsigned n = 0; n <= k; ++n) {
    // Dividing by the rounded 1/C(k,n) inverts the coefficient w / C(k,n)
    // that a written-out U_n carries, so unit weights come back as exactly 1
    // (c * C(k,n) can land one ulp below, e.g. fl(1/49) * 49).
    d.weights[n] = common[n] / (1.0 / binomial(k, n));
    total += d.weights[n];
    if (d.weights[n] < 0.0) nonnegative = false;
  }
  d.convex = nonnegative && std::abs(total - 1.0) <= kStructuralTolerance;
  result.decomposition = std::move(d);
  return result;
}

}  // namespace evalanche
