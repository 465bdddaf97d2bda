#include "evalanche/discovery.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <string>

#include "evalanche/errors.hpp"

namespace evalanche {

namespace {

void check_row(const RankedValues& ranked, std::size_t r) {
  if (r < 1 || r > ranked.size()) {
    throw DomainError("row " + std::to_string(r) + " outside 1.." + std::to_string(ranked.size()));
  }
}

// min over k = r+1..K+1 of F(base u {k..K}); suffix members are added from
// position K downwards. When given, `contiguous` replaces the k = r+1 set.
LogValue suffix_scan(EspAccumulator acc, std::span<const LogValue> sorted, std::size_t r,
                     const MergeSpec& spec, const LogValue* contiguous = nullptr) {
  LogValue best = evaluate(spec, acc);
  for (std::size_t k = sorted.size(); k > r; --k) {
    if (contiguous != nullptr && k == r + 1) return std::min(best, *contiguous);
    acc.add(sorted[k - 1]);
    best = std::min(best, evaluate(spec, acc));
  }
  return best;
}

// Same scan, stopping once the set would exceed `max_size` elements.
LogValue bounded_suffix_scan(EspAccumulator acc, std::span<const LogValue> sorted, std::size_t r,
                             const MergeSpec& spec, std::size_t max_size) {
  LogValue best = evaluate(spec, acc);
  for (std::size_t k = sorted.size(); k > r && acc.size() < max_size; --k) {
    acc.add(sorted[k - 1]);
    best = std::min(best, evaluate(spec, acc));
  }
  return best;
}

// Minimum of F over sets {r-t+1..r} u {k..K} with t >= min_top members of
// R_r. For t > min_top only sets with at most max_degree elements are
// visited: removing the largest member of R_r from a set of more than
// max_degree elements never increases a NESP mixture.
LogValue top_block_scan(const RankedValues& ranked, std::size_t r, std::size_t min_top,
                        const MergeSpec& spec) {
  const std::span<const LogValue> sorted = ranked.sorted;
  const std::size_t degree = spec.max_degree();
  EspAccumulator base(degree);
  for (std::size_t t = 1; t < min_top; ++t) base.add(sorted[r - t]);
  base.add(sorted[r - min_top]);
  LogValue best = suffix_scan(base, sorted, r, spec);
  for (std::size_t t = min_top + 1; t <= r && t <= degree; ++t) {
    base.add(sorted[r - t]);
    best = std::min(best, bounded_suffix_scan(base, sorted, r, spec, degree));
  }
  return best;
}

}  // namespace

std::string_view to_string(SeriesKind kind) noexcept {
  return kind == SeriesKind::kDiagonal ? "diagonal" : "subdiagonal";
}

LogValue diagonal_row(const RankedValues& ranked, std::size_t r, const MergeSpec& spec) {
  check_row(ranked, r);
  return top_block_scan(ranked, r, 1, spec);
}

LogValue subdiagonal_row(const RankedValues& ranked, std::size_t r, const MergeSpec& spec) {
  check_row(ranked, r);
  return top_block_scan(ranked, r, std::min<std::size_t>(2, r), spec);
}

DiscoveryMatrix::DiscoveryMatrix(std::size_t k)
    : k_(k), entries_(k * (k + 3) / 2, LogValue::one()) {}

void DiscoveryMatrix::check(std::size_t r, std::size_t j) const {
  if (r < 1 || r > k_ || j > r) {
    throw DomainError("matrix cell (" + std::to_string(r) + ", " + std::to_string(j) +
                      ") outside the lower triangle of size " + std::to_string(k_));
  }
}

LogValue DiscoveryMatrix::at(std::size_t r, std::size_t j) const {
  check(r, j);
  return entries_[offset(r) + j];
}

LogValue& DiscoveryMatrix::at(std::size_t r, std::size_t j) {
  check(r, j);
  return entries_[offset(r) + j];
}

std::span<const LogValue> DiscoveryMatrix::row(std::size_t r) const {
  check(r, 0);
  return std::span<const LogValue>(entries_).subspan(offset(r), r + 1);
}

std::span<LogValue> DiscoveryMatrix::row(std::size_t r) {
  check(r, 0);
  return std::span<LogValue>(entries_).subspan(offset(r), r + 1);
}

DiscoveryMatrix discovery_matrix(const RankedValues& ranked, const MergeSpec& spec) {
  const std::size_t k = ranked.size();
  const std::span<const LogValue> sorted = ranked.sorted;
  // A contiguous block {a..K} is a candidate in every row r >= a-1. Giving it
  // one value, accumulated from K downwards, keeps equal sets bit-identical
  // across rows, so D_{r,j} <= D_{r+1,j} holds exactly after regularization.
  std::vector<LogValue> contiguous(k + 2, LogValue::one());  // contiguous[a] = F({a..K})
  EspAccumulator tail(spec.max_degree());
  for (std::size_t a = k; a >= 1; --a) {
    tail.add(sorted[a - 1]);
    contiguous[a] = evaluate(spec, tail);
  }
  DiscoveryMatrix m(k);
  for (std::size_t r = 1; r <= k; ++r) {
    auto row = m.row(r);
    EspAccumulator base(spec.max_degree());
    row[r] = suffix_scan(base, sorted, r, spec, &contiguous[r + 1]);
    for (std::size_t j = r; j-- > 0;) {
      base.add(sorted[j]);  // base = {j+1..r}
      row[j] = suffix_scan(base, sorted, r, spec, &contiguous[j + 1]);
    }
  }
  return m;
}

DiscoveryMatrix regularize(DiscoveryMatrix m) {
  for (std::size_t r = 1; r <= m.size(); ++r) {
    auto row = m.row(r);
    for (std::size_t j = 1; j < row.size(); ++j) row[j] = std::min(row[j], row[j - 1]);
  }
  m.set_regularized(true);
  return m;
}

ConfidenceRegion confidence_region(const DiscoveryMatrix& m, std::size_t r, double alpha) {
  if (!m.regularized()) throw DomainError("confidence_region: matrix is not regularized");
  if (std::isnan(alpha) || alpha <= 0.0) throw DomainError("confidence_region: alpha must be > 0");
  const LogValue threshold = LogValue::from_linear(alpha);
  ConfidenceRegion region;
  region.r = r;
  region.alpha = alpha;
  const auto row = m.row(r);
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] < threshold) region.members.push_back(j);
  }
  if (!region.members.empty()) region.lower_bound = region.members.front();
  return region;
}

LogValue brute_force_bound(std::span<const LogValue> values, SubsetConstraint constraint,
                           std::size_t r, std::size_t j, const MergeSpec& spec) {
  const std::size_t k = values.size();
  if (k > kBruteForceMaxK) {
    throw DomainError("brute_force_bound: K = " + std::to_string(k) + " exceeds the limit of " +
                      std::to_string(kBruteForceMaxK));
  }
  if (r < 1 || r > k) throw DomainError("brute_force_bound: row out of range");
  if (constraint == SubsetConstraint::kExactlyMissing && j > r) {
    throw DomainError("brute_force_bound: j exceeds r");
  }
  const RankedValues ranked = rank(values);
  std::uint32_t top = 0;
  for (std::size_t i = 0; i < r; ++i) top |= std::uint32_t{1} << ranked.perm[i];

  LogValue best = LogValue::infinity();
  bool any = false;
  std::vector<LogValue> subset;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    const auto inside = static_cast<std::size_t>(std::popcount(mask & top));
    bool qualifies = false;
    switch (constraint) {
      case SubsetConstraint::kIntersectsTop:
        qualifies = inside >= 1;
        break;
      case SubsetConstraint::kAtLeastTwoInTop:
        qualifies = inside >= std::min<std::size_t>(2, r);
        break;
      case SubsetConstraint::kExactlyMissing:
        qualifies = r - inside == j;
        break;
    }
    if (!qualifies) continue;
    subset.clear();
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::uint32_t{1} << i)) subset.push_back(values[i]);
    }
    const LogValue f = subset.empty() ? LogValue::one() : mixture_merge(spec, subset);
    best = any ? std::min(best, f) : f;
    any = true;
  }
  return best;
}

ColorBucket colorize(LogValue v) {
  static constexpr std::array<double, 5> kLog10Thresholds = {1.0, 2.0, 8.0, 14.0, 20.0};
  const double l = quantized_log10(v);
  std::size_t bucket = 0;
  while (bucket < kLog10Thresholds.size() && l >= kLog10Thresholds[bucket]) ++bucket;
  return static_cast<ColorBucket>(bucket);
}

std::string_view to_string(ColorBucket bucket) noexcept {
  switch (bucket) {
    case ColorBucket::kGreen: return "green";
    case ColorBucket::kYellow: return "yellow";
    case ColorBucket::kOrange: return "orange";
    case ColorBucket::kRed: return "red";
    case ColorBucket::kDarkRed: return "darkred";
    case ColorBucket::kBlack: return "black";
  }
  return "?";
}

std::optional<ColorBucket> parse_color_bucket(std::string_view name) noexcept {
  for (int b = 0; b <= static_cast<int>(ColorBucket::kBlack); ++b) {
    if (to_string(static_cast<ColorBucket>(b)) == name) return static_cast<ColorBucket>(b);
  }
  return std::nullopt;
}

std::string_view hex_color(ColorBucket bucket) noexcept {
  switch (bucket) {
    case ColorBucket::kGreen: return "#2ca02c";
    case ColorBucket::kYellow: return "#ffdf00";
    case ColorBucket::kOrange: return "#ff7f0e";
    case ColorBucket::kRed: return "#d62728";
    case ColorBucket::kDarkRed: return "#8b0000";
    case ColorBucket::kBlack: return "#000000";
  }
  return "#ffffff";
}

}  // namespace evalanche
