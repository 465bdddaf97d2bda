#ifndef EVALANCHE_DISCOVERY_HPP
#define EVALANCHE_DISCOVERY_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evalanche/log_value.hpp"
#include "evalanche/martingales.hpp"
#include "evalanche/merge.hpp"

namespace evalanche {

// Rows r are 1-based set sizes (R_r = the r largest values) and columns j
// count hypotheses of R_r assumed not justified, so both follow the usual
// D_{r,j} indexing. Sorted positions inside RankedValues are 0-based.

enum class SeriesKind { kDiagonal, kSubdiagonal };

std::string_view to_string(SeriesKind kind) noexcept;

/// d_{r,n}: lower bound on the evidence that all of R_r are justified
/// discoveries, i.e. the minimum of F over index sets meeting R_r.
///
/// Scans {r} u {k..K} for k = r+1..K+1, plus the few sets that contain more
/// than one member of R_r and have at most max_degree(spec) elements. Larger
/// such sets can never be smaller (dropping their largest member of R_r does
/// not increase F), so the result is the exact minimum; the extra sets only
/// matter through the arity rule, e.g. U_2({r-1, r}) < U_2({r}) when the
/// values are below 1.
LogValue diagonal_row(const RankedValues& ranked, std::size_t r, const MergeSpec& spec);

/// d'_{r,n}: the same with at most one unjustified discovery allowed, i.e.
/// the minimum over index sets holding at least two members of R_r (one
/// when r = 1). Base set {r-1, r} (or {1}) extended by suffixes.
LogValue subdiagonal_row(const RankedValues& ranked, std::size_t r, const MergeSpec& spec);

/// Lower-triangular D_{r,j}, r = 1..K, j = 0..r.
class DiscoveryMatrix {
 public:
  DiscoveryMatrix() = default;
  /// All entries 1.
  explicit DiscoveryMatrix(std::size_t k);

  std::size_t size() const noexcept { return k_; }
  bool regularized() const noexcept { return regularized_; }
  void set_regularized(bool value) noexcept { regularized_ = value; }

  LogValue at(std::size_t r, std::size_t j) const;
  LogValue& at(std::size_t r, std::size_t j);
  /// Entries D_{r,0..r}.
  std::span<const LogValue> row(std::size_t r) const;
  std::span<LogValue> row(std::size_t r);

  friend bool operator==(const DiscoveryMatrix&, const DiscoveryMatrix&) = default;

 private:
  static std::size_t offset(std::size_t r) noexcept { return (r - 1) * (r + 2) / 2; }
  void check(std::size_t r, std::size_t j) const;

  std::size_t k_ = 0;
  bool regularized_ = false;
  std::vector<LogValue> entries_;
};

/// D_{r,j} = min over I with |R_r \ I| = j of F(I), F(empty set) = 1.
/// Candidate sets are {j+1..r} u {k..K}; this is exact for every NESP
/// mixture because F is coordinate-wise monotone. Unregularized.
DiscoveryMatrix discovery_matrix(const RankedValues& ranked, const MergeSpec& spec);

/// Replaces every row by its running minimum in j. Idempotent.
DiscoveryMatrix regularize(DiscoveryMatrix m);

struct ConfidenceRegion {
  std::size_t r = 0;
  double alpha = 0.0;
  /// { j : D_{r,j} < alpha }, ascending; an interval {L..r} on a regularized row.
  std::vector<std::size_t> members;
  /// L, the lower confidence bound on the number of justified discoveries
  /// among R_r. Empty when no j qualifies.
  std::optional<std::size_t> lower_bound;
};

/// Requires a regularized matrix and alpha > 0 (alpha may be +inf).
ConfidenceRegion confidence_region(const DiscoveryMatrix& m, std::size_t r, double alpha);

enum class SubsetConstraint {
  kIntersectsTop,     // |I n R_r| >= 1
  kAtLeastTwoInTop,   // |I n R_r| >= min(2, r)
  kExactlyMissing,    // |R_r \ I| = j
};

/// Minimum of F over every qualifying I subset of {1..K}, by enumeration of
/// all 2^K subsets (K <= 16). The empty set contributes 1 when it qualifies;
/// +inf when nothing qualifies.
LogValue brute_force_bound(std::span<const LogValue> values, SubsetConstraint constraint,
                           std::size_t r, std::size_t j, const MergeSpec& spec);

inline constexpr std::size_t kBruteForceMaxK = 16;

enum class ColorBucket { kGreen, kYellow, kOrange, kRed, kDarkRed, kBlack };

/// [0,10) green, [10,100) yellow, [100,1e8) orange, [1e8,1e14) red,
/// [1e14,1e20) dark red, [1e20,inf] black; compared on quantized_log10(v).
ColorBucket colorize(LogValue v);

std::string_view to_string(ColorBucket bucket) noexcept;
std::optional<ColorBucket> parse_color_bucket(std::string_view name) noexcept;
/// "#2ca02c", "#ffdf00", "#ff7f0e", "#d62728", "#8b0000", "#000000".
std::string_view hex_color(ColorBucket bucket) noexcept;

}  // namespace evalanche

#endif  // EVALANCHE_DISCOVERY_HPP
