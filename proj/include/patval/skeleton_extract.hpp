#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patval/gentree.hpp"
#include "patval/pattern.hpp"

namespace patval {

struct ExtractConfig {
  /// Maximum Align/Recursive nesting of a learned skeleton.
  std::size_t depth = 3;
  std::size_t top_k = 3;
  /// Minimum fraction of values a delimiter token must occur in.
  double delimiter_support = 0.5;
  /// Values used for distance estimates; coverage always uses every value.
  std::size_t distance_sample = 32;
  /// Vertical splits try every delimiter subset up to this many candidates.
  std::size_t exhaustive_subsets = 10;
  DistanceParams distance;
};

/// Seg1 Deli1 Seg2 ... Segt. Concatenating `pieces` gives `source`.
struct Segmentation {
  std::string source;
  std::string delimiter;
  std::vector<std::string> pieces;

  std::vector<std::string_view> segments() const;
};

/// Aligned pieces of one value plus the unaligned tail.
struct VerticalPieces {
  std::vector<std::string> pieces;
  std::string tail;
};

struct SkeletonCandidate {
  Skeleton skeleton;
  double distance = 0.0;
  double coverage = 0.0;
  double symbol_score = 0.0;
};

/// Memo of normalized segment distances, keyed by the unordered pair.
class DistanceCache {
 public:
  DistanceCache(const GeneralizationTree& tree, DistanceParams params) : tree_(tree), params_(params) {}
  double normalized(std::string_view a, std::string_view b);
  double raw(std::string_view a, std::string_view b);
  std::size_t evaluations() const { return evaluations_; }
  const GeneralizationTree& tree() const { return tree_; }
  const DistanceParams& params() const { return params_; }

 private:
  const GeneralizationTree& tree_;
  DistanceParams params_;
  std::unordered_map<std::string, double> memo_;
  std::size_t evaluations_ = 0;
};

/// Punctuation/space tokens (single characters and maximal multi-character
/// runs) present in at least `delimiter_support` of the values, most
/// frequent first.
std::vector<std::string> enumerate_splits(const std::vector<std::string>& values, const ExtractConfig& config);

/// Leftmost non-overlapping split. Returns nullopt when a segment would be empty.
std::optional<Segmentation> split_on(std::string_view value, std::string_view delimiter);

/// Sum of segment distances over all segment pairs of one value; the
/// largest finite double when there are fewer than two segments.
double recursive_distance(const Segmentation& seg, const GeneralizationTree& t, const DistanceParams& p = {});

/// Position-wise sum of segment distances plus the unaligned-tail penalty.
/// Throws std::invalid_argument when the aligned piece counts differ.
double vertical_distance(const VerticalPieces& a, const VerticalPieces& b, const GeneralizationTree& t,
                         const DistanceParams& p = {});

/// Values whose pairwise distances are estimated, in input order.
std::vector<std::string> distance_sample(const std::vector<std::string>& values, std::size_t limit);
/// Index pairs compared for a sample of `n` values: all pairs up to 12
/// values, otherwise each value against its next three neighbours.
std::vector<std::pair<std::size_t, std::size_t>> distance_pairs(std::size_t n);

/// Split objectives, comparable across split kinds: mean per-character
/// distance. Recursive pools the segments of every value; vertical compares
/// values column by column.
std::optional<double> recursive_objective(const std::vector<std::string>& sample, std::string_view delimiter,
                                          DistanceCache& cache, std::size_t segment_cap = 64);
std::optional<double> vertical_objective(const std::vector<std::string>& sample,
                                         const std::vector<std::string>& delimiters, DistanceCache& cache);
double unsplit_objective(const std::vector<std::string>& sample, DistanceCache& cache);

/// Column layout of values under a delimiter set: the delimiter sequence
/// every value shares, and each value's pieces.
struct ColumnLayout {
  std::vector<std::string> shared;
  std::vector<VerticalPieces> rows;
};
/// nullopt when the values share no delimiter occurrence.
std::optional<ColumnLayout> column_layout(const std::vector<std::string>& values,
                                          const std::vector<std::string>& delimiters);

/// Flat atom pattern accepted by every value, from the finest class level at
/// which all values tokenize the same way; `<ANY>+` when none does.
Pattern learn_base_pattern(const std::vector<std::string>& values, const GeneralizationTree& t);
bool is_fallback_pattern(const Pattern& p, const GeneralizationTree& t);
bool contains_fallback(const Skeleton& k, const GeneralizationTree& t);

std::vector<SkeletonCandidate> recursive_split(const std::vector<std::string>& values, const GeneralizationTree& t,
                                               const ExtractConfig& config);
std::vector<SkeletonCandidate> vertical_split(const std::vector<std::string>& values, const GeneralizationTree& t,
                                              const ExtractConfig& config);

std::vector<SkeletonCandidate> extract_skeleton(const std::vector<std::string>& values, std::size_t depth,
                                                const GeneralizationTree& t, const ExtractConfig& config);

/// Fills coverage and symbol_score, sorts by (coverage desc, symbol_score
/// desc, distance asc, serialized text asc) and keeps the first k.
std::vector<SkeletonCandidate> score_skeletons(std::vector<SkeletonCandidate> cands,
                                               const std::vector<std::string>& values, std::size_t k);

/// Fraction of punctuation/space characters that fall inside delimiter,
/// separator, literal or enum matches. 0 when the values have none.
double symbol_score(const Skeleton& k, const std::vector<std::string>& values);
double coverage(const Skeleton& k, const std::vector<std::string>& values);

}  // namespace patval
