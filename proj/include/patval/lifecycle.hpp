#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patval/fine_grained.hpp"
#include "patval/pattern.hpp"
#include "patval/skeleton_extract.hpp"

namespace patval {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LearnConfig {
  ExtractConfig extract;
  EntropyParams entropy;
  bool refine = true;
  /// Drop a candidate that accepts every string sampled from a better-ranked
  /// kept candidate.
  bool prune_generalizations = true;
  std::size_t prune_samples = 64;
};

struct LearnedPatterns {
  /// Kept skeletons before refinement, best first.
  std::vector<Skeleton> unrefined;
  /// Same skeletons after refinement (equal to `unrefined` when refinement is off).
  std::vector<Skeleton> refined;
  std::vector<SkeletonCandidate> ranking;
  std::vector<std::string> warnings;
};

LearnedPatterns learn_patterns(const std::vector<std::string>& values, const GeneralizationTree& t,
                               const LearnConfig& config = {});

struct ValidationEntry {
  std::string value;
  bool pass = false;
  /// Accepting pattern on pass, deepest-progress pattern on failure.
  std::size_t best_pattern = 0;
  std::optional<std::size_t> fail_offset;
  std::optional<std::size_t> fail_atom_index;
  std::string reason;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  std::size_t passed = 0;
  std::size_t failed = 0;
};

/// A value passes when any pattern accepts it. Throws ConfigError when
/// `patterns` is empty.
ValidationReport validate_batch(const std::vector<Skeleton>& patterns, const std::vector<std::string>& batch);

enum class UpdateStatus { NoOp, Updated, CountWidened, NeedsRelearn };
const char* to_string(UpdateStatus s);

struct UpdateResult {
  std::vector<Skeleton> patterns;
  UpdateStatus status = UpdateStatus::NoOp;
  std::optional<std::size_t> updated_pattern;
  std::string message;
};

/// Widens one atom pattern so it also accepts `s` without changing how any
/// previously accepted string is matched. `s` must be a whole Base region.
std::optional<Pattern> generalize_pattern(const Pattern& p, std::string_view s, const GeneralizationTree& t);

/// True when every string `before` accepts is matched identically by
/// `after`, judged atom by atom. Atom counts must agree.
bool widening_is_safe(const Pattern& before, const Pattern& after);

/// Folds a user-confirmed value into the first pattern (in rank order) that
/// can absorb it by atom generalization and Recursive count widening.
/// Anything else leaves the patterns untouched with status NeedsRelearn.
UpdateResult incremental_update(const std::vector<Skeleton>& patterns, std::string_view value,
                                const GeneralizationTree& t);

struct AugmentExample {
  std::string candidate;
  /// Flat element index of the refined atom in the refined skeleton.
  std::size_t atom_index = 0;
  /// Class (or enum/width variant) the substitution was drawn from.
  std::string sibling_class;
  std::optional<bool> verdict;
};

/// Boundary examples accepted by `before` and rejected by `after`, at most
/// `k` per refined atom. Both skeletons must share one structure.
std::vector<AugmentExample> generate_examples(const Skeleton& before, const Skeleton& after,
                                              const GeneralizationTree& t, std::size_t k, std::uint64_t seed);

enum class Verdict { ConfirmedCorrect, ConfirmedError };

struct FeedbackRecord {
  std::string value;
  Verdict verdict = Verdict::ConfirmedCorrect;
  std::int64_t timestamp = 0;
  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

struct PatternSet {
  std::vector<Skeleton> patterns;
  std::vector<std::string> negatives;
  std::vector<FeedbackRecord> feedback;
  friend bool operator==(const PatternSet&, const PatternSet&) = default;
};

struct FeedbackOutcome {
  PatternSet state;
  std::vector<std::string> warnings;
  std::vector<std::string> needs_relearn;
};

/// Confirmed-correct values are folded in with incremental_update;
/// confirmed-error values become negatives and any pattern accepting a
/// negative moves behind the ones that do not. Per value only the latest
/// record counts. Applying the same records twice equals applying them once.
FeedbackOutcome apply_feedback(const PatternSet& state, const std::vector<FeedbackRecord>& records,
                               const GeneralizationTree& t);

inline constexpr std::size_t kAugmentRounds = 3;

}  // namespace patval
