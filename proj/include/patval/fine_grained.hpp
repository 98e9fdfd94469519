#pragma once

#include <string>
#include <vector>

#include "patval/gentree.hpp"
#include "patval/pattern.hpp"

namespace patval {

struct EntropyParams {
  double beta = 1.0;
  double class_weight = 0.5;
  std::size_t enum_threshold = 5;
  std::size_t enum_min_support = 2;
  /// Pin a class atom to exactly(n) when every training substring has length n.
  bool pin_fixed_width = true;
};

/// What one atom consumed across the training segments.
struct SlotStats {
  std::size_t atom_index = 0;
  std::vector<std::string> substrings;
  double mean_len = 0.0;
  std::size_t distinct = 0;

  static SlotStats from(std::size_t atom_index, std::vector<std::string> substrings);
};

/// Shannon entropy (bits) of the distinct-substring distribution, plus beta.
double token_entropy(const SlotStats& stats, const EntropyParams& params = {});
/// mean_len * (entropy + class_weight * log2 |charset|); literal and enum
/// atoms count as a single-character charset.
double atom_cost(const AtomPattern& atom, const SlotStats& stats, const GeneralizationTree& t,
                 const EntropyParams& params = {});

/// Per-atom substrings consumed by greedy matching of `p` over `segments`.
/// Segments the pattern does not accept are skipped.
std::vector<SlotStats> slot_stats(const Pattern& p, const std::vector<std::string>& segments);

/// Specializes each atom while every segment stays accepted: class atoms
/// descend to the child class covering all their substrings when that
/// lowers the cost, low-cardinality slots become enums, and fixed-width
/// slots are pinned. Runs to a fixed point.
Pattern greedy_travel(const Pattern& p, const std::vector<std::string>& segments, const GeneralizationTree& t,
                      const EntropyParams& params = {});

/// Strings each Base node matched, keyed by Base pre-order ordinal. Only
/// accepted values contribute.
std::vector<std::vector<std::string>> base_segments(const Skeleton& k, const std::vector<std::string>& values);

/// Applies greedy_travel to every Base inside each skeleton. A Base
/// refinement that would lose an accepted training value is not applied.
/// Skeletons accepting no value are dropped and reported in `warnings`.
std::vector<Skeleton> refine_patterns(const std::vector<Skeleton>& skeletons, const std::vector<std::string>& values,
                                      const GeneralizationTree& t, const EntropyParams& params = {},
                                      std::vector<std::string>* warnings = nullptr);

}  // namespace patval
