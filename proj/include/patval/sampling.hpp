#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "patval/pattern.hpp"

namespace patval {

/// Observed repetition lengths. Unbounded class atoms draw their run length
/// from this list; when it is empty the length is uniform in [1, 8].
struct LengthHints {
  std::vector<std::size_t> lengths;
};

class SampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Random string for one atom. Class characters come from a uniform random
/// walk down the tree to a leaf.
std::string sample_atom(const AtomPattern& a, const GeneralizationTree& tree, std::mt19937_64& rng,
                        const LengthHints& hints = {});

/// Random string accepted by `k`. Draws are retried until one is accepted
/// (greedy matching can reject some draws); throws SampleError if none is.
std::string sample_string(const Skeleton& k, const GeneralizationTree& tree, std::mt19937_64& rng,
                          const LengthHints& hints = {}, std::size_t max_attempts = 256);
std::string sample_string(const Skeleton& k, const GeneralizationTree& tree, std::uint64_t seed,
                          const LengthHints& hints = {});

}  // namespace patval
