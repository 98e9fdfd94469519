#pragma once

// Randomized refinement cases and the property checks run over them.

#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "generators.hpp"
#include "patval/fine_grained.hpp"
#include "patval/pattern_text.hpp"
#include "patval/sampling.hpp"

namespace patval::testgen {

struct RefineCase {
  Pattern general;
  std::vector<std::string> segments;
};

inline NodeId random_ancestor(std::mt19937_64& rng, const GeneralizationTree& t, NodeId n) {
  while (t.node(n).parent && coin(rng, 0.6)) n = *t.node(n).parent;
  return n;
}

// Segments drawn from a specific hidden pattern, paired with a coarser
// pattern that accepts all of them.
inline RefineCase random_refine_case(std::mt19937_64& rng, const GeneralizationTree& t, std::size_t max_atoms = 3) {
  while (true) {
    Pattern hidden = random_pattern(rng, t, max_atoms);
    Pattern general = hidden;
    for (auto& a : general.atoms) {
      if (auto* c = std::get_if<ClassAtom>(&a)) {
        a = make_class(t, random_ancestor(rng, t, c->node), coin(rng, 0.7) ? Repetition::one_or_more() : c->rep);
      } else if (coin(rng, 0.5)) {
        a = make_class(t, random_ancestor(rng, t, t.root()), Repetition::one_or_more());
      }
    }
    RefineCase out{general, {}};
    for (std::size_t i = uniform(rng, 1, 12); i > 0; --i) {
      std::string s;
      for (const auto& a : hidden.atoms) s += sample_atom(a, t, rng);
      if (pattern_match(general, s).accepted) out.segments.push_back(s);
    }
    if (!out.segments.empty()) return out;
  }
}

inline double total_cost(const Pattern& p, const std::vector<std::string>& segments, const GeneralizationTree& t,
                         const EntropyParams& params) {
  const auto stats = slot_stats(p, segments);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    if (!stats[i].substrings.empty()) sum += atom_cost(p.atoms[i], stats[i], t, params);
  }
  return sum;
}

inline std::optional<std::string> coverage_violation(const RefineCase& c, const Pattern& refined) {
  for (const auto& s : c.segments) {
    if (!pattern_match(refined, s).accepted) return "refined " + serialize_pattern(refined) + " rejects " + s;
  }
  return std::nullopt;
}

inline std::optional<std::string> cost_violation(const RefineCase& c, const Pattern& refined,
                                                 const GeneralizationTree& t, const EntropyParams& params) {
  const double before = total_cost(c.general, c.segments, t, params);
  const double after = total_cost(refined, c.segments, t, params);
  if (after > before + 1e-9) {
    return serialize_pattern(c.general) + " -> " + serialize_pattern(refined) + " raised cost " +
           std::to_string(before) + " -> " + std::to_string(after);
  }
  return std::nullopt;
}

inline std::optional<std::string> idempotence_violation(const RefineCase& c, const Pattern& refined,
                                                        const GeneralizationTree& t, const EntropyParams& params) {
  Pattern again = greedy_travel(refined, c.segments, t, params);
  if (!(again == refined)) return serialize_pattern(refined) + " -> " + serialize_pattern(again);
  return std::nullopt;
}

inline std::optional<std::string> soundness_violation(const RefineCase& c, const Pattern& refined) {
  if (refined.atoms.size() != c.general.atoms.size()) return "atom count changed";
  for (std::size_t i = 0; i < refined.atoms.size(); ++i) {
    const CharSet before = atom_charset(c.general.atoms[i]);
    const CharSet after = atom_charset(refined.atoms[i]);
    if ((after & before) != after) {
      return "atom " + std::to_string(i) + " widened: " + serialize_atom(c.general.atoms[i]) + " -> " +
             serialize_atom(refined.atoms[i]);
    }
  }
  return std::nullopt;
}

// Lowest total cost over every per-atom class assignment that keeps all
// segments accepted. Repetitions and non-class atoms are left as they are.
inline double exhaustive_min_cost(const Pattern& p, const std::vector<std::string>& segments,
                                  const GeneralizationTree& t, const EntropyParams& params) {
  std::vector<std::size_t> class_slots;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    if (std::holds_alternative<ClassAtom>(p.atoms[i])) class_slots.push_back(i);
  }
  double best = total_cost(p, segments, t, params);
  std::vector<std::size_t> choice(class_slots.size(), 0);
  while (true) {
    Pattern trial = p;
    for (std::size_t k = 0; k < class_slots.size(); ++k) {
      const auto& orig = std::get<ClassAtom>(p.atoms[class_slots[k]]);
      trial.atoms[class_slots[k]] = make_class(t, NodeId{static_cast<int>(choice[k])}, orig.rep);
    }
    if (std::all_of(segments.begin(), segments.end(), [&](const auto& s) { return pattern_match(trial, s).accepted; })) {
      best = std::min(best, total_cost(trial, segments, t, params));
    }
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == t.size()) choice[k++] = 0;
    if (k == choice.size()) break;
  }
  return best;
}

}  // namespace patval::testgen
