#pragma once

// Hand-rolled random generators shared by the property tests.

#include <random>
#include <string>
#include <vector>

#include "patval/pattern.hpp"

namespace patval::testgen {

inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::string random_from(std::mt19937_64& rng, std::string_view pool, std::size_t lo, std::size_t hi) {
  std::string s(uniform(rng, lo, hi), ' ');
  for (char& c : s) c = pool[uniform(rng, 0, pool.size() - 1)];
  return s;
}

inline const std::vector<std::string>& class_labels() {
  static const std::vector<std::string> labels = {"ANY", "ALNUM", "ALPHA", "UPPER", "LOWER", "DIGIT", "PUNCT", "SPACE"};
  return labels;
}

inline Repetition random_rep(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 2)) {
    case 0: return Repetition::one_or_more();
    case 1: return Repetition::exactly(uniform(rng, 1, 4));
    default: {
      std::size_t lo = uniform(rng, 1, 3);
      return Repetition::range(lo, lo + uniform(rng, 1, 3));
    }
  }
}

inline AtomPattern random_atom(std::mt19937_64& rng, const GeneralizationTree& t) {
  switch (uniform(rng, 0, 3)) {
    case 0: return make_literal(random_from(rng, "abcXYZ09-:#", 1, 3));
    case 1: {
      std::vector<std::string> members;
      for (std::size_t i = uniform(rng, 1, 3); i > 0; --i) members.push_back(random_from(rng, "ABCDEF", 1, 4));
      return make_enum(members);
    }
    case 2: {
      char c = "aQ7-_ "[uniform(rng, 0, 5)];
      return make_class(t, t.map_char(static_cast<unsigned char>(c)), random_rep(rng));
    }
    default: {
      const auto& labels = class_labels();
      return make_class(t, *t.find_label(labels[uniform(rng, 0, labels.size() - 1)]), random_rep(rng));
    }
  }
}

inline Pattern random_pattern(std::mt19937_64& rng, const GeneralizationTree& t, std::size_t max_atoms = 3) {
  Pattern p;
  for (std::size_t i = uniform(rng, 1, max_atoms); i > 0; --i) p.atoms.push_back(random_atom(rng, t));
  return p;
}

inline Skeleton random_skeleton(std::mt19937_64& rng, const GeneralizationTree& t, std::size_t depth) {
  if (depth == 0 || coin(rng, 0.35)) return make_base(random_pattern(rng, t));
  if (coin(rng)) {
    std::vector<Skeleton> children;
    const std::size_t fields = uniform(rng, 1, 3);
    if (coin(rng, 0.2)) children.push_back(make_delimiter(random_from(rng, ":#", 1, 2)));
    for (std::size_t i = 0; i < fields; ++i) {
      if (i) children.push_back(make_delimiter(random_from(rng, ",;|/=", 1, 2)));
      children.push_back(random_skeleton(rng, t, depth - 1));
    }
    if (children.size() < 2) children.push_back(make_delimiter("!"));
    return make_align(std::move(children));
  }
  CountSpec count = CountSpec::any();
  if (coin(rng, 0.3)) count = CountSpec::exactly(uniform(rng, 1, 3));
  if (coin(rng, 0.2)) count = CountSpec::range(1, uniform(rng, 2, 4));
  return make_recursive(random_skeleton(rng, t, depth - 1), random_from(rng, ";&+", 1, 2), count);
}

// 1 to `max_values` strings of at most `max_len` characters: fields joined by
// a few delimiters, or free text over a small alphabet.
inline std::vector<std::string> small_value_set(std::mt19937_64& rng, std::size_t max_values = 5,
                                                std::size_t max_len = 12) {
  const std::size_t n = uniform(rng, 1, max_values);
  std::vector<std::string> out;
  if (coin(rng, 0.3)) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(random_from(rng, "ab9Z,;- ", 0, max_len));
    return out;
  }
  static const std::vector<std::string> pools = {"abcxyz", "0123456789", "ABCQ", "aB3"};
  const std::string delims = random_from(rng, ",;-: ", 1, 2);
  const std::size_t fields = uniform(rng, 1, 4);
  std::vector<std::size_t> kinds(fields + 1);
  for (auto& k : kinds) k = uniform(rng, 0, pools.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::string v;
    const std::size_t count = coin(rng, 0.2) ? uniform(rng, 1, fields + 1) : fields;
    for (std::size_t f = 0; f < count; ++f) {
      if (f) v += delims[uniform(rng, 0, delims.size() - 1)];
      v += random_from(rng, pools[kinds[f]], 1, 3);
    }
    out.push_back(v.substr(0, max_len));
  }
  return out;
}

}  // namespace patval::testgen
