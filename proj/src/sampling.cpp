#include "patval/sampling.hpp"

namespace patval {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

char random_leaf_char(const GeneralizationTree& tree, NodeId node, std::mt19937_64& rng) {
  while (!tree.node(node).is_leaf()) {
    const auto& kids = tree.node(node).children;
    node = kids[pick(rng, 0, kids.size() - 1)];
  }
  const CharSet& cs = tree.node(node).chars;
  for (std::size_t c = 0; c < 256; ++c) {
    if (cs.test(c)) return static_cast<char>(c);
  }
  return '?';
}

std::size_t run_length(const Repetition& rep, std::mt19937_64& rng, const LengthHints& hints) {
  switch (rep.kind) {
    case Repetition::Kind::Exactly: return rep.lo;
    case Repetition::Kind::Range: return pick(rng, rep.lo, rep.hi);
    case Repetition::Kind::OneOrMore: break;
  }
  if (!hints.lengths.empty()) {
    std::size_t n = hints.lengths[pick(rng, 0, hints.lengths.size() - 1)];
    return n == 0 ? 1 : n;
  }
  return pick(rng, 1, 8);
}

void sample_into(const Skeleton& k, const GeneralizationTree& tree, std::mt19937_64& rng,
                 const LengthHints& hints, std::string& out) {
  if (const auto* b = std::get_if<BaseNode>(&k.node)) {
    for (const auto& a : b->pattern.atoms) out += sample_atom(a, tree, rng, hints);
  } else if (const auto* d = std::get_if<DelimiterNode>(&k.node)) {
    out += d->text;
  } else if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    for (const auto& c : a->children) sample_into(c, tree, rng, hints, out);
  } else {
    const auto& r = std::get<RecursiveNode>(k.node);
    std::size_t n = r.count.kind == CountSpec::Kind::Any ? pick(rng, 1, 4) : pick(rng, r.count.lo, r.count.hi);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) out += r.sep;
      sample_into(*r.body, tree, rng, hints, out);
    }
  }
}

}  // namespace

std::string sample_atom(const AtomPattern& a, const GeneralizationTree& tree, std::mt19937_64& rng,
                        const LengthHints& hints) {
  if (const auto* l = std::get_if<LiteralAtom>(&a)) return l->text;
  if (const auto* e = std::get_if<EnumAtom>(&a)) return e->members[pick(rng, 0, e->members.size() - 1)];
  const auto& c = std::get<ClassAtom>(a);
  std::size_t n = run_length(c.rep, rng, hints);
  std::string out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out += random_leaf_char(tree, c.node, rng);
  return out;
}

std::string sample_string(const Skeleton& k, const GeneralizationTree& tree, std::mt19937_64& rng,
                          const LengthHints& hints, std::size_t max_attempts) {
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    std::string out;
    sample_into(k, tree, rng, hints, out);
    if (skeleton_match(k, out).accepted) return out;
  }
  throw SampleError("no accepted sample after " + std::to_string(max_attempts) + " attempts");
}

std::string sample_string(const Skeleton& k, const GeneralizationTree& tree, std::uint64_t seed,
                          const LengthHints& hints) {
  std::mt19937_64 rng(seed);
  return sample_string(k, tree, rng, hints);
}

}  // namespace patval
