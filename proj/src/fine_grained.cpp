#include "patval/fine_grained.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "patval/pattern_text.hpp"

namespace patval {

SlotStats SlotStats::from(std::size_t atom_index, std::vector<std::string> substrings) {
  SlotStats s;
  s.atom_index = atom_index;
  std::size_t total = 0;
  for (const auto& v : substrings) total += v.size();
  s.mean_len = substrings.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(substrings.size());
  std::vector<std::string> sorted = substrings;
  std::sort(sorted.begin(), sorted.end());
  s.distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
  s.substrings = std::move(substrings);
  return s;
}

double token_entropy(const SlotStats& stats, const EntropyParams& params) {
  std::map<std::string_view, std::size_t> freq;
  for (const auto& v : stats.substrings) ++freq[v];
  const double n = static_cast<double>(stats.substrings.size());
  double h = 0.0;
  for (const auto& [v, c] : freq) {
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h + params.beta;
}

double atom_cost(const AtomPattern& atom, const SlotStats& stats, const GeneralizationTree& t,
                 const EntropyParams& params) {
  double width = 1.0;
  if (const auto* c = std::get_if<ClassAtom>(&atom)) width = static_cast<double>(t.node(c->node).chars.count());
  return stats.mean_len * (token_entropy(stats, params) + params.class_weight * std::log2(width));
}

std::vector<SlotStats> slot_stats(const Pattern& p, const std::vector<std::string>& segments) {
  std::vector<std::vector<std::string>> subs(p.atoms.size());
  std::vector<std::size_t> lens(p.atoms.size());
  for (const auto& seg : segments) {
    std::string_view rest = seg;
    bool ok = true;
    for (std::size_t i = 0; i < p.atoms.size() && ok; ++i) {
      lens[i] = atom_match(p.atoms[i], rest);
      ok = lens[i] > 0;
      rest.remove_prefix(lens[i]);
    }
    if (!ok || !rest.empty()) continue;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < p.atoms.size(); ++i) {
      subs[i].push_back(seg.substr(pos, lens[i]));
      pos += lens[i];
    }
  }
  std::vector<SlotStats> out;
  for (std::size_t i = 0; i < subs.size(); ++i) out.push_back(SlotStats::from(i, std::move(subs[i])));
  return out;
}

namespace {

bool accepts_all(const Pattern& p, const std::vector<std::string>& segments) {
  return std::all_of(segments.begin(), segments.end(), [&](const auto& s) { return pattern_match(p, s).accepted; });
}

// One candidate specialization of atom `i`, or nullopt when none applies.
std::optional<AtomPattern> specialize(const Pattern& p, std::size_t i, const SlotStats& stats,
                                      const GeneralizationTree& t, const EntropyParams& params) {
  const auto* c = std::get_if<ClassAtom>(&p.atoms[i]);
  if (!c || stats.substrings.empty()) return std::nullopt;
  const double cost = atom_cost(p.atoms[i], stats, t, params);

  CharSet used;
  for (const auto& s : stats.substrings) {
    for (char ch : s) used.set(static_cast<unsigned char>(ch));
  }
  for (NodeId child : t.node(c->node).children) {
    if ((t.node(child).chars & used) != used) continue;
    AtomPattern cand = make_class(t, child, c->rep);
    if (atom_cost(cand, stats, t, params) < cost) return cand;
  }

  if (stats.distinct <= params.enum_threshold) {
    std::map<std::string, std::size_t> freq;
    for (const auto& s : stats.substrings) ++freq[s];
    bool supported = std::all_of(freq.begin(), freq.end(),
                                 [&](const auto& kv) { return kv.second >= params.enum_min_support; });
    if (supported) {
      std::vector<std::string> members;
      for (const auto& [m, n] : freq) members.push_back(m);
      AtomPattern cand = make_enum(std::move(members));
      if (atom_cost(cand, stats, t, params) < cost) return cand;
    }
  }

  if (params.pin_fixed_width && stats.substrings.size() >= 2 && c->rep.kind != Repetition::Kind::Exactly) {
    const std::size_t n = stats.substrings[0].size();
    bool fixed = std::all_of(stats.substrings.begin(), stats.substrings.end(),
                             [&](const auto& s) { return s.size() == n; });
    if (fixed) return make_class(t, c->node, Repetition::exactly(n));
  }
  return std::nullopt;
}

}  // namespace

Pattern greedy_travel(const Pattern& p, const std::vector<std::string>& segments, const GeneralizationTree& t,
                      const EntropyParams& params) {
  Pattern cur = p;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < cur.atoms.size(); ++i) {
      // Descend as far as this atom allows before moving on.
      while (true) {
        auto stats = slot_stats(cur, segments);
        auto next = specialize(cur, i, stats[i], t, params);
        if (!next) break;
        Pattern trial = cur;
        trial.atoms[i] = std::move(*next);
        if (!accepts_all(trial, segments)) break;
        cur = std::move(trial);
        changed = true;
      }
    }
  }
  return cur;
}

std::vector<std::vector<std::string>> base_segments(const Skeleton& k, const std::vector<std::string>& values) {
  const auto elems = flatten_elements(k);
  std::size_t bases = 0;
  for (const auto& e : elems) {
    if (e.kind == ElementRef::Kind::Atom) bases = std::max(bases, e.owner + 1);
  }
  std::vector<std::vector<std::string>> out(bases);
  std::vector<ElementSpan> trace;
  for (const auto& v : values) {
    if (!skeleton_match(k, v, &trace).accepted) continue;
    std::optional<std::size_t> owner;
    std::size_t begin = 0, end = 0;
    auto flush = [&] {
      if (owner) out[*owner].push_back(v.substr(begin, end - begin));
      owner.reset();
    };
    for (const auto& s : trace) {
      const auto& e = elems[s.element];
      if (e.kind != ElementRef::Kind::Atom) {
        flush();
        continue;
      }
      if (owner && (*owner != e.owner || e.atom == 0)) flush();
      if (!owner) {
        owner = e.owner;
        begin = s.begin;
      }
      end = s.end;
    }
    flush();
  }
  return out;
}

std::vector<Skeleton> refine_patterns(const std::vector<Skeleton>& skeletons, const std::vector<std::string>& values,
                                      const GeneralizationTree& t, const EntropyParams& params,
                                      std::vector<std::string>* warnings) {
  std::vector<Skeleton> out;
  for (const auto& k : skeletons) {
    std::vector<std::string> accepted;
    for (const auto& v : values) {
      if (skeleton_match(k, v).accepted) accepted.push_back(v);
    }
    if (accepted.empty()) {
      if (warnings) warnings->push_back("dropped skeleton accepting no training value: " + serialize_skeleton(k));
      continue;
    }
    const auto segments = base_segments(k, accepted);
    Skeleton cur = k;
    for (std::size_t b = 0; b < segments.size(); ++b) {
      Skeleton trial = cur;
      for_each_base(trial, [&](std::size_t ordinal, BaseNode& node) {
        if (ordinal == b && !node.pattern.atoms.empty()) node.pattern = greedy_travel(node.pattern, segments[b], t, params);
      });
      if (trial == cur) continue;
      bool keeps = std::all_of(accepted.begin(), accepted.end(),
                               [&](const auto& v) { return skeleton_match(trial, v).accepted; });
      if (keeps) cur = std::move(trial);
    }
    out.push_back(std::move(cur));
  }
  return out;
}

}  // namespace patval
