#include "patval/lifecycle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "patval/pattern_text.hpp"
#include "patval/sampling.hpp"

namespace patval {

namespace {

bool generalizes(const Skeleton& general, const Skeleton& specific, const GeneralizationTree& t,
                 std::size_t samples) {
  std::mt19937_64 rng(0x5eed);
  for (std::size_t i = 0; i < samples; ++i) {
    std::string s;
    try {
      s = sample_string(specific, t, rng);
    } catch (const SampleError&) {
      return false;
    }
    if (!skeleton_match(general, s).accepted) return false;
  }
  return true;
}

}  // namespace

LearnedPatterns learn_patterns(const std::vector<std::string>& values, const GeneralizationTree& t,
                               const LearnConfig& config) {
  LearnedPatterns out;
  auto cands = extract_skeleton(values, config.extract.depth, t, config.extract);
  const std::size_t n = cands.size();
  out.ranking = score_skeletons(std::move(cands), values, n);
  for (const auto& c : out.ranking) {
    if (out.unrefined.size() >= config.extract.top_k) break;
    if (c.coverage == 0.0 && !values.empty()) {
      out.warnings.push_back("dropped skeleton accepting no training value: " + serialize_skeleton(c.skeleton));
      continue;
    }
    if (config.prune_generalizations) {
      auto better = std::find_if(out.unrefined.begin(), out.unrefined.end(), [&](const Skeleton& k) {
        return generalizes(c.skeleton, k, t, config.prune_samples);
      });
      if (better != out.unrefined.end()) continue;
    }
    out.unrefined.push_back(c.skeleton);
  }
  out.refined = config.refine ? refine_patterns(out.unrefined, values, t, config.entropy, &out.warnings)
                              : out.unrefined;
  return out;
}

ValidationReport validate_batch(const std::vector<Skeleton>& patterns, const std::vector<std::string>& batch) {
  if (patterns.empty()) throw ConfigError("validate_batch: no patterns to validate against");
  ValidationReport report;
  for (const auto& v : batch) {
    ValidationEntry e;
    e.value = v;
    std::optional<MatchResult> deepest;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      MatchResult r = skeleton_match(patterns[i], v);
      if (r.accepted) {
        e.pass = true;
        e.best_pattern = i;
        break;
      }
      if (!deepest || r.matched_len > deepest->matched_len) {
        deepest = r;
        e.best_pattern = i;
      }
    }
    if (!e.pass) {
      e.fail_offset = deepest->fail_offset;
      e.fail_atom_index = deepest->fail_atom_index;
      e.reason = deepest->reason;
    }
    (e.pass ? report.passed : report.failed)++;
    report.entries.push_back(std::move(e));
  }
  return report;
}

const char* to_string(UpdateStatus s) {
  switch (s) {
    case UpdateStatus::NoOp: return "no-op";
    case UpdateStatus::Updated: return "updated";
    case UpdateStatus::CountWidened: return "count-widened";
    case UpdateStatus::NeedsRelearn: return "needs-relearn";
  }
  return "unknown";
}

namespace {

CharSet first_chars(const AtomPattern& a) {
  CharSet out;
  if (const auto* c = std::get_if<ClassAtom>(&a)) return c->chars;
  if (const auto* l = std::get_if<LiteralAtom>(&a)) {
    out.set(static_cast<unsigned char>(l->text[0]));
    return out;
  }
  for (const auto& m : std::get<EnumAtom>(a).members) out.set(static_cast<unsigned char>(m[0]));
  return out;
}

std::vector<std::string> members_of(const AtomPattern& a) {
  if (const auto* l = std::get_if<LiteralAtom>(&a)) return {l->text};
  if (const auto* e = std::get_if<EnumAtom>(&a)) return e->members;
  return {};
}

bool is_subset(const CharSet& a, const CharSet& b) { return (a & b) == a; }

// Offsets where each matched atom starts; stops at the first failure.
std::vector<std::size_t> atom_starts(const Pattern& p, std::string_view s) {
  std::vector<std::size_t> starts;
  std::size_t pos = 0;
  for (const auto& a : p.atoms) {
    std::size_t n = atom_match(a, s.substr(pos));
    if (n == 0) break;
    starts.push_back(pos);
    pos += n;
  }
  return starts;
}

Repetition widen_rep(const Repetition& r, std::size_t lo, std::optional<std::size_t> hi) {
  if (r.kind == Repetition::Kind::OneOrMore) return r;
  std::size_t new_lo = std::min(r.lo, lo);
  if (!hi) return Repetition::one_or_more();
  return Repetition::range(new_lo, std::max(r.hi, *hi));
}

}  // namespace

bool widening_is_safe(const Pattern& before, const Pattern& after) {
  if (before.atoms.size() != after.atoms.size()) return false;
  const std::size_t n = before.atoms.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = before.atoms[i];
    const auto& b = after.atoms[i];
    if (a == b) continue;
    CharSet follow;
    if (i + 1 < n) follow = first_chars(before.atoms[i + 1]);

    if (const auto* ca = std::get_if<ClassAtom>(&a)) {
      const auto* cb = std::get_if<ClassAtom>(&b);
      if (!cb || !is_subset(ca->chars, cb->chars)) return false;
      const auto ahi = ca->rep.max_len();
      const auto bhi = cb->rep.max_len();
      if (cb->rep.min_len() > ca->rep.min_len()) return false;
      if (ahi && bhi && *bhi < *ahi) return false;
      if (!ahi && bhi) return false;
      const bool hi_grew = (ahi && !bhi) || (ahi && bhi && *bhi > *ahi);
      if (ca->rep.kind == Repetition::Kind::Exactly && !hi_grew) continue;
      if ((cb->chars & ~ca->chars & follow).any()) return false;
      if (hi_grew && (ca->chars & follow).any()) return false;
      continue;
    }
    if (std::holds_alternative<ClassAtom>(b)) return false;
    const auto old_members = members_of(a);
    const auto new_members = members_of(b);
    for (const auto& m : old_members) {
      if (std::find(new_members.begin(), new_members.end(), m) == new_members.end()) return false;
    }
    for (const auto& m : new_members) {
      if (std::find(old_members.begin(), old_members.end(), m) != old_members.end()) continue;
      for (const auto& x : old_members) {
        if (m.size() > x.size() && m.compare(0, x.size(), x) == 0 && follow.test(static_cast<unsigned char>(m[x.size()]))) {
          return false;
        }
      }
    }
  }
  return true;
}

std::optional<Pattern> generalize_pattern(const Pattern& p, std::string_view s, const GeneralizationTree& t) {
  if (p.atoms.empty()) return s.empty() ? std::optional<Pattern>(p) : std::nullopt;
  Pattern cur = p;
  const std::size_t max_steps = 4 * s.size() + 16;
  for (std::size_t step = 0; step < max_steps; ++step) {
    MatchResult r = pattern_match(cur, s);
    if (r.accepted) return widening_is_safe(p, cur) ? std::optional<Pattern>(cur) : std::nullopt;
    const auto starts = atom_starts(cur, s);
    const std::size_t offset = *r.fail_offset;
    const bool trailing = !r.fail_atom_index;
    const std::size_t i = trailing ? cur.atoms.size() - 1 : *r.fail_atom_index;
    AtomPattern& atom = cur.atoms[i];

    if (trailing) {
      // Every atom matched but input remains: the last atom takes the rest.
      const std::size_t start = starts[i];
      const unsigned char c = static_cast<unsigned char>(s[offset]);
      if (auto* ca = std::get_if<ClassAtom>(&atom)) {
        if (ca->chars.test(c)) {
          std::size_t run = 0;
          while (start + run < s.size() && ca->chars.test(static_cast<unsigned char>(s[start + run]))) ++run;
          ca->rep = widen_rep(ca->rep, run, run);
        } else {
          NodeId leaf = t.map_char(c);
          if (leaf == kNotInTree) return std::nullopt;
          atom = make_class(t, *t.nearest_common_ancestor(ca->node, leaf), ca->rep);
        }
      } else {
        auto members = members_of(atom);
        members.emplace_back(s.substr(start));
        atom = make_enum(std::move(members));
      }
      continue;
    }

    if (offset >= s.size()) return std::nullopt;  // input ends before the atoms do
    const unsigned char c = static_cast<unsigned char>(s[offset]);

    if (auto* ca = std::get_if<ClassAtom>(&atom)) {
      if (ca->chars.test(c)) {
        std::size_t run = 0;
        while (offset + run < s.size() && ca->chars.test(static_cast<unsigned char>(s[offset + run]))) ++run;
        if (ca->rep.kind == Repetition::Kind::OneOrMore || run >= ca->rep.lo) return std::nullopt;
        ca->rep = widen_rep(ca->rep, run, ca->rep.hi);
        continue;
      }
      NodeId leaf = t.map_char(c);
      if (leaf == kNotInTree) return std::nullopt;
      atom = make_class(t, *t.nearest_common_ancestor(ca->node, leaf), ca->rep);
      continue;
    }

    // Literal or enum at `i` failed; the previous class atom may have stopped short.
    if (i > 0) {
      if (auto* prev = std::get_if<ClassAtom>(&cur.atoms[i - 1])) {
        if (prev->chars.test(c)) {
          if (prev->rep.kind == Repetition::Kind::OneOrMore) return std::nullopt;
          prev->rep = widen_rep(prev->rep, prev->rep.lo, prev->rep.hi + 1);
          continue;
        }
        NodeId leaf = t.map_char(c);
        if (leaf == kNotInTree) return std::nullopt;
        if (!first_chars(atom).test(c)) {
          Pattern trial = cur;
          std::get<ClassAtom>(trial.atoms[i - 1]) =
              std::get<ClassAtom>(make_class(t, *t.nearest_common_ancestor(prev->node, leaf), prev->rep));
          if (widening_is_safe(p, trial)) {
            cur = std::move(trial);
            continue;
          }
        }
      }
    }

    // Add a new member covering the unmatched text.
    const Pattern rest{{cur.atoms.begin() + static_cast<std::ptrdiff_t>(i) + 1, cur.atoms.end()}};
    std::optional<std::size_t> chosen;
    for (std::size_t len = s.size() - offset; len >= 1 && !chosen; --len) {
      if (pattern_match(rest, s.substr(offset + len)).accepted) chosen = len;
    }
    if (!chosen && !rest.atoms.empty()) {
      for (std::size_t len = s.size() - offset; len >= 1 && !chosen; --len) {
        if (offset + len < s.size() && atom_match(rest.atoms[0], s.substr(offset + len)) > 0) chosen = len;
      }
    }
    if (!chosen) return std::nullopt;
    auto members = members_of(atom);
    members.emplace_back(s.substr(offset, *chosen));
    atom = make_enum(std::move(members));
  }
  return std::nullopt;
}

namespace {

CountSpec widen_count(const CountSpec& c, std::size_t observed) {
  if (c.kind == CountSpec::Kind::Any || c.admits(observed)) return c;
  return CountSpec::range(std::min(c.lo, observed), std::max(c.hi, observed));
}

// Attempts to absorb `value` into a copy of `k`.
std::optional<std::pair<Skeleton, UpdateStatus>> absorb(const Skeleton& k, std::string_view value,
                                                        const GeneralizationTree& t) {
  StructuralMatch sm = decompose_structure(k, value);
  if (!sm.fits) return std::nullopt;
  Skeleton out = k;
  bool atoms_changed = false;

  std::map<std::size_t, std::vector<std::string_view>> regions;
  for (const auto& r : sm.regions) regions[r.base].push_back(value.substr(r.begin, r.end - r.begin));
  bool failed = false;
  for_each_base(out, [&](std::size_t ordinal, BaseNode& node) {
    auto it = regions.find(ordinal);
    if (it == regions.end() || failed) return;
    Pattern p = node.pattern;
    for (auto region : it->second) {
      if (pattern_match(p, region).accepted) continue;
      auto widened = generalize_pattern(p, region, t);
      if (!widened) {
        failed = true;
        return;
      }
      p = std::move(*widened);
    }
    if (!(p == node.pattern)) {
      // The whole chain of widenings must still be safe against the original.
      if (!widening_is_safe(node.pattern, p)) {
        failed = true;
        return;
      }
      node.pattern = std::move(p);
      atoms_changed = true;
    }
  });
  if (failed) return std::nullopt;

  bool count_changed = false;
  for (const auto& v : sm.count_violations) {
    for_each_recursive(out, [&](std::size_t ordinal, RecursiveNode& node) {
      if (ordinal != v.recursive) return;
      CountSpec widened = widen_count(node.count, v.observed);
      if (!(widened == node.count)) {
        node.count = widened;
        count_changed = true;
      }
    });
  }
  if (!skeleton_match(out, value).accepted) return std::nullopt;
  UpdateStatus status = atoms_changed ? UpdateStatus::Updated
                                      : (count_changed ? UpdateStatus::CountWidened : UpdateStatus::NoOp);
  return std::make_pair(std::move(out), status);
}

}  // namespace

UpdateResult incremental_update(const std::vector<Skeleton>& patterns, std::string_view value,
                                const GeneralizationTree& t) {
  UpdateResult res;
  res.patterns = patterns;
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (skeleton_match(patterns[i], value).accepted) {
      res.status = UpdateStatus::NoOp;
      res.message = "already accepted by pattern " + std::to_string(i);
      return res;
    }
  }
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    auto absorbed = absorb(patterns[i], value, t);
    if (!absorbed) continue;
    res.patterns[i] = std::move(absorbed->first);
    res.status = absorbed->second;
    res.updated_pattern = i;
    res.message = std::string(to_string(res.status)) + " pattern " + std::to_string(i) + ": " +
                  serialize_skeleton(res.patterns[i]);
    return res;
  }
  res.status = UpdateStatus::NeedsRelearn;
  res.message = "structure of the value does not fit any pattern; relearn required";
  return res;
}

namespace {

struct Variant {
  std::string label;
  std::function<std::optional<std::string>(std::mt19937_64&)> make;
};

std::string random_from_node(const GeneralizationTree& t, NodeId node, std::size_t len, std::mt19937_64& rng) {
  ClassAtom probe = std::get<ClassAtom>(make_class(t, node, Repetition::exactly(std::max<std::size_t>(len, 1))));
  return sample_atom(probe, t, rng);
}

// Replacement generators for an atom that refinement specialized.
std::vector<Variant> boundary_variants(const AtomPattern& before, const AtomPattern& after,
                                       const GeneralizationTree& t, std::string_view original) {
  std::vector<Variant> out;
  const auto* cb = std::get_if<ClassAtom>(&before);
  if (!cb) return out;
  const std::size_t len = original.size();
  if (const auto* ca = std::get_if<ClassAtom>(&after)) {
    // Siblings of each node on the path from the refined class up to (excluding) the original.
    for (NodeId n = ca->node; n != cb->node && t.node(n).parent; n = *t.node(n).parent) {
      NodeId parent = *t.node(n).parent;
      for (NodeId sib : t.node(parent).children) {
        if (sib == n) continue;
        std::string orig(original);
        out.push_back({t.node(sib).label, [&t, sib, orig](std::mt19937_64& rng) -> std::optional<std::string> {
                         std::string s = orig;
                         std::size_t at = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(rng);
                         s[at] = random_from_node(t, sib, 1, rng)[0];
                         return s;
                       }});
      }
      if (parent == cb->node) break;
    }
    if (ca->node == cb->node && ca->rep != cb->rep) {
      std::string orig(original);
      NodeId node = ca->node;
      out.push_back({"width", [&t, node, orig](std::mt19937_64& rng) -> std::optional<std::string> {
                       std::string s = orig;
                       if (s.size() > 1 && std::bernoulli_distribution(0.5)(rng)) {
                         s.pop_back();
                       } else {
                         s += random_from_node(t, node, 1, rng);
                       }
                       return s;
                     }});
    }
  } else if (std::holds_alternative<EnumAtom>(after) || std::holds_alternative<LiteralAtom>(after)) {
    NodeId node = cb->node;
    out.push_back({t.node(node).label, [&t, node, len](std::mt19937_64& rng) -> std::optional<std::string> {
                     std::size_t n = std::max<std::size_t>(1, len + std::uniform_int_distribution<int>(-1, 1)(rng));
                     return random_from_node(t, node, n, rng);
                   }});
  }
  return out;
}

}  // namespace

std::vector<AugmentExample> generate_examples(const Skeleton& before, const Skeleton& after,
                                              const GeneralizationTree& t, std::size_t k, std::uint64_t seed) {
  std::vector<AugmentExample> out;
  if (k == 0) return out;
  const auto eb = flatten_elements(before);
  const auto ea = flatten_elements(after);
  if (eb.size() != ea.size()) return out;
  std::mt19937_64 rng(seed);
  std::set<std::string> seen;
  for (std::size_t e = 0; e < ea.size(); ++e) {
    if (ea[e].kind != ElementRef::Kind::Atom || *ea[e].atom_ptr == *eb[e].atom_ptr) continue;
    std::size_t emitted = 0;
    for (std::size_t attempt = 0; attempt < 40 * k && emitted < k; ++attempt) {
      std::vector<ElementSpan> trace;
      std::string base;
      try {
        base = sample_string(after, t, rng);
      } catch (const SampleError&) {
        break;
      }
      skeleton_match(after, base, &trace);
      auto span = std::find_if(trace.begin(), trace.end(), [&](const ElementSpan& s) { return s.element == e; });
      if (span == trace.end()) continue;
      std::string_view original = std::string_view(base).substr(span->begin, span->end - span->begin);
      auto variants = boundary_variants(*eb[e].atom_ptr, *ea[e].atom_ptr, t, original);
      if (variants.empty()) break;
      const auto& v = variants[std::uniform_int_distribution<std::size_t>(0, variants.size() - 1)(rng)];
      auto replacement = v.make(rng);
      if (!replacement) continue;
      std::string candidate = base.substr(0, span->begin) + *replacement + base.substr(span->end);
      if (seen.count(candidate)) continue;
      if (!skeleton_match(before, candidate).accepted || skeleton_match(after, candidate).accepted) continue;
      seen.insert(candidate);
      out.push_back({candidate, e, v.label, std::nullopt});
      ++emitted;
    }
  }
  return out;
}

namespace {

bool accepts_any(const Skeleton& k, const std::vector<std::string>& values) {
  return std::any_of(values.begin(), values.end(), [&](const auto& v) { return skeleton_match(k, v).accepted; });
}

}  // namespace

FeedbackOutcome apply_feedback(const PatternSet& state, const std::vector<FeedbackRecord>& records,
                               const GeneralizationTree& t) {
  FeedbackOutcome out;
  out.state = state;
  if (records.empty()) return out;

  // Latest record per value wins; stable for equal timestamps.
  std::map<std::string, FeedbackRecord> latest;
  std::map<std::string, std::set<Verdict>> verdicts;
  for (const auto& r : records) {
    verdicts[r.value].insert(r.verdict);
    auto it = latest.find(r.value);
    if (it == latest.end() || r.timestamp >= it->second.timestamp) latest[r.value] = r;
  }
  for (const auto& [value, vs] : verdicts) {
    if (vs.size() > 1) out.warnings.push_back("contradictory feedback for '" + value + "'; keeping the latest");
  }
  std::vector<FeedbackRecord> ordered;
  for (auto& [value, r] : latest) ordered.push_back(r);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  auto& st = out.state;
  for (const auto& r : records) {
    if (std::find(st.feedback.begin(), st.feedback.end(), r) == st.feedback.end()) st.feedback.push_back(r);
  }
  for (const auto& r : ordered) {
    auto neg = std::find(st.negatives.begin(), st.negatives.end(), r.value);
    if (r.verdict == Verdict::ConfirmedError) {
      if (neg == st.negatives.end()) st.negatives.push_back(r.value);
      continue;
    }
    if (neg != st.negatives.end()) st.negatives.erase(neg);
    if (st.patterns.empty()) continue;
    UpdateResult u = incremental_update(st.patterns, r.value, t);
    if (u.status == UpdateStatus::NeedsRelearn) {
      out.needs_relearn.push_back(r.value);
      out.warnings.push_back("'" + r.value + "' needs a relearn: " + u.message);
      continue;
    }
    st.patterns = std::move(u.patterns);
  }
  std::stable_partition(st.patterns.begin(), st.patterns.end(),
                        [&](const Skeleton& k) { return !accepts_any(k, st.negatives); });
  return out;
}

}  // namespace patval
