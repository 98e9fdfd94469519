#include "patval/pattern.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace patval {

Repetition Repetition::exactly(std::size_t n) {
  if (n == 0) throw std::invalid_argument("repetition count must be >= 1");
  return {Kind::Exactly, n, n};
}

Repetition Repetition::range(std::size_t lo, std::size_t hi) {
  if (lo == 0 || lo > hi) throw std::invalid_argument("repetition range needs 1 <= lo <= hi");
  if (lo == hi) return exactly(lo);
  return {Kind::Range, lo, hi};
}

bool Repetition::admits(std::size_t n) const {
  if (kind == Kind::OneOrMore) return n >= 1;
  return n >= lo && n <= hi;
}

CountSpec CountSpec::exactly(std::size_t n) {
  if (n == 0) throw std::invalid_argument("count must be >= 1");
  return {Kind::Exactly, n, n};
}

CountSpec CountSpec::range(std::size_t lo, std::size_t hi) {
  if (lo == 0 || lo > hi) throw std::invalid_argument("count range needs 1 <= lo <= hi");
  if (lo == hi) return exactly(lo);
  return {Kind::Range, lo, hi};
}

bool CountSpec::admits(std::size_t n) const {
  if (kind == Kind::Any) return n >= 1;
  return n >= lo && n <= hi;
}

AtomPattern make_literal(std::string text) {
  if (text.empty()) throw std::invalid_argument("literal atom must be non-empty");
  return LiteralAtom{std::move(text)};
}

AtomPattern make_class(const GeneralizationTree& tree, NodeId node, Repetition rep) {
  if (!tree.contains(node)) throw std::invalid_argument("class node not in tree");
  const ClassNode& n = tree.node(node);
  return ClassAtom{node, rep, n.chars, n.label, n.is_leaf()};
}

AtomPattern make_enum(std::vector<std::string> members) {
  if (members.empty()) throw std::invalid_argument("enum atom needs at least one member");
  for (const auto& m : members) {
    if (m.empty()) throw std::invalid_argument("enum members must be non-empty");
  }
  std::sort(members.begin(), members.end(), [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return EnumAtom{std::move(members)};
}

CharSet atom_charset(const AtomPattern& atom) {
  CharSet out;
  if (const auto* c = std::get_if<ClassAtom>(&atom)) return c->chars;
  auto add = [&](std::string_view s) {
    for (char ch : s) out.set(static_cast<unsigned char>(ch));
  };
  if (const auto* l = std::get_if<LiteralAtom>(&atom)) add(l->text);
  if (const auto* e = std::get_if<EnumAtom>(&atom)) {
    for (const auto& m : e->members) add(m);
  }
  return out;
}

std::size_t atom_min_length(const AtomPattern& atom) {
  if (const auto* c = std::get_if<ClassAtom>(&atom)) return c->rep.min_len();
  if (const auto* l = std::get_if<LiteralAtom>(&atom)) return l->text.size();
  const auto& members = std::get<EnumAtom>(atom).members;
  return members.empty() ? 0 : members.back().size();
}

Skeleton make_base(Pattern p) { return Skeleton{BaseNode{std::move(p)}}; }
Skeleton make_delimiter(std::string text) { return Skeleton{DelimiterNode{std::move(text)}}; }
Skeleton make_align(std::vector<Skeleton> children) { return Skeleton{AlignNode{std::move(children)}}; }
Skeleton make_recursive(Skeleton body, std::string sep, CountSpec count) {
  return Skeleton{RecursiveNode{Box<Skeleton>(std::move(body)), std::move(sep), count}};
}

namespace {

void check_atom(const AtomPattern& a) {
  if (const auto* l = std::get_if<LiteralAtom>(&a)) {
    if (l->text.empty()) throw std::invalid_argument("empty literal atom");
  } else if (const auto* e = std::get_if<EnumAtom>(&a)) {
    if (e->members.empty()) throw std::invalid_argument("empty enum atom");
    for (const auto& m : e->members) {
      if (m.empty()) throw std::invalid_argument("empty enum member");
    }
  } else {
    const auto& c = std::get<ClassAtom>(a);
    if (c.chars.none()) throw std::invalid_argument("class atom with empty charset");
    if (c.rep.kind != Repetition::Kind::OneOrMore && (c.rep.lo == 0 || c.rep.lo > c.rep.hi)) {
      throw std::invalid_argument("bad repetition bounds");
    }
  }
}

void check_node(const Skeleton& k, bool in_align, std::size_t depth, std::size_t max_depth) {
  if (depth > max_depth) throw std::invalid_argument("skeleton nesting too deep");
  if (const auto* b = std::get_if<BaseNode>(&k.node)) {
    for (const auto& a : b->pattern.atoms) check_atom(a);
  } else if (const auto* d = std::get_if<DelimiterNode>(&k.node)) {
    if (!in_align) throw std::invalid_argument("delimiter outside Align");
    if (d->text.empty()) throw std::invalid_argument("empty delimiter");
  } else if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    if (a->children.size() < 2) throw std::invalid_argument("Align needs at least two children");
    for (const auto& c : a->children) check_node(c, true, depth + 1, max_depth);
  } else {
    const auto& r = std::get<RecursiveNode>(k.node);
    if (r.sep.empty()) throw std::invalid_argument("Recursive separator must be non-empty");
    if (r.count.kind != CountSpec::Kind::Any && (r.count.lo == 0 || r.count.lo > r.count.hi)) {
      throw std::invalid_argument("bad Recursive count");
    }
    check_node(*r.body, false, depth + 1, max_depth);
  }
}

}  // namespace

void check_skeleton(const Skeleton& k, std::size_t max_depth) { check_node(k, false, 0, max_depth); }

std::size_t skeleton_depth(const Skeleton& k) {
  if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    std::size_t d = 0;
    for (const auto& c : a->children) d = std::max(d, skeleton_depth(c));
    return d + 1;
  }
  if (const auto* r = std::get_if<RecursiveNode>(&k.node)) return skeleton_depth(*r->body) + 1;
  return 0;
}

namespace {

void flatten_into(const Skeleton& k, std::vector<ElementRef>& out, std::size_t& bases, std::size_t& recs) {
  if (const auto* b = std::get_if<BaseNode>(&k.node)) {
    const std::size_t owner = bases++;
    for (std::size_t i = 0; i < b->pattern.atoms.size(); ++i) {
      out.push_back({ElementRef::Kind::Atom, owner, i, &b->pattern.atoms[i], {}});
    }
  } else if (const auto* d = std::get_if<DelimiterNode>(&k.node)) {
    out.push_back({ElementRef::Kind::Delimiter, 0, 0, nullptr, d->text});
  } else if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    for (const auto& c : a->children) flatten_into(c, out, bases, recs);
  } else {
    const auto& r = std::get<RecursiveNode>(k.node);
    const std::size_t owner = recs++;
    flatten_into(*r.body, out, bases, recs);
    out.push_back({ElementRef::Kind::Separator, owner, 0, nullptr, r.sep});
  }
}

}  // namespace

std::vector<ElementRef> flatten_elements(const Skeleton& k) {
  std::vector<ElementRef> out;
  std::size_t bases = 0, recs = 0;
  flatten_into(k, out, bases, recs);
  return out;
}

std::size_t atom_match(const AtomPattern& a, std::string_view s) {
  if (const auto* c = std::get_if<ClassAtom>(&a)) {
    const std::size_t cap = c->rep.max_len().value_or(s.size());
    std::size_t run = 0;
    while (run < s.size() && run < cap && c->chars.test(static_cast<unsigned char>(s[run]))) ++run;
    return run >= c->rep.min_len() ? run : 0;
  }
  if (const auto* l = std::get_if<LiteralAtom>(&a)) {
    return s.substr(0, l->text.size()) == l->text ? l->text.size() : 0;
  }
  for (const auto& m : std::get<EnumAtom>(a).members) {
    if (s.substr(0, m.size()) == m) return m.size();
  }
  return 0;
}

namespace {

struct Index {
  std::size_t elem = 0;
  std::size_t base = 0;
  std::size_t rec = 0;
};

Index node_counts(const Skeleton& k) {
  if (const auto* b = std::get_if<BaseNode>(&k.node)) return {b->pattern.atoms.size(), 1, 0};
  if (std::holds_alternative<DelimiterNode>(k.node)) return {1, 0, 0};
  if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    Index sum;
    for (const auto& c : a->children) {
      Index ci = node_counts(c);
      sum.elem += ci.elem;
      sum.base += ci.base;
      sum.rec += ci.rec;
    }
    return sum;
  }
  const auto& r = std::get<RecursiveNode>(k.node);
  Index bi = node_counts(*r.body);
  return {bi.elem + 1, bi.base, bi.rec + 1};
}

Index advance(Index i, const Index& by) {
  i.elem += by.elem;
  i.base += by.base;
  i.rec += by.rec;
  return i;
}

struct Outcome {
  bool ok = false;
  std::size_t end = 0;  // absolute position after the match
  std::optional<std::size_t> fail_elem;
  std::size_t fail_offset = 0;
  std::string reason;
};

Outcome fail_at(std::optional<std::size_t> elem, std::size_t offset, std::string reason) {
  Outcome o;
  o.fail_elem = elem;
  o.fail_offset = offset;
  o.reason = std::move(reason);
  return o;
}

Outcome success(std::size_t end) {
  Outcome o;
  o.ok = true;
  o.end = end;
  return o;
}

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string describe_atom(const AtomPattern& a) {
  if (const auto* c = std::get_if<ClassAtom>(&a)) return "<" + c->label + ">";
  if (const auto* l = std::get_if<LiteralAtom>(&a)) return quote(l->text);
  std::string out = "one of {";
  const auto& m = std::get<EnumAtom>(a).members;
  for (std::size_t i = 0; i < m.size(); ++i) out += (i ? "," : "") + quote(m[i]);
  return out + "}";
}

class Matcher {
 public:
  Matcher(std::string_view s, std::vector<ElementSpan>* trace, StructuralMatch* lenient)
      : s_(s), trace_(trace), lenient_(lenient) {}

  Outcome match(const Skeleton& k, std::size_t begin, std::size_t end, bool full, Index idx) {
    if (const auto* b = std::get_if<BaseNode>(&k.node)) return match_base(b->pattern, begin, end, full, idx);
    if (const auto* d = std::get_if<DelimiterNode>(&k.node)) {
      if (!starts_with(begin, end, d->text)) return fail_at(idx.elem, begin, "expected " + quote(d->text));
      span(idx.elem, begin, begin + d->text.size());
      if (full && begin + d->text.size() != end) {
        return fail_at(std::nullopt, begin + d->text.size(), "unexpected trailing input");
      }
      return success(begin + d->text.size());
    }
    if (const auto* a = std::get_if<AlignNode>(&k.node)) return match_align(*a, begin, end, full, idx);
    const auto& r = std::get<RecursiveNode>(k.node);
    return full ? match_recursive_full(r, begin, end, idx) : match_recursive_prefix(r, begin, end, idx);
  }

 private:
  struct Checkpoint {
    std::size_t trace = 0;
    std::size_t regions = 0;
    std::size_t counts = 0;
  };

  Checkpoint checkpoint() const {
    return {trace_ ? trace_->size() : 0, lenient_ ? lenient_->regions.size() : 0,
            lenient_ ? lenient_->count_violations.size() : 0};
  }

  void restore(const Checkpoint& c) {
    if (trace_) trace_->resize(c.trace);
    if (lenient_) {
      lenient_->regions.resize(c.regions);
      lenient_->count_violations.resize(c.counts);
    }
  }

  void span(std::size_t elem, std::size_t b, std::size_t e) {
    if (trace_) trace_->push_back({elem, b, e});
  }

  bool starts_with(std::size_t pos, std::size_t end, std::string_view lit) const {
    return end - pos >= lit.size() && s_.substr(pos, lit.size()) == lit;
  }

  Outcome match_base(const Pattern& p, std::size_t begin, std::size_t end, bool full, Index idx) {
    if (lenient_ && full) {
      if (begin == end && !p.atoms.empty()) return fail_at(idx.elem, begin, "empty field");
      lenient_->regions.push_back({idx.base, begin, end});
      return success(end);
    }
    std::size_t pos = begin;
    const std::string_view region = s_.substr(0, end);
    for (std::size_t i = 0; i < p.atoms.size(); ++i) {
      std::size_t n = atom_match(p.atoms[i], region.substr(pos));
      if (n == 0) return fail_at(idx.elem + i, pos, "expected " + describe_atom(p.atoms[i]));
      span(idx.elem + i, pos, pos + n);
      pos += n;
    }
    if (full && pos != end) return fail_at(std::nullopt, pos, "unexpected trailing input");
    return success(pos);
  }

  Outcome match_align(const AlignNode& a, std::size_t begin, std::size_t end, bool full, Index idx) {
    std::size_t pos = begin;
    Index ci = idx;
    const std::size_t n = a.children.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Skeleton& child = a.children[i];
      const bool last = i + 1 == n;
      Outcome r;
      const auto* next_delim = last ? nullptr : std::get_if<DelimiterNode>(&a.children[i + 1].node);
      if (std::holds_alternative<DelimiterNode>(child.node)) {
        r = match(child, pos, end, last && full, ci);
      } else if (next_delim) {
        const std::size_t found = s_.substr(0, end).find(next_delim->text, pos);
        if (found == std::string_view::npos) {
          // Report how far the field itself gets before the missing delimiter.
          Checkpoint cp = checkpoint();
          Outcome probe = match(child, pos, end, false, ci);
          restore(cp);
          if (!probe.ok) return probe;
          return fail_at(advance(ci, node_counts(child)).elem, probe.end,
                         "expected " + quote(next_delim->text));
        }
        r = match(child, pos, found, true, ci);
      } else {
        r = match(child, pos, end, last && full, ci);
      }
      if (!r.ok) return r;
      pos = r.end;
      ci = advance(ci, node_counts(child));
    }
    if (full && pos != end) return fail_at(std::nullopt, pos, "unexpected trailing input");
    return success(pos);
  }

  std::string count_text(const CountSpec& c) const {
    if (c.kind == CountSpec::Kind::Exactly) return "exactly " + std::to_string(c.lo);
    return std::to_string(c.lo) + " to " + std::to_string(c.hi);
  }

  Outcome match_recursive_full(const RecursiveNode& r, std::size_t begin, std::size_t end, Index idx) {
    const Index body_counts = node_counts(*r.body);
    const std::size_t sep_elem = idx.elem + body_counts.elem;
    const Index body_idx{idx.elem, idx.base, idx.rec + 1};
    const std::string_view region = s_.substr(0, end);
    std::vector<std::size_t> sep_positions;
    std::size_t seg_begin = begin;
    std::size_t segments = 0;
    while (true) {
      std::size_t found = region.find(r.sep, seg_begin);
      std::size_t seg_end = found == std::string_view::npos ? end : found;
      if (seg_end == seg_begin) return fail_at(body_idx.elem, seg_begin, "empty segment");
      Outcome o = match(*r.body, seg_begin, seg_end, true, body_idx);
      if (!o.ok) return o;
      ++segments;
      if (found == std::string_view::npos) break;
      span(sep_elem, found, found + r.sep.size());
      sep_positions.push_back(found);
      seg_begin = found + r.sep.size();
    }
    if (!r.count.admits(segments)) {
      if (lenient_) {
        lenient_->count_violations.push_back({idx.rec, segments});
      } else {
        std::size_t offset = end;
        if (r.count.kind != CountSpec::Kind::Any && segments > r.count.hi) offset = sep_positions[r.count.hi - 1];
        return fail_at(sep_elem, offset,
                       std::to_string(segments) + " segments, expected " + count_text(r.count));
      }
    }
    return success(end);
  }

  Outcome match_recursive_prefix(const RecursiveNode& r, std::size_t begin, std::size_t end, Index idx) {
    const Index body_counts = node_counts(*r.body);
    const std::size_t sep_elem = idx.elem + body_counts.elem;
    const Index body_idx{idx.elem, idx.base, idx.rec + 1};
    const std::size_t cap = r.count.kind == CountSpec::Kind::Any ? SIZE_MAX : r.count.hi;
    std::size_t pos = begin;
    std::size_t segments = 0;
    while (true) {
      Checkpoint cp = checkpoint();
      std::size_t seg_begin = pos;
      if (segments > 0) {
        span(sep_elem, pos, pos + r.sep.size());
        seg_begin = pos + r.sep.size();
      }
      Outcome o = match(*r.body, seg_begin, end, false, body_idx);
      if (!o.ok || o.end == seg_begin) {
        if (segments == 0) return o.ok ? fail_at(body_idx.elem, seg_begin, "empty segment") : o;
        restore(cp);
        break;
      }
      pos = o.end;
      ++segments;
      if (segments == cap) break;
      if (!starts_with(pos, end, r.sep)) break;
    }
    if (!r.count.admits(segments)) {
      if (lenient_) {
        lenient_->count_violations.push_back({idx.rec, segments});
      } else {
        return fail_at(sep_elem, pos, std::to_string(segments) + " segments, expected " + count_text(r.count));
      }
    }
    return success(pos);
  }

  std::string_view s_;
  std::vector<ElementSpan>* trace_;
  StructuralMatch* lenient_;
};

}  // namespace

MatchResult pattern_match(const Pattern& p, std::string_view s) {
  MatchResult out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    std::size_t n = atom_match(p.atoms[i], s.substr(pos));
    if (n == 0) {
      out.matched_len = pos;
      out.fail_atom_index = i;
      out.fail_offset = pos;
      out.reason = "expected " + describe_atom(p.atoms[i]);
      return out;
    }
    pos += n;
  }
  out.matched_len = pos;
  if (pos == s.size()) {
    out.accepted = true;
  } else {
    out.fail_offset = pos;
    out.reason = "unexpected trailing input";
  }
  return out;
}

MatchResult skeleton_match(const Skeleton& k, std::string_view s, std::vector<ElementSpan>* trace) {
  if (trace) trace->clear();
  Matcher m(s, trace, nullptr);
  Outcome o = m.match(k, 0, s.size(), true, Index{});
  MatchResult out;
  if (o.ok) {
    out.accepted = true;
    out.matched_len = s.size();
    return out;
  }
  if (trace) trace->clear();
  out.matched_len = o.fail_offset;
  out.fail_atom_index = o.fail_elem;
  out.fail_offset = o.fail_offset;
  out.reason = std::move(o.reason);
  return out;
}

StructuralMatch decompose_structure(const Skeleton& k, std::string_view s) {
  StructuralMatch out;
  Matcher m(s, nullptr, &out);
  Outcome o = m.match(k, 0, s.size(), true, Index{});
  out.fits = o.ok;
  if (!o.ok) {
    out.regions.clear();
    out.count_violations.clear();
    out.fail_offset = o.fail_offset;
    out.reason = std::move(o.reason);
  }
  return out;
}

}  // namespace patval
