#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "patval/gentree.hpp"

namespace patval {

/// Heap-allocated value with deep-copy semantics, for recursive variants.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct Repetition {
  enum class Kind { Exactly, OneOrMore, Range };
  Kind kind = Kind::OneOrMore;
  std::size_t lo = 1;
  std::size_t hi = 1;

  static Repetition exactly(std::size_t n);
  static Repetition one_or_more() { return {}; }
  static Repetition range(std::size_t lo, std::size_t hi);

  std::size_t min_len() const { return kind == Kind::OneOrMore ? 1 : lo; }
  std::optional<std::size_t> max_len() const {
    if (kind == Kind::OneOrMore) return std::nullopt;
    return hi;
  }
  bool admits(std::size_t n) const;

  friend bool operator==(const Repetition&, const Repetition&) = default;
};

struct LiteralAtom {
  std::string text;
  friend bool operator==(const LiteralAtom&, const LiteralAtom&) = default;
};

struct ClassAtom {
  NodeId node{0};
  Repetition rep;
  /// Cached from the tree so matching needs no tree lookup.
  CharSet chars;
  std::string label;
  bool leaf = false;

  friend bool operator==(const ClassAtom& a, const ClassAtom& b) {
    return a.node == b.node && a.rep == b.rep && a.chars == b.chars;
  }
};

/// Members are kept unique and sorted longest first, so greedy matching
/// tries the longest alternative before its prefixes.
struct EnumAtom {
  std::vector<std::string> members;
  friend bool operator==(const EnumAtom&, const EnumAtom&) = default;
};

using AtomPattern = std::variant<LiteralAtom, ClassAtom, EnumAtom>;

AtomPattern make_literal(std::string text);
AtomPattern make_class(const GeneralizationTree& tree, NodeId node, Repetition rep = {});
AtomPattern make_enum(std::vector<std::string> members);

/// Characters an atom can consume.
CharSet atom_charset(const AtomPattern& atom);
std::size_t atom_min_length(const AtomPattern& atom);

struct Pattern {
  std::vector<AtomPattern> atoms;
  friend bool operator==(const Pattern&, const Pattern&) = default;
};

struct CountSpec {
  enum class Kind { Any, Exactly, Range };
  Kind kind = Kind::Any;
  std::size_t lo = 1;
  std::size_t hi = 1;

  static CountSpec any() { return {}; }
  static CountSpec exactly(std::size_t n);
  static CountSpec range(std::size_t lo, std::size_t hi);
  bool admits(std::size_t n) const;

  friend bool operator==(const CountSpec&, const CountSpec&) = default;
};

struct Skeleton;

struct BaseNode {
  Pattern pattern;
  friend bool operator==(const BaseNode&, const BaseNode&) = default;
};

/// Literal delimiter. Only valid as a child of an Align node.
struct DelimiterNode {
  std::string text;
  friend bool operator==(const DelimiterNode&, const DelimiterNode&) = default;
};

struct AlignNode {
  std::vector<Skeleton> children;
  friend bool operator==(const AlignNode&, const AlignNode&) = default;
};

struct RecursiveNode {
  Box<Skeleton> body;
  std::string sep;
  CountSpec count;
  friend bool operator==(const RecursiveNode&, const RecursiveNode&) = default;
};

struct Skeleton {
  std::variant<BaseNode, DelimiterNode, AlignNode, RecursiveNode> node;
  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

Skeleton make_base(Pattern p);
Skeleton make_delimiter(std::string text);
Skeleton make_align(std::vector<Skeleton> children);
Skeleton make_recursive(Skeleton body, std::string sep, CountSpec count = CountSpec::any());

/// Throws std::invalid_argument if the skeleton breaks a structural rule
/// (delimiter outside Align, Align with fewer than two children, empty
/// separator, nesting deeper than `max_depth`, malformed atom).
void check_skeleton(const Skeleton& k, std::size_t max_depth = 16);
std::size_t skeleton_depth(const Skeleton& k);

/// One matchable element of a skeleton, in pre-order. Atoms, Align
/// delimiters and Recursive separators each get an index; failures report
/// positions in this numbering.
struct ElementRef {
  enum class Kind { Atom, Delimiter, Separator };
  Kind kind;
  /// Pre-order ordinal of the enclosing Base node (atoms) or Recursive node
  /// (separators).
  std::size_t owner = 0;
  std::size_t atom = 0;
  const AtomPattern* atom_ptr = nullptr;
  std::string_view literal;
};

std::vector<ElementRef> flatten_elements(const Skeleton& k);

struct MatchResult {
  std::size_t matched_len = 0;
  bool accepted = false;
  std::optional<std::size_t> fail_atom_index;
  std::optional<std::size_t> fail_offset;
  std::string reason;
};

struct ElementSpan {
  std::size_t element = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Greedy longest-prefix match length; 0 means failure.
std::size_t atom_match(const AtomPattern& a, std::string_view s);
MatchResult pattern_match(const Pattern& p, std::string_view s);
/// Full-string match. When `trace` is given and the value is accepted it
/// receives one span per matched element.
MatchResult skeleton_match(const Skeleton& k, std::string_view s,
                           std::vector<ElementSpan>* trace = nullptr);

/// Region assigned to a Base node by structure alone.
struct BaseRegion {
  std::size_t base = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct CountObservation {
  std::size_t recursive = 0;
  std::size_t observed = 0;
};

/// Structure-only match: Base nodes whose extent is fixed by the
/// surrounding delimiters accept any non-empty region, and Recursive count
/// violations are recorded rather than failing.
struct StructuralMatch {
  bool fits = false;
  std::vector<BaseRegion> regions;
  std::vector<CountObservation> count_violations;
  std::optional<std::size_t> fail_offset;
  std::string reason;
};

StructuralMatch decompose_structure(const Skeleton& k, std::string_view s);

/// Pre-order visitors over Base and Recursive nodes; the index passed is
/// the node's ordinal among nodes of the same kind.
template <typename Fn>
void for_each_base(Skeleton& k, Fn&& fn);
template <typename Fn>
void for_each_recursive(Skeleton& k, Fn&& fn);

namespace detail {
template <typename Node, typename Fn>
void visit_nodes(Skeleton& k, std::size_t& counter, Fn& fn) {
  if (auto* a = std::get_if<AlignNode>(&k.node)) {
    if constexpr (std::is_same_v<Node, AlignNode>) fn(counter++, *a);
    for (Skeleton& c : a->children) visit_nodes<Node>(c, counter, fn);
  } else if (auto* r = std::get_if<RecursiveNode>(&k.node)) {
    if constexpr (std::is_same_v<Node, RecursiveNode>) fn(counter++, *r);
    visit_nodes<Node>(*r->body, counter, fn);
  } else if (auto* b = std::get_if<BaseNode>(&k.node)) {
    if constexpr (std::is_same_v<Node, BaseNode>) fn(counter++, *b);
  }
}
}  // namespace detail

template <typename Fn>
void for_each_base(Skeleton& k, Fn&& fn) {
  std::size_t counter = 0;
  detail::visit_nodes<BaseNode>(k, counter, fn);
}

template <typename Fn>
void for_each_recursive(Skeleton& k, Fn&& fn) {
  std::size_t counter = 0;
  detail::visit_nodes<RecursiveNode>(k, counter, fn);
}

}  // namespace patval
