#include "patval/skeleton_extract.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "patval/pattern_text.hpp"

namespace patval {

std::vector<std::string_view> Segmentation::segments() const {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < pieces.size(); i += 2) out.push_back(pieces[i]);
  return out;
}

double DistanceCache::raw(std::string_view a, std::string_view b) {
  if (a == b) return 0.0;
  if (b < a) std::swap(a, b);
  std::string key;
  key.reserve(a.size() + b.size() + 1);
  key.append(a).push_back('\0');
  key.append(b);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  ++evaluations_;
  double d = segment_distance(a, b, tree_, params_);
  memo_.emplace(std::move(key), d);
  return d;
}

double DistanceCache::normalized(std::string_view a, std::string_view b) {
  std::size_t len = std::max(a.size(), b.size());
  if (len == 0) return 0.0;
  return raw(a, b) / static_cast<double>(len);
}

std::vector<std::string> enumerate_splits(const std::vector<std::string>& values, const ExtractConfig& config) {
  std::map<std::string, std::size_t> support;
  for (const auto& v : values) {
    std::set<std::string> tokens;
    std::size_t i = 0;
    while (i < v.size()) {
      if (!is_symbol_char(static_cast<unsigned char>(v[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < v.size() && is_symbol_char(static_cast<unsigned char>(v[j]))) ++j;
      if (j - i >= 2) tokens.insert(v.substr(i, j - i));
      for (std::size_t c = i; c < j; ++c) tokens.insert(std::string(1, v[c]));
      i = j;
    }
    for (auto& t : tokens) ++support[t];
  }
  const double needed = config.delimiter_support * static_cast<double>(values.size());
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : support) {
    if (static_cast<double>(n) >= needed) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (auto& [tok, n] : kept) out.push_back(tok);
  return out;
}

std::optional<Segmentation> split_on(std::string_view value, std::string_view delimiter) {
  if (delimiter.empty()) throw std::invalid_argument("split_on: empty delimiter");
  Segmentation seg;
  seg.source = std::string(value);
  seg.delimiter = std::string(delimiter);
  std::size_t start = 0;
  while (true) {
    std::size_t found = value.find(delimiter, start);
    std::size_t end = found == std::string_view::npos ? value.size() : found;
    if (end == start) return std::nullopt;
    seg.pieces.emplace_back(value.substr(start, end - start));
    if (found == std::string_view::npos) break;
    seg.pieces.emplace_back(delimiter);
    start = found + delimiter.size();
  }
  return seg;
}

double recursive_distance(const Segmentation& seg, const GeneralizationTree& t, const DistanceParams& p) {
  auto segs = seg.segments();
  if (segs.size() < 2) return std::numeric_limits<double>::max();
  double sum = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) sum += segment_distance(segs[i], segs[j], t, p);
  }
  return sum;
}

double vertical_distance(const VerticalPieces& a, const VerticalPieces& b, const GeneralizationTree& t,
                         const DistanceParams& p) {
  if (a.pieces.size() != b.pieces.size()) throw std::invalid_argument("vertical_distance: piece counts differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pieces.size(); ++i) sum += segment_distance(a.pieces[i], b.pieces[i], t, p);
  return sum + p.unalign_cost * static_cast<double>(a.tail.size() + b.tail.size());
}

namespace {

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t limit) {
  std::vector<std::size_t> out;
  if (limit == 0 || n <= limit) {
    out.resize(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
  }
  for (std::size_t i = 0; i < limit; ++i) out.push_back(i * n / limit);
  return out;
}

template <typename T>
std::vector<T> pick(const std::vector<T>& items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

std::size_t total_length(const VerticalPieces& r) {
  std::size_t n = r.tail.size();
  for (const auto& p : r.pieces) n += p.size();
  return n;
}

// Mean normalized pair distance over rows that share one column layout.
double vertical_rows_objective(const std::vector<VerticalPieces>& rows, DistanceCache& cache) {
  auto pairs = distance_pairs(rows.size());
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (auto [i, j] : pairs) {
    const auto& a = rows[i];
    const auto& b = rows[j];
    double d = 0.0;
    for (std::size_t c = 0; c < a.pieces.size(); c += 2) d += cache.raw(a.pieces[c], b.pieces[c]);
    d += cache.params().unalign_cost * static_cast<double>(a.tail.size() + b.tail.size());
    std::size_t len = std::max(total_length(a), total_length(b));
    sum += len == 0 ? 0.0 : d / static_cast<double>(len);
  }
  return sum / static_cast<double>(pairs.size());
}

}  // namespace

std::vector<std::string> distance_sample(const std::vector<std::string>& values, std::size_t limit) {
  return pick(values, sample_indices(values.size(), limit));
}

std::vector<std::pair<std::size_t, std::size_t>> distance_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n <= 12) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) out.emplace_back(i, j);
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 1; d <= 3; ++d) out.emplace_back(i, (i + d) % n);
  }
  return out;
}

std::optional<double> recursive_objective(const std::vector<std::string>& sample, std::string_view delimiter,
                                          DistanceCache& cache, std::size_t segment_cap) {
  std::vector<std::string_view> pooled;
  bool repeated = false;
  std::vector<Segmentation> splits;
  for (const auto& v : sample) {
    auto seg = split_on(v, delimiter);
    if (!seg) continue;
    splits.push_back(std::move(*seg));
  }
  for (const auto& s : splits) {
    auto segs = s.segments();
    if (segs.size() >= 2) repeated = true;
    pooled.insert(pooled.end(), segs.begin(), segs.end());
  }
  if (!repeated) return std::nullopt;
  if (pooled.size() > segment_cap) pooled = pick(pooled, sample_indices(pooled.size(), segment_cap));
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      sum += cache.normalized(pooled[i], pooled[j]);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::optional<ColumnLayout> column_layout(const std::vector<std::string>& values,
                                          const std::vector<std::string>& delimiters) {
  std::vector<std::string> tokens = delimiters;
  std::stable_sort(tokens.begin(), tokens.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });

  struct Hit {
    std::size_t pos;
    const std::string* token;
  };
  std::vector<std::vector<Hit>> hits(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    std::string_view v = values[r];
    std::size_t pos = 0;
    while (pos < v.size()) {
      const std::string* matched = nullptr;
      for (const auto& tok : tokens) {
        if (v.substr(pos, tok.size()) == tok) {
          matched = &tok;
          break;
        }
      }
      if (matched) {
        hits[r].push_back({pos, matched});
        pos += matched->size();
      } else {
        ++pos;
      }
    }
  }
  if (values.empty()) return std::nullopt;
  std::size_t shared = hits[0].size();
  for (std::size_t r = 1; r < values.size(); ++r) {
    std::size_t n = 0;
    while (n < shared && n < hits[r].size() && *hits[r][n].token == *hits[0][n].token) ++n;
    shared = n;
  }
  if (shared == 0) return std::nullopt;

  ColumnLayout layout;
  for (std::size_t i = 0; i < shared; ++i) layout.shared.push_back(*hits[0][i].token);
  layout.rows.reserve(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    std::string_view v = values[r];
    VerticalPieces row;
    std::size_t start = 0;
    for (std::size_t i = 0; i < shared; ++i) {
      row.pieces.emplace_back(v.substr(start, hits[r][i].pos - start));
      row.pieces.push_back(*hits[r][i].token);
      start = hits[r][i].pos + hits[r][i].token->size();
    }
    std::size_t tail_start = hits[r].size() > shared ? hits[r][shared].pos : v.size();
    row.pieces.emplace_back(v.substr(start, tail_start - start));
    row.tail = std::string(v.substr(tail_start));
    layout.rows.push_back(std::move(row));
  }
  return layout;
}

std::optional<double> vertical_objective(const std::vector<std::string>& sample,
                                         const std::vector<std::string>& delimiters, DistanceCache& cache) {
  auto layout = column_layout(sample, delimiters);
  if (!layout) return std::nullopt;
  return vertical_rows_objective(layout->rows, cache);
}

double unsplit_objective(const std::vector<std::string>& sample, DistanceCache& cache) {
  auto pairs = distance_pairs(sample.size());
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (auto [i, j] : pairs) sum += cache.normalized(sample[i], sample[j]);
  return sum / static_cast<double>(pairs.size());
}

namespace {

NodeId cut_node(const GeneralizationTree& t, NodeId leaf, int level) {
  const int target = std::min(level, t.node(leaf).depth - 1);
  while (t.node(leaf).depth > target) leaf = *t.node(leaf).parent;
  return leaf;
}

struct Token {
  bool literal = false;
  NodeId node{0};
  std::string text;
  bool operator==(const Token& o) const {
    return literal == o.literal && (literal ? text == o.text : node == o.node);
  }
};

std::optional<std::vector<Token>> tokenize(std::string_view v, const GeneralizationTree& t, int level,
                                           bool literal_symbols) {
  std::vector<Token> out;
  for (char ch : v) {
    auto c = static_cast<unsigned char>(ch);
    NodeId leaf = t.map_char(c);
    if (leaf == kNotInTree) return std::nullopt;
    if (literal_symbols && is_symbol_char(c)) {
      if (!out.empty() && out.back().literal) {
        out.back().text += ch;
      } else {
        out.push_back({true, NodeId{0}, std::string(1, ch)});
      }
      continue;
    }
    NodeId node = cut_node(t, leaf, level);
    if (!out.empty() && !out.back().literal && out.back().node == node) continue;
    out.push_back({false, node, {}});
  }
  return out;
}

}  // namespace

Pattern learn_base_pattern(const std::vector<std::string>& values, const GeneralizationTree& t) {
  Pattern fallback{{make_class(t, t.root())}};
  if (values.empty()) return fallback;
  if (std::all_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); })) return Pattern{};
  for (bool literal_symbols : {true, false}) {
    for (int level = t.height() - 1; level >= 1; --level) {
      auto first = tokenize(values[0], t, level, literal_symbols);
      if (!first || first->empty()) continue;
      bool same = true;
      for (std::size_t i = 1; i < values.size() && same; ++i) {
        auto toks = tokenize(values[i], t, level, literal_symbols);
        same = toks && *toks == *first;
      }
      if (!same) continue;
      Pattern p;
      for (const auto& tok : *first) {
        p.atoms.push_back(tok.literal ? make_literal(tok.text) : make_class(t, tok.node));
      }
      bool all = std::all_of(values.begin(), values.end(),
                             [&](const auto& v) { return pattern_match(p, v).accepted; });
      if (all) return p;
    }
  }
  return fallback;
}

bool is_fallback_pattern(const Pattern& p, const GeneralizationTree& t) {
  if (p.atoms.size() != 1) return false;
  const auto* c = std::get_if<ClassAtom>(&p.atoms[0]);
  return c && c->node == t.root() && c->rep.kind == Repetition::Kind::OneOrMore;
}

bool contains_fallback(const Skeleton& k, const GeneralizationTree& t) {
  if (const auto* b = std::get_if<BaseNode>(&k.node)) return is_fallback_pattern(b->pattern, t);
  if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    return std::any_of(a->children.begin(), a->children.end(),
                       [&](const Skeleton& c) { return contains_fallback(c, t); });
  }
  if (const auto* r = std::get_if<RecursiveNode>(&k.node)) return contains_fallback(*r->body, t);
  return false;
}

double coverage(const Skeleton& k, const std::vector<std::string>& values) {
  if (values.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& v : values) n += skeleton_match(k, v).accepted ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(values.size());
}

namespace {

void score_one(SkeletonCandidate& c, const std::vector<std::string>& values) {
  const auto elems = flatten_elements(c.skeleton);
  std::vector<bool> symbolic(elems.size());
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const auto& e = elems[i];
    symbolic[i] = e.kind != ElementRef::Kind::Atom;
  }
  std::size_t accepted = 0, symbols = 0, consumed = 0;
  std::vector<ElementSpan> trace;
  for (const auto& v : values) {
    for (char ch : v) symbols += is_symbol_char(static_cast<unsigned char>(ch)) ? 1 : 0;
    if (!skeleton_match(c.skeleton, v, &trace).accepted) continue;
    ++accepted;
    for (const auto& s : trace) {
      if (!symbolic[s.element]) continue;
      for (std::size_t i = s.begin; i < s.end; ++i) consumed += is_symbol_char(static_cast<unsigned char>(v[i])) ? 1 : 0;
    }
  }
  c.coverage = values.empty() ? 0.0 : static_cast<double>(accepted) / static_cast<double>(values.size());
  c.symbol_score = symbols == 0 ? 0.0 : static_cast<double>(consumed) / static_cast<double>(symbols);
}

}  // namespace

double symbol_score(const Skeleton& k, const std::vector<std::string>& values) {
  SkeletonCandidate c{k};
  score_one(c, values);
  return c.symbol_score;
}

std::vector<SkeletonCandidate> score_skeletons(std::vector<SkeletonCandidate> cands,
                                               const std::vector<std::string>& values, std::size_t k) {
  if (k == 0) throw std::invalid_argument("score_skeletons: k must be >= 1");
  std::vector<std::pair<std::string, std::size_t>> keyed;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    score_one(cands[i], values);
    keyed.emplace_back(serialize_skeleton(cands[i].skeleton), i);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
    const auto& a = cands[x.second];
    const auto& b = cands[y.second];
    if (a.coverage != b.coverage) return a.coverage > b.coverage;
    if (a.symbol_score != b.symbol_score) return a.symbol_score > b.symbol_score;
    if (a.distance != b.distance) return a.distance < b.distance;
    return x.first < y.first;
  });
  std::vector<SkeletonCandidate> out;
  for (std::size_t i = 0; i < keyed.size() && i < k; ++i) out.push_back(std::move(cands[keyed[i].second]));
  return out;
}

namespace {

struct RecursivePlan {
  std::string delimiter;
  double distance;
};

struct VerticalPlan {
  std::vector<std::string> delimiters;
  double distance;
  ColumnLayout layout;
};

using ChildFn = std::function<Skeleton(const std::vector<std::string>&)>;

class Extractor {
 public:
  Extractor(const GeneralizationTree& t, const ExtractConfig& config)
      : tree_(t), config_(config), cache_(t, config.distance) {}

  std::vector<RecursivePlan> recursive_plans(const std::vector<std::string>& values,
                                             const std::vector<std::string>& delims) {
    const auto sample = distance_sample(values, config_.distance_sample);
    std::vector<RecursivePlan> plans;
    for (const auto& d : delims) {
      if (auto obj = recursive_objective(sample, d, cache_)) plans.push_back({d, *obj});
    }
    std::stable_sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
    return plans;
  }

  std::vector<VerticalPlan> vertical_plans(const std::vector<std::string>& values,
                                           const std::vector<std::string>& delims) {
    const auto idx = sample_indices(values.size(), config_.distance_sample);
    std::vector<VerticalPlan> plans;
    for (const auto& subset : delimiter_subsets(delims)) {
      auto layout = column_layout(values, subset);
      if (!layout) continue;
      double d = vertical_rows_objective(pick(layout->rows, idx), cache_);
      plans.push_back({subset, d, std::move(*layout)});
    }
    std::stable_sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.layout.shared.size() > b.layout.shared.size();
    });
    return plans;
  }

  std::vector<std::vector<std::string>> delimiter_subsets(const std::vector<std::string>& delims) const {
    std::vector<std::vector<std::string>> out;
    const std::size_t n = delims.size();
    if (n <= config_.exhaustive_subsets) {
      for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::string> s;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask & (std::size_t{1} << i)) s.push_back(delims[i]);
        }
        out.push_back(std::move(s));
      }
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) out.push_back({delims[i]});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) out.push_back({delims[i], delims[j]});
    }
    out.push_back(delims);
    return out;
  }

  std::optional<SkeletonCandidate> build_recursive(const std::vector<std::string>& values, const RecursivePlan& plan,
                                                   const ChildFn& child) {
    std::vector<std::string> segments;
    std::set<std::size_t> counts;
    for (const auto& v : values) {
      auto seg = split_on(v, plan.delimiter);
      if (!seg) continue;
      auto segs = seg->segments();
      counts.insert(segs.size());
      segments.insert(segments.end(), segs.begin(), segs.end());
    }
    if (segments.empty()) return std::nullopt;
    CountSpec count = counts.size() == 1 ? CountSpec::exactly(*counts.begin()) : CountSpec::any();
    return SkeletonCandidate{make_recursive(child(segments), plan.delimiter, count), plan.distance};
  }

  std::optional<SkeletonCandidate> build_vertical(const VerticalPlan& plan, const ChildFn& child) {
    const auto& rows = plan.layout.rows;
    const std::size_t columns = plan.layout.shared.size() + 1;
    struct Item {
      bool literal;
      std::string text;
      std::size_t column;
    };
    std::vector<Item> items;
    std::vector<std::vector<std::string>> column_values(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      auto& vals = column_values[c];
      for (const auto& r : rows) vals.push_back(c + 1 == columns ? r.pieces[2 * c] + r.tail : r.pieces[2 * c]);
      bool constant = std::all_of(vals.begin(), vals.end(), [&](const auto& v) { return v == vals[0]; });
      if (constant) {
        items.push_back({true, vals[0], c});
      } else {
        items.push_back({false, {}, c});
      }
      if (c + 1 < columns) items.push_back({true, plan.layout.shared[c], columns});
    }

    std::vector<Skeleton> children;
    std::string buffer;
    for (const auto& it : items) {
      if (it.literal) {
        buffer += it.text;
        continue;
      }
      if (!buffer.empty()) children.push_back(make_delimiter(std::exchange(buffer, {})));
      children.push_back(child(column_values[it.column]));
    }
    if (!buffer.empty()) children.push_back(make_delimiter(buffer));

    if (children.size() < 2) {
      // Every column is constant: keep the columns as literal (possibly empty) fields.
      children.clear();
      for (const auto& it : items) {
        if (it.column == columns) {
          children.push_back(make_delimiter(it.text));
        } else if (it.text.empty()) {
          children.push_back(make_base(Pattern{}));
        } else {
          children.push_back(make_base(Pattern{{make_literal(it.text)}}));
        }
      }
    }
    return SkeletonCandidate{make_align(std::move(children)), plan.distance};
  }

  SkeletonCandidate base_candidate(const std::vector<std::string>& values) {
    const auto sample = distance_sample(values, config_.distance_sample);
    return SkeletonCandidate{make_base(learn_base_pattern(values, tree_)), unsplit_objective(sample, cache_)};
  }

  bool is_base_type(const std::vector<std::string>& values) const {
    CharSet chars;
    for (const auto& v : values) {
      for (char c : v) chars.set(static_cast<unsigned char>(c));
    }
    if (chars.none()) return true;
    auto cover = tree_.covering_node(chars);
    if (!cover) return true;
    const ClassNode& n = tree_.node(*cover);
    if (n.depth >= 2) return true;
    if (n.depth == 0) return false;
    for (std::size_t c = 0; c < 256; ++c) {
      if (chars.test(c) && is_symbol_char(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }

  Skeleton flat_child(const std::vector<std::string>& values) { return make_base(learn_base_pattern(values, tree_)); }

  std::vector<SkeletonCandidate> extract(const std::vector<std::string>& values, std::size_t depth) {
    if (values.empty()) return {SkeletonCandidate{make_base(Pattern{{make_class(tree_, tree_.root())}}), 0.0}};
    if (depth == 0 || is_base_type(values)) return {base_candidate(values)};
    auto cands = split_candidates(values, depth, enumerate_splits(values, config_));
    if (cands.empty() || all_fallback(cands)) {
      // Rare delimiters can still carry structure when no flat pattern fits.
      ExtractConfig relaxed = config_;
      relaxed.delimiter_support = 0.0;
      auto more = split_candidates(values, depth, enumerate_splits(values, relaxed));
      cands.insert(cands.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    if (cands.empty()) return {base_candidate(values)};

    std::vector<SkeletonCandidate> kept;
    for (auto& c : cands) {
      if (!contains_fallback(c.skeleton, tree_)) kept.push_back(std::move(c));
    }
    if (kept.empty()) kept = std::move(cands);

    bool full = std::any_of(kept.begin(), kept.end(), [&](const auto& c) { return coverage(c.skeleton, values) == 1.0; });
    if (!full) {
      auto base = base_candidate(values);
      if (!contains_fallback(base.skeleton, tree_) || all_fallback(kept)) kept.push_back(std::move(base));
    }
    return kept;
  }

  bool all_fallback(const std::vector<SkeletonCandidate>& cands) const {
    return std::all_of(cands.begin(), cands.end(), [&](const auto& c) { return contains_fallback(c.skeleton, tree_); });
  }

  std::vector<SkeletonCandidate> split_candidates(const std::vector<std::string>& values, std::size_t depth,
                                                  const std::vector<std::string>& delims) {
    ChildFn flat = [this](const std::vector<std::string>& v) { return flat_child(v); };
    ChildFn nested = [this, depth](const std::vector<std::string>& v) { return best_child(v, depth - 1); };

    std::vector<SkeletonCandidate> cands;
    auto rplans = recursive_plans(values, delims);
    for (std::size_t i = 0; i < rplans.size(); ++i) {
      if (auto c = build_recursive(values, rplans[i], i == 0 ? nested : flat)) cands.push_back(std::move(*c));
    }
    auto vplans = vertical_plans(values, delims);
    for (std::size_t i = 0; i < vplans.size() && i < kVerticalEmitted; ++i) {
      if (auto c = build_vertical(vplans[i], i == 0 ? nested : flat)) cands.push_back(std::move(*c));
    }
    return cands;
  }

  Skeleton best_child(const std::vector<std::string>& values, std::size_t depth) {
    return score_skeletons(extract(values, depth), values, 1).front().skeleton;
  }

  std::vector<RecursivePlan> public_recursive(const std::vector<std::string>& values) {
    return recursive_plans(values, enumerate_splits(values, config_));
  }

  std::vector<VerticalPlan> public_vertical(const std::vector<std::string>& values) {
    return vertical_plans(values, enumerate_splits(values, config_));
  }

  static constexpr std::size_t kVerticalEmitted = 4;

 private:
  const GeneralizationTree& tree_;
  const ExtractConfig& config_;
  DistanceCache cache_;
};

}  // namespace

std::vector<SkeletonCandidate> recursive_split(const std::vector<std::string>& values, const GeneralizationTree& t,
                                               const ExtractConfig& config) {
  Extractor ex(t, config);
  ChildFn flat = [&](const std::vector<std::string>& v) { return ex.flat_child(v); };
  std::vector<SkeletonCandidate> out;
  for (const auto& plan : ex.public_recursive(values)) {
    if (auto c = ex.build_recursive(values, plan, flat)) out.push_back(std::move(*c));
  }
  return out;
}

std::vector<SkeletonCandidate> vertical_split(const std::vector<std::string>& values, const GeneralizationTree& t,
                                              const ExtractConfig& config) {
  Extractor ex(t, config);
  ChildFn flat = [&](const std::vector<std::string>& v) { return ex.flat_child(v); };
  std::vector<SkeletonCandidate> out;
  for (const auto& plan : ex.public_vertical(values)) {
    if (auto c = ex.build_vertical(plan, flat)) out.push_back(std::move(*c));
  }
  return out;
}

std::vector<SkeletonCandidate> extract_skeleton(const std::vector<std::string>& values, std::size_t depth,
                                                const GeneralizationTree& t, const ExtractConfig& config) {
  Extractor ex(t, config);
  return ex.extract(values, depth);
}

}  // namespace patval
