#include "patval/gentree.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace patval {

namespace {

constexpr std::string_view kDefaultTreeText =
    "# depth label [charset] [cost=N] [leaf_cost=N]\n"
    "0 ANY\n"
    "1 ALNUM\n"
    "2 ALPHA\n"
    "3 UPPER [A-Z]\n"
    "3 LOWER [a-z]\n"
    "2 DIGIT [0-9]\n"
    "1 PUNCT [!-/:-@\\[-`{-~]\n"
    "1 SPACE [\\s\\t]\n";

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Reads one (possibly escaped) character of a bracket expression at `pos`.
unsigned char read_bracket_char(std::string_view s, std::size_t& pos, int line) {
  char c = s[pos++];
  if (c != '\\') return static_cast<unsigned char>(c);
  if (pos >= s.size()) throw TreeError("dangling escape in charset", line);
  char e = s[pos++];
  switch (e) {
    case 't': return '\t';
    case 'n': return '\n';
    case 'r': return '\r';
    case 's': return ' ';
    case 'x': {
      if (pos + 2 > s.size()) throw TreeError("truncated \\x escape", line);
      int hi = hex_value(s[pos]), lo = hex_value(s[pos + 1]);
      if (hi < 0 || lo < 0) throw TreeError("bad \\x escape", line);
      pos += 2;
      return static_cast<unsigned char>(hi * 16 + lo);
    }
    default: return static_cast<unsigned char>(e);
  }
}

CharSet parse_bracket(std::string_view body, int line) {
  CharSet out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    unsigned char first = read_bracket_char(body, pos, line);
    if (pos + 1 < body.size() && body[pos] == '-') {
      ++pos;
      unsigned char last = read_bracket_char(body, pos, line);
      if (last < first) throw TreeError("reversed range in charset", line);
      for (int c = first; c <= last; ++c) out.set(static_cast<std::size_t>(c));
    } else {
      out.set(first);
    }
  }
  return out;
}

std::string bracket_char(unsigned char c) {
  switch (c) {
    case '\\': return "\\\\";
    case ']': return "\\]";
    case '[': return "\\[";
    case '-': return "\\-";
    case ' ': return "\\s";
    case '\t': return "\\t";
    case '\n': return "\\n";
    case '\r': return "\\r";
    default: break;
  }
  if (c < 0x20 || c >= 0x7f) {
    static constexpr char kHex[] = "0123456789abcdef";
    return std::string{'\\', 'x', kHex[c >> 4], kHex[c & 15]};
  }
  return std::string(1, static_cast<char>(c));
}

std::string format_bracket(const CharSet& chars) {
  std::string out = "[";
  int c = 0;
  while (c < 256) {
    if (!chars.test(static_cast<std::size_t>(c))) {
      ++c;
      continue;
    }
    int end = c;
    while (end + 1 < 256 && chars.test(static_cast<std::size_t>(end + 1))) ++end;
    out += bracket_char(static_cast<unsigned char>(c));
    if (end - c >= 2) {
      out += '-';
      out += bracket_char(static_cast<unsigned char>(end));
    } else if (end == c + 1) {
      out += bracket_char(static_cast<unsigned char>(end));
    }
    c = end + 1;
  }
  out += ']';
  return out;
}

std::string format_cost(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double parse_cost(std::string_view text, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(std::string(text), &used);
    if (used != text.size() || v < 0) throw TreeError("bad cost '" + std::string(text) + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw TreeError("bad cost '" + std::string(text) + "'", line);
  }
}

}  // namespace

const GeneralizationTree& GeneralizationTree::default_tree() {
  static const GeneralizationTree tree = parse(kDefaultTreeText);
  return tree;
}

std::string_view GeneralizationTree::default_tree_text() { return kDefaultTreeText; }

GeneralizationTree GeneralizationTree::parse(std::string_view text) {
  GeneralizationTree tree;
  std::vector<NodeId> stack;  // stack[d] = most recent node at depth d
  std::unordered_map<std::string, int> labels;
  int line_no = 0;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string_view::npos || line[pos] == '#') continue;
    auto next_token = [&]() -> std::string_view {
      pos = line.find_first_not_of(" \t", pos);
      if (pos == std::string_view::npos) return {};
      std::size_t tok_end = line.find_first_of(" \t", pos);
      if (tok_end == std::string_view::npos) tok_end = line.size();
      std::string_view tok = line.substr(pos, tok_end - pos);
      pos = tok_end;
      return tok;
    };

    std::string_view depth_tok = next_token();
    int depth = -1;
    auto [ptr, ec] = std::from_chars(depth_tok.data(), depth_tok.data() + depth_tok.size(), depth);
    if (ec != std::errc{} || ptr != depth_tok.data() + depth_tok.size() || depth < 0) {
      throw TreeError("expected node depth, got '" + std::string(depth_tok) + "'", line_no);
    }
    std::string_view label = next_token();
    if (label.empty()) throw TreeError("missing label", line_no);
    if (!is_identifier(label)) throw TreeError("label '" + std::string(label) + "' is not an identifier", line_no);
    if (labels.count(std::string(label))) throw TreeError("duplicate label '" + std::string(label) + "'", line_no);

    std::optional<CharSet> charset;
    double cost = 1.0, leaf_cost = 1.0;
    pos = line.find_first_not_of(" \t", pos);
    if (pos != std::string_view::npos && line[pos] == '[') {
      std::size_t scan = pos + 1;
      while (scan < line.size() && line[scan] != ']') scan += (line[scan] == '\\') ? 2 : 1;
      if (scan >= line.size()) throw TreeError("unterminated charset", line_no);
      charset = parse_bracket(line.substr(pos + 1, scan - pos - 1), line_no);
      pos = scan + 1;
    }
    for (std::string_view opt = next_token(); !opt.empty(); opt = next_token()) {
      std::size_t eq = opt.find('=');
      if (eq == std::string_view::npos) throw TreeError("unexpected token '" + std::string(opt) + "'", line_no);
      std::string_view key = opt.substr(0, eq), value = opt.substr(eq + 1);
      if (key == "cost") {
        cost = parse_cost(value, line_no);
      } else if (key == "leaf_cost") {
        leaf_cost = parse_cost(value, line_no);
      } else {
        throw TreeError("unknown option '" + std::string(key) + "'", line_no);
      }
    }

    if (tree.nodes_.empty()) {
      if (depth != 0) throw TreeError("first node must have depth 0", line_no);
    } else if (depth == 0) {
      throw TreeError("only one root allowed", line_no);
    } else if (static_cast<std::size_t>(depth) > stack.size()) {
      throw TreeError("depth jumps by more than one", line_no);
    }
    stack.resize(static_cast<std::size_t>(depth));

    ClassNode node;
    node.label = std::string(label);
    node.depth = depth;
    node.edge_cost = cost;
    NodeId id{static_cast<std::int32_t>(tree.nodes_.size())};
    if (depth > 0) {
      node.parent = stack.back();
      tree.nodes_[static_cast<std::size_t>(to_index(stack.back()))].children.push_back(id);
    }
    labels.emplace(node.label, to_index(id));
    tree.nodes_.push_back(std::move(node));
    stack.push_back(id);

    if (charset) {
      for (std::size_t c = 0; c < 256; ++c) {
        if (!charset->test(c)) continue;
        ClassNode leaf;
        leaf.label = std::string(1, static_cast<char>(c));
        leaf.depth = depth + 1;
        leaf.edge_cost = leaf_cost;
        leaf.parent = id;
        leaf.chars.set(c);
        NodeId leaf_id{static_cast<std::int32_t>(tree.nodes_.size())};
        tree.nodes_[static_cast<std::size_t>(to_index(id))].children.push_back(leaf_id);
        tree.nodes_.push_back(std::move(leaf));
      }
    }
  }
  if (tree.nodes_.empty()) throw TreeError("tree has no nodes");
  tree.finalize();
  return tree;
}

GeneralizationTree GeneralizationTree::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TreeError("cannot open tree file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void GeneralizationTree::finalize() {
  // Children always come after their parent, so a reverse sweep sees every
  // child before its parent.
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    ClassNode& n = nodes_[i];
    if (n.children.empty()) {
      if (n.chars.count() != 1) {
        throw TreeError("class '" + n.label + "' has no characters");
      }
      continue;
    }
    n.chars.reset();
    for (NodeId child : n.children) {
      const CharSet& cs = nodes_[static_cast<std::size_t>(to_index(child))].chars;
      if ((n.chars & cs).any()) throw TreeError("character listed twice under '" + n.label + "'");
      n.chars |= cs;
    }
  }
  height_ = 0;
  std::fill(leaf_of_.begin(), leaf_of_.end(), kNotInTree);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ClassNode& n = nodes_[i];
    height_ = std::max(height_, n.depth);
    if (!n.is_leaf()) continue;
    for (std::size_t c = 0; c < 256; ++c) {
      if (!n.chars.test(c)) continue;
      if (leaf_of_[c] != kNotInTree) throw TreeError("character appears under two leaves");
      leaf_of_[c] = NodeId{static_cast<std::int32_t>(i)};
    }
  }

  std::vector<double> cost_to_root(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    cost_to_root[i] = cost_to_root[static_cast<std::size_t>(to_index(*nodes_[i].parent))] + nodes_[i].edge_cost;
  }
  distance_table_.assign(256 * 256, kInfiniteDistance);
  for (std::size_t a = 0; a < 256; ++a) {
    distance_table_[a * 256 + a] = 0.0;
    if (leaf_of_[a] == kNotInTree) continue;
    for (std::size_t b = 0; b < 256; ++b) {
      if (a == b || leaf_of_[b] == kNotInTree) continue;
      NodeId nca = *nearest_common_ancestor(leaf_of_[a], leaf_of_[b]);
      auto ia = static_cast<std::size_t>(to_index(leaf_of_[a]));
      auto ib = static_cast<std::size_t>(to_index(leaf_of_[b]));
      auto in = static_cast<std::size_t>(to_index(nca));
      distance_table_[a * 256 + b] = (cost_to_root[ia] - cost_to_root[in]) + (cost_to_root[ib] - cost_to_root[in]);
    }
  }
}

std::string GeneralizationTree::to_text() const {
  std::string out;
  auto emit = [&](auto&& self, NodeId id) -> void {
    const ClassNode& n = node(id);
    out += std::to_string(n.depth) + ' ' + n.label;
    CharSet leaf_chars;
    std::optional<double> leaf_cost;
    bool uniform_leaf_cost = true;
    for (NodeId c : n.children) {
      const ClassNode& child = node(c);
      if (!child.is_leaf()) continue;
      leaf_chars |= child.chars;
      if (leaf_cost && *leaf_cost != child.edge_cost) uniform_leaf_cost = false;
      leaf_cost = child.edge_cost;
    }
    if (!uniform_leaf_cost) throw TreeError("tree with mixed leaf costs under '" + n.label + "' has no text form");
    if (leaf_chars.any()) out += ' ' + format_bracket(leaf_chars);
    if (id != root() && n.edge_cost != 1.0) out += " cost=" + format_cost(n.edge_cost);
    if (leaf_cost && *leaf_cost != 1.0) out += " leaf_cost=" + format_cost(*leaf_cost);
    out += '\n';
    for (NodeId c : n.children) {
      if (!node(c).is_leaf()) self(self, c);
    }
  };
  emit(emit, root());
  return out;
}

NodeId GeneralizationTree::map_char(char32_t c) const {
  if (c > 255) return kNotInTree;
  return leaf_of_[static_cast<std::size_t>(c)];
}

std::optional<NodeId> GeneralizationTree::find_label(std::string_view label) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf() && nodes_[i].label == label) return NodeId{static_cast<std::int32_t>(i)};
  }
  return std::nullopt;
}

bool GeneralizationTree::is_ancestor_or_self(NodeId ancestor, NodeId x) const {
  if (!contains(ancestor) || !contains(x)) return false;
  const int target = node(ancestor).depth;
  while (node(x).depth > target) x = *node(x).parent;
  return x == ancestor;
}

std::optional<NodeId> GeneralizationTree::nearest_common_ancestor(NodeId x, NodeId y) const {
  if (!contains(x) || !contains(y)) return std::nullopt;
  while (node(x).depth > node(y).depth) x = *node(x).parent;
  while (node(y).depth > node(x).depth) y = *node(y).parent;
  while (x != y) {
    x = *node(x).parent;
    y = *node(y).parent;
  }
  return x;
}

std::optional<NodeId> GeneralizationTree::covering_node(const CharSet& chars) const {
  std::optional<NodeId> acc;
  for (std::size_t c = 0; c < 256; ++c) {
    if (!chars.test(c)) continue;
    NodeId leaf = leaf_of_[c];
    if (leaf == kNotInTree) return std::nullopt;
    acc = acc ? nearest_common_ancestor(*acc, leaf) : std::optional<NodeId>(leaf);
  }
  return acc;
}

double GeneralizationTree::generalization_cost(NodeId x, NodeId ancestor) const {
  if (!is_ancestor_or_self(ancestor, x)) {
    throw std::invalid_argument("generalization_cost: node is not an ancestor");
  }
  double cost = 0.0;
  while (x != ancestor) {
    cost += node(x).edge_cost;
    x = *node(x).parent;
  }
  return cost;
}

NodeId map_char(char32_t c, const GeneralizationTree& t) { return t.map_char(c); }

std::optional<NodeId> nearest_common_ancestor(NodeId x, NodeId y, const GeneralizationTree& t) {
  return t.nearest_common_ancestor(x, y);
}

double generalization_cost(NodeId x, NodeId ancestor, const GeneralizationTree& t) {
  return t.generalization_cost(x, ancestor);
}

double pattern_based_distance(char32_t x, char32_t y, const GeneralizationTree& t) {
  if (x == y) return 0.0;
  auto nca = t.nearest_common_ancestor(t.map_char(x), t.map_char(y));
  if (!nca) return kInfiniteDistance;
  return t.generalization_cost(t.map_char(x), *nca) + t.generalization_cost(t.map_char(y), *nca);
}

double segment_distance(std::string_view a, std::string_view b, const GeneralizationTree& t,
                        const DistanceParams& p) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<double> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<double>(j) * p.indel_cost;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<double>(i) * p.indel_cost;
    const auto ca = static_cast<unsigned char>(a[i - 1]);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      double sub = prev[j - 1] + t.char_distance(ca, static_cast<unsigned char>(b[j - 1]));
      double del = prev[j] + p.indel_cost;
      double ins = cur[j - 1] + p.indel_cost;
      cur[j] = std::min({sub, del, ins});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double normalized_segment_distance(std::string_view a, std::string_view b,
                                   const GeneralizationTree& t, const DistanceParams& p) {
  std::size_t len = std::max(a.size(), b.size());
  if (len == 0) return 0.0;
  return segment_distance(a, b, t, p) / static_cast<double>(len);
}

bool is_symbol_char(unsigned char c) {
  return c == ' ' || c == '\t' || (c >= 0x21 && c <= 0x7e && !std::isalnum(c));
}

}  // namespace patval
