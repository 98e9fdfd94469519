#include "patval/pattern_text.hpp"

#include <cctype>
#include <charconv>

namespace patval {

std::string quote_literal(std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "\"";
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c >= 0x7f) {
          out += "\\x";
          out += kHex[c >> 4];
          out += kHex[c & 15];
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

namespace {

std::string serialize_rep(const Repetition& r) {
  switch (r.kind) {
    case Repetition::Kind::OneOrMore: return "+";
    case Repetition::Kind::Exactly: return "{" + std::to_string(r.lo) + "}";
    case Repetition::Kind::Range: return "{" + std::to_string(r.lo) + "," + std::to_string(r.hi) + "}";
  }
  return "+";
}

void serialize_into(const Skeleton& k, std::string& out) {
  if (const auto* b = std::get_if<BaseNode>(&k.node)) {
    const auto& atoms = b->pattern.atoms;
    // A lone literal would read back as a delimiter inside Align.
    if (atoms.empty() || (atoms.size() == 1 && std::holds_alternative<LiteralAtom>(atoms[0]))) {
      out += "Base{" + serialize_pattern(b->pattern) + "}";
    } else {
      out += serialize_pattern(b->pattern);
    }
  } else if (const auto* d = std::get_if<DelimiterNode>(&k.node)) {
    out += quote_literal(d->text);
  } else if (const auto* a = std::get_if<AlignNode>(&k.node)) {
    out += "Align{";
    for (std::size_t i = 0; i < a->children.size(); ++i) {
      if (i) out += ", ";
      serialize_into(a->children[i], out);
    }
    out += "}";
  } else {
    const auto& r = std::get<RecursiveNode>(k.node);
    out += "Recursive{";
    serialize_into(*r.body, out);
    out += "}[" + quote_literal(r.sep) + "]";
    if (r.count.kind == CountSpec::Kind::Exactly) {
      out += "{" + std::to_string(r.count.lo) + "}";
    } else if (r.count.kind == CountSpec::Kind::Range) {
      out += "{" + std::to_string(r.count.lo) + "," + std::to_string(r.count.hi) + "}";
    }
  }
}

class Parser {
 public:
  Parser(std::string_view text, const GeneralizationTree& tree) : text_(text), tree_(tree) {}

  Skeleton parse_top() {
    Skeleton k = parse_node(false);
    skip_ws();
    if (pos_ != text_.size()) error("unexpected text after skeleton");
    return k;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what, line, col);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  bool consume_keyword(std::string_view kw) {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    pos_ += kw.size();
    return true;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::size_t parse_number() {
    skip_ws();
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc{} || ptr == text_.data() + pos_) error("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  std::string parse_quoted() {
    skip_ws();
    if (peek() != '"') error("expected quoted literal");
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) error("unterminated literal");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) error("unterminated escape");
      char e = text_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'x': {
          auto hex = [&](char h) -> int {
            if (h >= '0' && h <= '9') return h - '0';
            if (h >= 'a' && h <= 'f') return h - 'a' + 10;
            if (h >= 'A' && h <= 'F') return h - 'A' + 10;
            error("bad \\x escape");
          };
          if (pos_ + 2 > text_.size()) error("truncated \\x escape");
          int v = hex(text_[pos_]) * 16 + hex(text_[pos_ + 1]);
          pos_ += 2;
          out += static_cast<char>(v);
          break;
        }
        default: error(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  Repetition parse_rep() {
    if (peek() == '+') {
      ++pos_;
      return Repetition::one_or_more();
    }
    if (peek() != '{') error("expected repetition '+' or '{'");
    ++pos_;
    std::size_t lo = parse_number();
    std::size_t hi = lo;
    skip_ws();
    if (peek() == ',') {
      ++pos_;
      hi = parse_number();
    }
    expect('}');
    if (lo == 0 || lo > hi) error("repetition needs 1 <= lo <= hi");
    return lo == hi ? Repetition::exactly(lo) : Repetition::range(lo, hi);
  }

  AtomPattern parse_class() {
    ++pos_;  // '<'
    skip_ws();
    std::optional<NodeId> node;
    if (peek() == '"') {
      std::string ch = parse_quoted();
      if (ch.size() != 1) error("leaf class must be a single character");
      NodeId leaf = tree_.map_char(static_cast<unsigned char>(ch[0]));
      if (leaf == kNotInTree) error("character not in generalization tree");
      node = leaf;
    } else {
      std::size_t start = pos_;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
      std::string_view label = text_.substr(start, pos_ - start);
      if (label.empty()) error("expected class label");
      node = tree_.find_label(label);
      if (!node) {
        pos_ = start;
        error("unknown class '" + std::string(label) + "'");
      }
    }
    expect('>');
    return make_class(tree_, *node, parse_rep());
  }

  AtomPattern parse_enum() {
    std::vector<std::string> members;
    while (true) {
      std::string m = parse_quoted();
      if (m.empty()) error("enum members must be non-empty");
      members.push_back(std::move(m));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      break;
    }
    return make_enum(std::move(members));
  }

  bool at_atom_start() const {
    char c = peek();
    return c == '<' || c == '"' || text_.substr(pos_, 5) == "Enum{";
  }

  AtomPattern parse_atom() {
    skip_ws();
    if (peek() == '<') return parse_class();
    if (consume_keyword("Enum{")) return parse_enum();
    if (peek() == '"') {
      std::string lit = parse_quoted();
      if (lit.empty()) error("literal must be non-empty");
      return make_literal(std::move(lit));
    }
    error("expected atom");
  }

  void parse_atoms_into(Pattern& p) {
    while (true) {
      skip_ws();
      if (at_end() || !at_atom_start()) return;
      p.atoms.push_back(parse_atom());
    }
  }

  Skeleton parse_node(bool in_align) {
    skip_ws();
    if (consume_keyword("Align{")) {
      std::vector<Skeleton> children;
      while (true) {
        children.push_back(parse_node(true));
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect('}');
        break;
      }
      if (children.size() < 2) error("Align needs at least two children");
      return make_align(std::move(children));
    }
    if (consume_keyword("Recursive{")) {
      Skeleton body = parse_node(false);
      expect('}');
      expect('[');
      std::string sep = parse_quoted();
      if (sep.empty()) error("separator must be non-empty");
      expect(']');
      CountSpec count;
      if (peek() == '{') {
        ++pos_;
        std::size_t lo = parse_number();
        std::size_t hi = lo;
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          hi = parse_number();
        }
        expect('}');
        if (lo == 0 || lo > hi) error("count needs 1 <= lo <= hi");
        count = lo == hi ? CountSpec::exactly(lo) : CountSpec::range(lo, hi);
      }
      return make_recursive(std::move(body), std::move(sep), count);
    }
    if (consume_keyword("Base{")) {
      Pattern p;
      parse_atoms_into(p);
      expect('}');
      return make_base(std::move(p));
    }
    if (peek() == '"' && in_align) {
      std::string lit = parse_quoted();
      skip_ws();
      if (at_end() || peek() == ',' || peek() == '}') {
        if (lit.empty()) error("delimiter must be non-empty");
        return make_delimiter(std::move(lit));
      }
      if (lit.empty()) error("literal must be non-empty");
      Pattern p;
      p.atoms.push_back(make_literal(std::move(lit)));
      parse_atoms_into(p);
      return make_base(std::move(p));
    }
    Pattern p;
    parse_atoms_into(p);
    if (p.atoms.empty()) error("expected skeleton");
    return make_base(std::move(p));
  }

  std::string_view text_;
  const GeneralizationTree& tree_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_atom(const AtomPattern& a) {
  if (const auto* l = std::get_if<LiteralAtom>(&a)) return quote_literal(l->text);
  if (const auto* e = std::get_if<EnumAtom>(&a)) {
    std::string out = "Enum{";
    for (std::size_t i = 0; i < e->members.size(); ++i) {
      if (i) out += ",";
      out += quote_literal(e->members[i]);
    }
    return out + "}";
  }
  const auto& c = std::get<ClassAtom>(a);
  std::string label = c.leaf ? quote_literal(c.label) : c.label;
  return "<" + label + ">" + serialize_rep(c.rep);
}

std::string serialize_pattern(const Pattern& p) {
  std::string out;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    if (i) out += ' ';
    out += serialize_atom(p.atoms[i]);
  }
  return out;
}

std::string serialize_skeleton(const Skeleton& k) {
  std::string out;
  serialize_into(k, out);
  return out;
}

Skeleton parse_skeleton(std::string_view text, const GeneralizationTree& tree) {
  return Parser(text, tree).parse_top();
}

}  // namespace patval
