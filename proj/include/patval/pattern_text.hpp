#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "patval/pattern.hpp"

namespace patval {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

std::string quote_literal(std::string_view s);

std::string serialize_atom(const AtomPattern& a);
std::string serialize_pattern(const Pattern& p);
/// Text form of a skeleton, e.g. `Recursive{Align{<UPPER>+, ",", <DIGIT>+}}[";"]`.
std::string serialize_skeleton(const Skeleton& k);

/// Parses the text form; class labels are resolved against `tree`.
Skeleton parse_skeleton(std::string_view text, const GeneralizationTree& tree = GeneralizationTree::default_tree());

}  // namespace patval
