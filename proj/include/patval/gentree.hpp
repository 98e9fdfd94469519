#pragma once

#include <bitset>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace patval {

/// Set of byte values. Strings are treated as byte sequences throughout.
using CharSet = std::bitset<256>;

enum class NodeId : std::int32_t {};

/// Result of `map_char` for a character no leaf covers.
inline constexpr NodeId kNotInTree{-1};

constexpr std::int32_t to_index(NodeId id) { return static_cast<std::int32_t>(id); }

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

struct ClassNode {
  std::string label;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  CharSet chars;
  /// Cost of the edge from this node up to its parent.
  double edge_cost = 1.0;
  int depth = 0;

  bool is_leaf() const { return children.empty(); }
};

struct DistanceParams {
  double indel_cost = 4.0;
  double unalign_cost = 4.0;
};

class TreeError : public std::runtime_error {
 public:
  TreeError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "tree line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Character-class hierarchy. Leaves are single characters, internal nodes
/// are classes whose character set is the union of their children.
///
/// Text form, one node per line: `depth label [charset] [cost=N] [leaf_cost=N]`.
/// A bracketed charset expands into one leaf per character. Lines starting
/// with `#` are comments.
class GeneralizationTree {
 public:
  /// ANY > {ALNUM > {ALPHA > {UPPER, LOWER}, DIGIT}, PUNCT, SPACE} over
  /// printable ASCII plus tab.
  static const GeneralizationTree& default_tree();
  static std::string_view default_tree_text();

  static GeneralizationTree parse(std::string_view text);
  static GeneralizationTree load(const std::filesystem::path& path);
  std::string to_text() const;

  NodeId root() const { return NodeId{0}; }
  const ClassNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(to_index(id))); }
  std::span<const ClassNode> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(NodeId id) const {
    return to_index(id) >= 0 && static_cast<std::size_t>(to_index(id)) < nodes_.size();
  }

  NodeId map_char(char32_t c) const;
  std::optional<NodeId> find_label(std::string_view label) const;
  const CharSet& alphabet() const { return node(root()).chars; }

  bool is_ancestor_or_self(NodeId ancestor, NodeId x) const;
  std::optional<NodeId> nearest_common_ancestor(NodeId x, NodeId y) const;
  /// Smallest node whose character set contains every character in `chars`.
  std::optional<NodeId> covering_node(const CharSet& chars) const;
  double generalization_cost(NodeId x, NodeId ancestor) const;
  /// Pattern-based distance between two bytes, served from a precomputed table.
  double char_distance(unsigned char a, unsigned char b) const {
    return distance_table_[static_cast<std::size_t>(a) * 256 + b];
  }
  /// Longest root-to-leaf path, counted in edges.
  int height() const { return height_; }

 private:
  void finalize();

  std::vector<ClassNode> nodes_;
  std::vector<NodeId> leaf_of_ = std::vector<NodeId>(256, kNotInTree);
  std::vector<double> distance_table_;
  int height_ = 0;
};

NodeId map_char(char32_t c, const GeneralizationTree& t);
std::optional<NodeId> nearest_common_ancestor(NodeId x, NodeId y, const GeneralizationTree& t);
double generalization_cost(NodeId x, NodeId ancestor, const GeneralizationTree& t);
double pattern_based_distance(char32_t x, char32_t y, const GeneralizationTree& t);

/// Weighted edit distance: substitutions cost the pattern-based distance of
/// the two characters, insertions and deletions cost `p.indel_cost`.
double segment_distance(std::string_view a, std::string_view b, const GeneralizationTree& t,
                        const DistanceParams& p = {});

/// `segment_distance` divided by the longer length; 0 for two empty strings.
double normalized_segment_distance(std::string_view a, std::string_view b,
                                   const GeneralizationTree& t, const DistanceParams& p = {});

bool is_symbol_char(unsigned char c);

}  // namespace patval
