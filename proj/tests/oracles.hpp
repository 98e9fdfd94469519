#pragma once

// Independent reference computations the tests compare against.

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string_view>
#include <vector>

#include "patval/gentree.hpp"

namespace patval::oracle {

// Parent map rebuilt from child lists by BFS, independent of the stored parent links.
inline std::map<int, int> bfs_parents(const GeneralizationTree& t) {
  std::map<int, int> parent;
  std::queue<NodeId> q;
  q.push(t.root());
  parent[to_index(t.root())] = -1;
  while (!q.empty()) {
    NodeId n = q.front();
    q.pop();
    for (NodeId c : t.node(n).children) {
      parent[to_index(c)] = to_index(n);
      q.push(c);
    }
  }
  return parent;
}

inline std::vector<int> root_path(const std::map<int, int>& parent, int x) {
  std::vector<int> path;
  for (; x != -1; x = parent.at(x)) path.push_back(x);
  return path;
}

// Deepest shared node of the two explicit root paths.
inline int nca(const std::map<int, int>& parent, int x, int y) {
  auto px = root_path(parent, x);
  auto py = root_path(parent, y);
  std::set<int> sy(py.begin(), py.end());
  for (int n : px) {
    if (sy.count(n)) return n;
  }
  return -1;
}

// Edge count from each leaf up to their common ancestor (unit edge costs).
inline double char_distance(const GeneralizationTree& t, const std::map<int, int>& parent, char a, char b) {
  if (a == b) return 0.0;
  int x = to_index(t.map_char(static_cast<unsigned char>(a)));
  int y = to_index(t.map_char(static_cast<unsigned char>(b)));
  int top = nca(parent, x, y);
  auto steps = [&](int from) {
    int n = 0;
    for (; from != top; from = parent.at(from)) ++n;
    return static_cast<double>(n);
  };
  return steps(x) + steps(y);
}

// Minimum over every alignment path, enumerated without memoization.
inline double brute_edit(const GeneralizationTree& t, std::string_view a, std::string_view b, double indel) {
  if (a.empty()) return indel * static_cast<double>(b.size());
  if (b.empty()) return indel * static_cast<double>(a.size());
  double sub = t.char_distance(a[0], b[0]) + brute_edit(t, a.substr(1), b.substr(1), indel);
  double del = indel + brute_edit(t, a.substr(1), b, indel);
  double ins = indel + brute_edit(t, a, b.substr(1), indel);
  return std::min({sub, del, ins});
}

}  // namespace patval::oracle
