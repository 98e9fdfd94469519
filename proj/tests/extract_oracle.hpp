#pragma once

// Naive re-implementations of the split objectives, used as exhaustive oracles.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "patval/gentree.hpp"

namespace patval::oracle {

// Full-matrix weighted edit distance.
inline double edit_matrix(const GeneralizationTree& t, std::string_view a, std::string_view b, double indel = 4.0) {
  std::vector<std::vector<double>> m(a.size() + 1, std::vector<double>(b.size() + 1, 0.0));
  for (std::size_t i = 0; i <= a.size(); ++i) m[i][0] = indel * static_cast<double>(i);
  for (std::size_t j = 0; j <= b.size(); ++j) m[0][j] = indel * static_cast<double>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      m[i][j] = std::min({m[i - 1][j - 1] + t.char_distance(a[i - 1], b[j - 1]), m[i - 1][j] + indel,
                          m[i][j - 1] + indel});
    }
  }
  return m[a.size()][b.size()];
}

inline double normalized(const GeneralizationTree& t, std::string_view a, std::string_view b) {
  const std::size_t len = std::max(a.size(), b.size());
  return len == 0 ? 0.0 : edit_matrix(t, a, b) / static_cast<double>(len);
}

inline bool symbol(char c) {
  auto u = static_cast<unsigned char>(c);
  return u == ' ' || u == '\t' || (u >= 0x21 && u <= 0x7e && !std::isalnum(u));
}

// Every single symbol character plus every maximal symbol run of length >= 2.
inline std::set<std::string> symbol_tokens(const std::string& v) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!symbol(v[i])) continue;
    out.insert(std::string(1, v[i]));
    if (i > 0 && symbol(v[i - 1])) continue;
    std::size_t j = i;
    while (j < v.size() && symbol(v[j])) ++j;
    if (j - i >= 2) out.insert(v.substr(i, j - i));
  }
  return out;
}

inline std::set<std::string> delimiter_tokens(const std::vector<std::string>& values, double support) {
  std::map<std::string, int> count;
  for (const auto& v : values) {
    for (const auto& tok : symbol_tokens(v)) ++count[tok];
  }
  std::set<std::string> out;
  for (const auto& [tok, n] : count) {
    if (n >= support * static_cast<double>(values.size())) out.insert(tok);
  }
  return out;
}

inline std::vector<std::string> split_all(const std::string& v, const std::string& d) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < v.size();) {
    if (v.compare(i, d.size(), d) == 0) {
      out.push_back(cur);
      cur.clear();
      i += d.size();
    } else {
      cur += v[i++];
    }
  }
  out.push_back(cur);
  return out;
}

inline std::optional<double> recursive_objective(const GeneralizationTree& t, const std::vector<std::string>& values,
                                                 const std::string& d) {
  std::vector<std::string> pooled;
  bool repeated = false;
  for (const auto& v : values) {
    auto segs = split_all(v, d);
    if (std::any_of(segs.begin(), segs.end(), [](const auto& s) { return s.empty(); })) continue;
    repeated = repeated || segs.size() >= 2;
    pooled.insert(pooled.end(), segs.begin(), segs.end());
  }
  if (!repeated) return std::nullopt;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      sum += normalized(t, pooled[i], pooled[j]);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

struct Occurrence {
  std::size_t pos;
  std::string token;
};

// Left-to-right scan taking the longest token of `subset` at each position.
inline std::vector<Occurrence> scan(const std::string& v, const std::vector<std::string>& subset) {
  std::vector<Occurrence> out;
  for (std::size_t i = 0; i < v.size();) {
    std::string best;
    for (const auto& tok : subset) {
      if (v.compare(i, tok.size(), tok) == 0 && tok.size() > best.size()) best = tok;
    }
    if (best.empty()) {
      ++i;
    } else {
      out.push_back({i, best});
      i += best.size();
    }
  }
  return out;
}

inline std::optional<double> vertical_objective(const GeneralizationTree& t, const std::vector<std::string>& values,
                                                const std::vector<std::string>& subset) {
  std::vector<std::vector<Occurrence>> occ;
  for (const auto& v : values) occ.push_back(scan(v, subset));
  std::size_t shared = occ[0].size();
  for (const auto& o : occ) {
    std::size_t n = 0;
    while (n < shared && n < o.size() && o[n].token == occ[0][n].token) ++n;
    shared = n;
  }
  if (shared == 0) return std::nullopt;
  struct Row {
    std::vector<std::string> columns;
    std::string tail;
  };
  std::vector<Row> rows;
  for (std::size_t r = 0; r < values.size(); ++r) {
    Row row;
    std::size_t start = 0;
    for (std::size_t i = 0; i < shared; ++i) {
      row.columns.push_back(values[r].substr(start, occ[r][i].pos - start));
      start = occ[r][i].pos + occ[r][i].token.size();
    }
    std::size_t end = occ[r].size() > shared ? occ[r][shared].pos : values[r].size();
    row.columns.push_back(values[r].substr(start, end - start));
    row.tail = values[r].substr(end);
    rows.push_back(row);
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < rows[i].columns.size(); ++c) d += edit_matrix(t, rows[i].columns[c], rows[j].columns[c]);
      d += 4.0 * static_cast<double>(rows[i].tail.size() + rows[j].tail.size());
      const std::size_t len = std::max(values[i].size(), values[j].size());
      sum += len == 0 ? 0.0 : d / static_cast<double>(len);
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

struct SplitOptimum {
  std::optional<double> recursive;
  std::optional<double> vertical;
};

// Minimum objective over every delimiter and every delimiter subset.
inline SplitOptimum exhaustive_optimum(const GeneralizationTree& t, const std::vector<std::string>& values,
                                       double support) {
  const auto tokens = delimiter_tokens(values, support);
  const std::vector<std::string> all(tokens.begin(), tokens.end());
  SplitOptimum best;
  for (const auto& d : all) {
    if (auto o = recursive_objective(t, values, d)) best.recursive = std::min(best.recursive.value_or(*o), *o);
  }
  for (std::size_t mask = 1; mask < (std::size_t{1} << all.size()); ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (mask & (std::size_t{1} << i)) subset.push_back(all[i]);
    }
    if (auto o = vertical_objective(t, values, subset)) best.vertical = std::min(best.vertical.value_or(*o), *o);
  }
  return best;
}

}  // namespace patval::oracle
