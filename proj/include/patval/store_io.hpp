#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "patval/lifecycle.hpp"

namespace patval {

struct Dataset {
  std::string key;
  std::vector<std::string> values;
  /// Whether the source ended with a newline (`lines` format only).
  bool final_newline = true;
};

enum class DatasetFormat { Csv, JsonLines, Lines };

struct LoadOptions {
  DatasetFormat format = DatasetFormat::Lines;
  /// CSV column name.
  std::string column;
  /// JSON-lines fields; an empty key field puts every record under one key.
  std::string key_field;
  std::string value_field = "value";
  /// Skip malformed rows instead of aborting.
  bool lenient = false;
  std::size_t max_value_length = 10000;
  bool trim = false;
};

class DatasetError : public std::runtime_error {
 public:
  DatasetError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct LoadResult {
  std::vector<Dataset> datasets;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

std::optional<DatasetFormat> parse_dataset_format(std::string_view name);

/// CSV and `lines` give one dataset keyed by the column name (or file stem);
/// JSON-lines with a key field gives one dataset per key in first-seen order.
LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options);
LoadResult parse_dataset(std::string_view text, const LoadOptions& options, const std::string& default_key);

/// RFC 4180 record splitter. Throws DatasetError on an unterminated quote or
/// stray quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);
std::string serialize_lines(const Dataset& d);

struct PatternStoreEntry {
  std::string key;
  std::int64_t version = 0;
  /// Active (refined) patterns, best first.
  std::vector<Skeleton> patterns;
  /// The same patterns before refinement, used for augmentation.
  std::vector<Skeleton> unrefined;
  std::int64_t created_at = 0;
  std::size_t training_count = 0;
  std::size_t augment_rounds = 0;
  std::vector<std::string> negatives;
  std::vector<FeedbackRecord> feedback;
  friend bool operator==(const PatternStoreEntry&, const PatternStoreEntry&) = default;
};

struct PatternStore {
  std::map<std::string, PatternStoreEntry> entries;
  friend bool operator==(const PatternStore&, const PatternStore&) = default;

  /// Inserts or replaces the entry for `e.key` with the next version.
  PatternStoreEntry& put(PatternStoreEntry e);
  const PatternStoreEntry* find(const std::string& key) const;
};

class StoreError : public std::runtime_error {
 public:
  enum class Kind { Io, Parse, Conflict, Schema };
  StoreError(Kind kind, const std::string& what, std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(what), kind_(kind), offset_(offset) {}
  Kind kind() const { return kind_; }
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  Kind kind_;
  std::optional<std::size_t> offset_;
};

std::string store_to_json(const PatternStore& s);
PatternStore store_from_json(std::string_view text, const GeneralizationTree& t = GeneralizationTree::default_tree());

/// A missing file loads as an empty store.
PatternStore load_store(const std::filesystem::path& path,
                        const GeneralizationTree& t = GeneralizationTree::default_tree());
/// Writes through a temporary file and rename. Rejects the save when the
/// file holds a newer version of a key, or the same version with different
/// content. Keys only present on disk are kept.
void save_store(const std::filesystem::path& path, const PatternStore& s,
                const GeneralizationTree& t = GeneralizationTree::default_tree());

/// $PATVAL_STORE, else "patval_store.json".
std::filesystem::path default_store_path();

enum class ReportFormat { Text, Json };

std::string emit_report(const ValidationReport& r, ReportFormat format);

}  // namespace patval
