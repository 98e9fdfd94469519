#include "patval/store_io.hpp"

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "patval/pattern_text.hpp"

namespace patval {

using json = nlohmann::json;

std::optional<DatasetFormat> parse_dataset_format(std::string_view name) {
  if (name == "csv") return DatasetFormat::Csv;
  if (name == "jsonl" || name == "json-lines") return DatasetFormat::JsonLines;
  if (name == "lines" || name == "txt") return DatasetFormat::Lines;
  return std::nullopt;
}

namespace {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
  std::string error;
};

std::vector<CsvRow> parse_csv_rows(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();
  auto skip_line = [&] {
    while (i < n && text[i] != '\n') ++i;
    if (i < n) {
      ++i;
      ++line;
    }
  };
  while (i < n) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < n && text[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          if (text[i] == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            closed = true;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
        if (!closed) {
          row.error = "unterminated quoted field";
          break;
        }
        if (i < n && text[i] != ',' && text[i] != '\n' && !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') &&
            !(text[i] == '\r' && i + 1 == n)) {
          row.error = "unexpected character after closing quote";
          skip_line();
          break;
        }
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n') {
          if (text[i] == '"') {
            row.error = "quote inside unquoted field";
            break;
          }
          if (text[i] == '\r' && (i + 1 == n || text[i + 1] == '\n')) {
            ++i;
            continue;
          }
          field += text[i++];
        }
        if (!row.error.empty()) {
          skip_line();
          break;
        }
      }
      row.fields.push_back(std::move(field));
      field.clear();
      if (i < n && text[i] == '\r') ++i;
      if (i >= n) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        ++i;  // newline
        ++line;
        done = true;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trimmed(std::string s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

class Ingest {
 public:
  Ingest(const LoadOptions& o, LoadResult& r) : opts_(o), res_(r) {}

  // Reports a malformed row; aborts in strict mode.
  void malformed(const std::string& what, std::size_t line) {
    if (!opts_.lenient) throw DatasetError(what, line);
    ++res_.skipped;
    res_.warnings.push_back("line " + std::to_string(line) + ": " + what + " (skipped)");
  }

  bool add(Dataset& d, std::string value, std::size_t line) {
    if (opts_.trim) value = trimmed(std::move(value));
    if (value.size() > opts_.max_value_length) {
      malformed("value of " + std::to_string(value.size()) + " characters exceeds the limit of " +
                    std::to_string(opts_.max_value_length),
                line);
      return false;
    }
    d.values.push_back(std::move(value));
    return true;
  }

 private:
  const LoadOptions& opts_;
  LoadResult& res_;
};

void load_csv(std::string_view text, const LoadOptions& o, LoadResult& res) {
  Ingest in(o, res);
  auto rows = parse_csv_rows(text);
  if (rows.empty()) throw DatasetError("empty CSV: no header row");
  if (!rows[0].error.empty()) throw DatasetError(rows[0].error, rows[0].line);
  const auto& header = rows[0].fields;
  std::size_t col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == o.column) col = c;
  }
  if (col == header.size()) {
    std::string names;
    for (const auto& h : header) names += (names.empty() ? "" : ", ") + h;
    throw DatasetError("no column '" + o.column + "'; available columns: " + names);
  }
  Dataset d;
  d.key = o.column;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (!rows[r].error.empty()) {
      in.malformed(rows[r].error, rows[r].line);
      continue;
    }
    if (rows[r].fields.size() != header.size()) {
      in.malformed("expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(rows[r].fields.size()),
                   rows[r].line);
      continue;
    }
    in.add(d, std::move(rows[r].fields[col]), rows[r].line);
  }
  res.datasets.push_back(std::move(d));
}

void load_jsonl(std::string_view text, const LoadOptions& o, const std::string& default_key, LoadResult& res) {
  Ingest in(o, res);
  std::map<std::string, std::size_t> index;
  auto dataset_for = [&](const std::string& key) -> Dataset& {
    auto it = index.find(key);
    if (it != index.end()) return res.datasets[it->second];
    index[key] = res.datasets.size();
    res.datasets.push_back(Dataset{key, {}, true});
    return res.datasets.back();
  };
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view raw = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec = json::parse(raw, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      in.malformed("not a JSON object", line);
      continue;
    }
    auto field_text = [&](const std::string& name) -> std::optional<std::string> {
      auto it = rec.find(name);
      if (it == rec.end() || it->is_null()) return std::nullopt;
      return it->is_string() ? it->get<std::string>() : it->dump();
    };
    auto value = field_text(o.value_field);
    if (!value) {
      in.malformed("missing field '" + o.value_field + "'", line);
      continue;
    }
    std::string key = default_key;
    if (!o.key_field.empty()) {
      auto k = field_text(o.key_field);
      if (!k) {
        in.malformed("missing field '" + o.key_field + "'", line);
        continue;
      }
      key = *k;
    }
    in.add(dataset_for(key), std::move(*value), line);
  }
  if (res.datasets.empty() && o.key_field.empty()) res.datasets.push_back(Dataset{default_key, {}, true});
}

void load_lines(std::string_view text, const LoadOptions& o, const std::string& default_key, LoadResult& res) {
  Ingest in(o, res);
  Dataset d;
  d.key = default_key;
  d.final_newline = !text.empty() && text.back() == '\n';
  std::size_t pos = 0;
  std::size_t line = 0;
  while (pos < text.size()) {
    ++line;
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    in.add(d, std::string(text.substr(pos, eol - pos)), line);
    pos = eol + 1;
  }
  res.datasets.push_back(std::move(d));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (auto& row : parse_csv_rows(text)) {
    if (!row.error.empty()) throw DatasetError(row.error, row.line);
    out.push_back(std::move(row.fields));
  }
  return out;
}

LoadResult parse_dataset(std::string_view text, const LoadOptions& options, const std::string& default_key) {
  LoadResult res;
  switch (options.format) {
    case DatasetFormat::Csv: load_csv(text, options, res); break;
    case DatasetFormat::JsonLines: load_jsonl(text, options, default_key, res); break;
    case DatasetFormat::Lines: load_lines(text, options, default_key, res); break;
  }
  return res;
}

LoadResult load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  return parse_dataset(read_file(path), options, path.stem().string());
}

std::string serialize_lines(const Dataset& d) {
  std::string out;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    if (i) out += '\n';
    out += d.values[i];
  }
  if (d.final_newline && !d.values.empty()) out += '\n';
  return out;
}

PatternStoreEntry& PatternStore::put(PatternStoreEntry e) {
  auto it = entries.find(e.key);
  e.version = it == entries.end() ? 1 : it->second.version + 1;
  std::string key = e.key;
  entries[key] = std::move(e);
  return entries[key];
}

const PatternStoreEntry* PatternStore::find(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

namespace {

json skeletons_to_json(const std::vector<Skeleton>& ks) {
  json arr = json::array();
  for (const auto& k : ks) arr.push_back(serialize_skeleton(k));
  return arr;
}

std::vector<Skeleton> skeletons_from_json(const json& arr, const GeneralizationTree& t, const std::string& key) {
  std::vector<Skeleton> out;
  for (const auto& p : arr) {
    try {
      out.push_back(parse_skeleton(p.get<std::string>(), t));
    } catch (const ParseError& e) {
      throw StoreError(StoreError::Kind::Schema, "entry '" + key + "': bad pattern: " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string store_to_json(const PatternStore& s) {
  json entries = json::object();
  for (const auto& [key, e] : s.entries) {
    json fb = json::array();
    for (const auto& r : e.feedback) {
      fb.push_back({{"value", r.value},
                    {"verdict", r.verdict == Verdict::ConfirmedCorrect ? "correct" : "error"},
                    {"timestamp", r.timestamp}});
    }
    entries[key] = {{"version", e.version},
                    {"patterns", skeletons_to_json(e.patterns)},
                    {"unrefined", skeletons_to_json(e.unrefined)},
                    {"created_at", e.created_at},
                    {"training_count", e.training_count},
                    {"augment_rounds", e.augment_rounds},
                    {"negatives", e.negatives},
                    {"feedback", fb}};
  }
  json doc = {{"format", "patval-store"}, {"format_version", 1}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

PatternStore store_from_json(std::string_view text, const GeneralizationTree& t) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StoreError(StoreError::Kind::Parse, std::string("store parse error: ") + e.what(), e.byte);
  }
  PatternStore s;
  try {
    if (doc.value("format", "") != "patval-store") {
      throw StoreError(StoreError::Kind::Schema, "not a pattern store document");
    }
    for (const auto& [key, e] : doc.at("entries").items()) {
      PatternStoreEntry entry;
      entry.key = key;
      entry.version = e.at("version").get<std::int64_t>();
      entry.patterns = skeletons_from_json(e.at("patterns"), t, key);
      entry.unrefined = skeletons_from_json(e.value("unrefined", json::array()), t, key);
      entry.created_at = e.value("created_at", std::int64_t{0});
      entry.training_count = e.value("training_count", std::size_t{0});
      entry.augment_rounds = e.value("augment_rounds", std::size_t{0});
      entry.negatives = e.value("negatives", std::vector<std::string>{});
      for (const auto& r : e.value("feedback", json::array())) {
        const std::string verdict = r.at("verdict").get<std::string>();
        if (verdict != "correct" && verdict != "error") {
          throw StoreError(StoreError::Kind::Schema, "entry '" + key + "': bad verdict '" + verdict + "'");
        }
        entry.feedback.push_back({r.at("value").get<std::string>(),
                                  verdict == "correct" ? Verdict::ConfirmedCorrect : Verdict::ConfirmedError,
                                  r.at("timestamp").get<std::int64_t>()});
      }
      s.entries[key] = std::move(entry);
    }
  } catch (const json::exception& e) {
    throw StoreError(StoreError::Kind::Schema, std::string("store schema error: ") + e.what());
  }
  return s;
}

PatternStore load_store(const std::filesystem::path& path, const GeneralizationTree& t) {
  if (!std::filesystem::exists(path)) return {};
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::system_error& e) {
    throw StoreError(StoreError::Kind::Io, e.what());
  }
  return store_from_json(text, t);
}

void save_store(const std::filesystem::path& path, const PatternStore& s, const GeneralizationTree& t) {
  PatternStore merged = s;
  if (std::filesystem::exists(path)) {
    PatternStore disk = load_store(path, t);
    for (const auto& [key, e] : disk.entries) {
      auto it = merged.entries.find(key);
      if (it == merged.entries.end()) {
        merged.entries[key] = e;
        continue;
      }
      if (e.version > it->second.version || (e.version == it->second.version && !(e == it->second))) {
        throw StoreError(StoreError::Kind::Conflict, "version conflict on key '" + key + "': store has version " +
                                                         std::to_string(e.version) + ", saving version " +
                                                         std::to_string(it->second.version));
      }
    }
  }
  const std::string tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError(StoreError::Kind::Io, "cannot write " + tmp);
    out << store_to_json(merged);
    out.flush();
    if (!out) throw StoreError(StoreError::Kind::Io, "write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw StoreError(StoreError::Kind::Io, "cannot replace " + path.string() + ": " + ec.message());
  }
}

std::filesystem::path default_store_path() {
  if (const char* env = std::getenv("PATVAL_STORE"); env && *env) return env;
  return "patval_store.json";
}

namespace {

// Printable form of a value and the display column of byte `offset`.
std::pair<std::string, std::size_t> displayed(std::string_view v, std::size_t offset) {
  std::string out;
  std::size_t column = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i == offset) column = out.size();
    unsigned char c = static_cast<unsigned char>(v[i]);
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else if (c == '\t') {
      out += "\\t";
    } else if (c < 0x20 || c == 0x7f) {
      static const char* hex = "0123456789abcdef";
      out += "\\x";
      out += hex[c >> 4];
      out += hex[c & 15];
    } else {
      out += static_cast<char>(c);
    }
  }
  if (offset >= v.size()) column = out.size();
  return {out, column};
}

}  // namespace

std::string emit_report(const ValidationReport& r, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Json) {
    for (const auto& e : r.entries) {
      json rec = {{"value", e.value}, {"verdict", e.pass ? "pass" : "fail"}, {"pattern", e.best_pattern}};
      rec["fail_offset"] = e.fail_offset ? json(*e.fail_offset) : json(nullptr);
      rec["fail_atom_index"] = e.fail_atom_index ? json(*e.fail_atom_index) : json(nullptr);
      rec["reason"] = e.reason;
      out << rec.dump() << "\n";
    }
    return out.str();
  }
  out << "validated " << r.entries.size() << " values: " << r.passed << " passed, " << r.failed << " failed\n";
  for (const auto& e : r.entries) {
    auto [shown, column] = displayed(e.value, e.fail_offset.value_or(0));
    out << (e.pass ? "PASS  " : "FAIL  ") << shown << "\n";
    if (e.pass) continue;
    out << "      " << std::string(column, ' ') << "^ offset " << *e.fail_offset << ", pattern " << e.best_pattern;
    if (e.fail_atom_index) out << ", atom " << *e.fail_atom_index;
    out << ": " << e.reason << "\n";
  }
  return out.str();
}

}  // namespace patval
