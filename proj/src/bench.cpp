#include "patval/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "patval/pattern_text.hpp"
#include "patval/sampling.hpp"

namespace patval {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Structure: return "structure";
    case ErrorKind::Delete: return "delete";
    case ErrorKind::Insert: return "insert";
  }
  return "unknown";
}

void ErrorMix::validate() const {
  if (structure < 0 || del < 0 || insert < 0) throw ConfigError("error mix weights must be non-negative");
  if (std::abs(structure + del + insert - 1.0) > 1e-9) throw ConfigError("error mix weights must sum to 1");
}

namespace {

constexpr std::string_view kPunct = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

std::string corrupt_value(std::string_view v, ErrorKind& kind, std::mt19937_64& rng) {
  std::string s(v);
  if (kind == ErrorKind::Structure) {
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (is_symbol_char(static_cast<unsigned char>(s[i]))) positions.push_back(i);
    }
    if (positions.empty()) {
      kind = std::bernoulli_distribution(0.5)(rng) ? ErrorKind::Delete : ErrorKind::Insert;
    } else {
      std::size_t at = positions[uniform_index(rng, positions.size())];
      char replacement = s[at];
      while (replacement == s[at]) replacement = kPunct[uniform_index(rng, kPunct.size())];
      s[at] = replacement;
      return s;
    }
  }
  if (kind == ErrorKind::Delete && s.empty()) kind = ErrorKind::Insert;
  if (kind == ErrorKind::Delete) {
    s.erase(uniform_index(rng, s.size()), 1);
    return s;
  }
  char c = static_cast<char>(std::uniform_int_distribution<int>(0x20, 0x7e)(rng));
  s.insert(s.begin() + static_cast<std::ptrdiff_t>(uniform_index(rng, s.size() + 1)), c);
  return s;
}

std::vector<Corruption> inject_errors(const std::vector<std::string>& values, const ErrorMix& mix, std::uint64_t seed,
                                      const ValidityCheck& still_valid, std::size_t redraws) {
  mix.validate();
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> pick({mix.structure, mix.del, mix.insert});
  std::vector<Corruption> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t attempt = 0; attempt <= redraws; ++attempt) {
      ErrorKind kind = static_cast<ErrorKind>(pick(rng));
      std::string c = corrupt_value(values[i], kind, rng);
      if (still_valid && still_valid(c)) continue;
      out.push_back({std::move(c), kind, i});
      break;
    }
  }
  return out;
}

PRResult compute_precision_recall(const std::vector<Skeleton>& patterns, const std::vector<std::string>& clean,
                                  const std::vector<std::string>& corrupted) {
  PRResult r;
  if (!clean.empty()) {
    auto rep = validate_batch(patterns, clean);
    r.true_pass = rep.passed;
    r.false_reject = rep.failed;
    r.precision = static_cast<double>(rep.passed) / static_cast<double>(clean.size());
  }
  if (!corrupted.empty()) {
    auto rep = validate_batch(patterns, corrupted);
    r.true_reject = rep.failed;
    r.false_pass = rep.passed;
    r.recall = static_cast<double>(rep.failed) / static_cast<double>(corrupted.size());
  }
  return r;
}

std::vector<double> dq_simulation(const std::vector<std::string>& clean_pool, const std::vector<Skeleton>& patterns,
                                  const DqConfig& config, const ValidityCheck& still_valid) {
  if (clean_pool.size() < config.batch_size) throw ConfigError("dq_simulation: clean pool smaller than one batch");
  if (config.with_validation && patterns.empty()) throw ConfigError("dq_simulation: validation needs patterns");
  std::mt19937_64 rng(config.seed);
  double clean = static_cast<double>(config.history);
  double total = static_cast<double>(config.history);
  std::vector<double> series{total > 0 ? clean / total : 1.0};
  const std::size_t half = config.batch_size / 2;
  for (std::size_t r = 0; r < config.rounds; ++r) {
    std::vector<std::string> good;
    std::vector<std::string> sources;
    for (std::size_t i = 0; i < half; ++i) good.push_back(clean_pool[uniform_index(rng, clean_pool.size())]);
    for (std::size_t i = 0; i < config.batch_size - half; ++i) {
      sources.push_back(clean_pool[uniform_index(rng, clean_pool.size())]);
    }
    auto bad = inject_errors(sources, config.mix, rng(), still_valid);
    auto persisted = [&](const std::string& v) {
      if (!config.with_validation) return true;
      return std::any_of(patterns.begin(), patterns.end(),
                         [&](const Skeleton& k) { return skeleton_match(k, v).accepted; });
    };
    for (const auto& v : good) {
      if (persisted(v)) {
        clean += 1;
        total += 1;
      }
    }
    for (const auto& c : bad) {
      if (persisted(c.value)) total += 1;
    }
    series.push_back(total > 0 ? clean / total : 1.0);
  }
  return series;
}

namespace {

NodeId label(const GeneralizationTree& t, std::string_view name) { return *t.find_label(name); }

Skeleton class_base(const GeneralizationTree& t, std::string_view node, Repetition rep) {
  return make_base(Pattern{{make_class(t, label(t, node), rep)}});
}

std::string random_word(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  std::string w(std::uniform_int_distribution<std::size_t>(lo, hi)(rng), 'a');
  for (char& c : w) c = static_cast<char>('a' + uniform_index(rng, 26));
  return w;
}

struct Column {
  std::string name;
  std::vector<Skeleton> parts;
  std::string inner;  // punctuation used inside the column
};

Column random_column(std::mt19937_64& rng, const GeneralizationTree& t) {
  switch (uniform_index(rng, 5)) {
    case 0: {
      std::size_t lo = 1 + uniform_index(rng, 3);
      std::size_t hi = lo + uniform_index(rng, 5);
      return {"digits", {class_base(t, "DIGIT", Repetition::range(lo, hi))}, ""};
    }
    case 1:
      if (std::bernoulli_distribution(0.5)(rng)) {
        return {"word", {class_base(t, "LOWER", Repetition::range(2, 8))}, ""};
      }
      return {"name",
              {make_base(Pattern{{make_class(t, label(t, "UPPER"), Repetition::exactly(1)),
                                  make_class(t, label(t, "LOWER"), Repetition::range(2, 8))}})},
              ""};
    case 2: {
      const std::string sep(1, "-/."[uniform_index(rng, 3)]);
      auto d = [&](std::size_t n) { return make_class(t, label(t, "DIGIT"), Repetition::exactly(n)); };
      return {"date", {make_base(Pattern{{d(4), make_literal(sep), d(2), make_literal(sep), d(2)}})}, sep};
    }
    case 3:
      return {"code",
              {make_base(Pattern{{make_class(t, label(t, "UPPER"), Repetition::range(2, 3)),
                                  make_class(t, label(t, "DIGIT"), Repetition::range(2, 4))}})},
              ""};
    default: {
      std::vector<std::string> members;
      std::size_t count = 3 + uniform_index(rng, 2);
      while (members.size() < count) {
        std::string w = random_word(rng, 3, 7);
        if (std::find(members.begin(), members.end(), w) == members.end()) members.push_back(w);
      }
      return {"enum", {make_base(Pattern{{make_enum(members)}})}, ""};
    }
  }
}

}  // namespace

SyntheticDataset synthetic_dataset(std::uint64_t seed, std::size_t n) {
  const auto& t = GeneralizationTree::default_tree();
  std::mt19937_64 rng(seed);
  SyntheticDataset ds;
  std::vector<Column> cols;
  const std::size_t ncols = 1 + uniform_index(rng, 3);
  std::string used;
  for (std::size_t i = 0; i < ncols; ++i) {
    cols.push_back(random_column(rng, t));
    used += cols.back().inner;
  }
  std::string pool;
  for (char c : std::string_view(",;|:/_#@ ")) {
    if (used.find(c) == std::string::npos) pool += c;
  }
  std::vector<Skeleton> children;
  std::string name;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) {
      const char d = pool[uniform_index(rng, pool.size())];
      children.push_back(make_delimiter(std::string(1, d)));
      used += d;
      name += d;
    }
    name += cols[i].name;
    for (auto& p : cols[i].parts) children.push_back(std::move(p));
  }
  Skeleton body = children.size() == 1 ? std::move(children[0]) : make_align(std::move(children));
  if (std::bernoulli_distribution(0.3)(rng)) {
    std::string rest;
    for (char c : pool) {
      if (used.find(c) == std::string::npos) rest += c;
    }
    if (!rest.empty()) {
      const char sep = rest[uniform_index(rng, rest.size())];
      body = make_recursive(std::move(body), std::string(1, sep));
      name = "(" + name + ")" + sep + "*";
    }
  }
  ds.name = name + "#" + std::to_string(seed);
  ds.truth = std::move(body);
  for (std::size_t i = 0; i < n; ++i) ds.values.push_back(sample_string(ds.truth, t, rng));
  return ds;
}

Skeleton keys_example_truth() {
  return parse_skeleton(R"(Recursive{Align{<UPPER>+, ",", <DIGIT>+}}[";"])");
}

std::vector<std::string> keys_example_values(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> kNames = {"CSS",  "JAVA", "HTML", "SQL", "RUST",
                                                  "PERL", "GO",   "LUA",  "PHP", "RUBY"};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string v;
    const std::size_t groups = 1 + uniform_index(rng, 4);
    for (std::size_t g = 0; g < groups; ++g) {
      if (g) v += ';';
      v += kNames[uniform_index(rng, kNames.size())];
      v += ',';
      const std::size_t digits = 1 + uniform_index(rng, 6);
      for (std::size_t d = 0; d < digits; ++d) v += static_cast<char>('0' + uniform_index(rng, 10));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::string> ops_example_values(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> kObjects = {"user", "group", "table", "index"};
  std::mt19937_64 rng(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string v = std::bernoulli_distribution(0.5)(rng) ? "DELETE" : "ADD";
    v += ' ';
    v += kObjects[uniform_index(rng, kObjects.size())];
    v += ' ';
    v += std::to_string(1 + uniform_index(rng, 999));
    out.push_back(std::move(v));
  }
  return out;
}

void BenchConfig::validate() const {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) throw ConfigError("sample rate must be in (0, 1]");
  if (top_k < 1) throw ConfigError("top-k must be at least 1");
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (values_per_dataset < 2) throw ConfigError("need at least 2 values per dataset");
  mix.validate();
}

namespace {

BenchCaseResult run_case(const BenchConfig& config, std::size_t index) {
  const auto& t = GeneralizationTree::default_tree();
  const std::uint64_t seed = config.seed * 1000003ULL + index;
  SyntheticDataset ds = synthetic_dataset(seed, config.values_per_dataset);
  const std::size_t n = ds.values.size();
  const std::size_t train_n =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(config.sample_rate * static_cast<double>(n))), 1,
                              n - 1);
  std::vector<std::string> train(ds.values.begin(), ds.values.begin() + static_cast<std::ptrdiff_t>(train_n));
  std::vector<std::string> test(ds.values.begin() + static_cast<std::ptrdiff_t>(train_n), ds.values.end());

  LearnConfig lc;
  lc.extract.top_k = config.top_k;
  lc.extract.depth = config.depth;
  lc.refine = config.refine;
  auto start = std::chrono::steady_clock::now();
  LearnedPatterns learned = learn_patterns(train, t, lc);
  auto stop = std::chrono::steady_clock::now();

  BenchCaseResult res;
  res.name = ds.name;
  res.latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  if (learned.refined.empty()) {
    res.pr.false_reject = test.size();
    res.pr.precision = 0.0;
    res.pr.recall = 1.0;
    return res;
  }
  res.top_pattern = serialize_skeleton(learned.refined.front());
  const Skeleton& truth = ds.truth;
  auto bad = inject_errors(test, config.mix, seed ^ 0x9e3779b97f4a7c15ULL,
                           [&](std::string_view v) { return skeleton_match(truth, v).accepted; });
  std::vector<std::string> corrupted;
  for (auto& c : bad) corrupted.push_back(std::move(c.value));
  res.pr = compute_precision_recall(learned.refined, test, corrupted);

  SyntheticDataset other = synthetic_dataset(seed + 1, 50);
  res.cross_key_acceptance =
      static_cast<double>(validate_batch(learned.refined, other.values).passed) / static_cast<double>(50);
  return res;
}

}  // namespace

BenchSummary run_benchmark(const BenchConfig& config) {
  config.validate();
  BenchSummary s;
  s.cases.resize(config.datasets);
  std::size_t threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(config.datasets, 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.datasets; i = next++) s.cases[i] = run_case(config, i);
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  double p = 0, r = 0, l = 0;
  std::size_t np = 0, nr = 0;
  for (const auto& c : s.cases) {
    if (c.pr.precision) {
      p += *c.pr.precision;
      ++np;
    }
    if (c.pr.recall) {
      r += *c.pr.recall;
      ++nr;
    }
    l += c.latency_ms;
  }
  s.mean_precision = np ? p / static_cast<double>(np) : 0.0;
  s.mean_recall = nr ? r / static_cast<double>(nr) : 0.0;
  s.mean_latency_ms = s.cases.empty() ? 0.0 : l / static_cast<double>(s.cases.size());
  return s;
}

std::vector<SweepRow> sensitivity_sweep(const BenchConfig& base, const std::vector<double>& sample_rates,
                                        const std::vector<std::size_t>& top_ks) {
  std::vector<SweepRow> rows;
  for (double rate : sample_rates) {
    for (std::size_t k : top_ks) {
      BenchConfig c = base;
      c.sample_rate = rate;
      c.top_k = k;
      BenchSummary s = run_benchmark(c);
      rows.push_back({rate, k, s.mean_precision, s.mean_recall, s.mean_latency_ms});
    }
  }
  return rows;
}

std::string bench_results_jsonl(const BenchSummary& s) {
  std::ostringstream out;
  for (const auto& c : s.cases) {
    nlohmann::json rec = {{"name", c.name}, {"latency_ms", c.latency_ms}, {"pattern", c.top_pattern},
                          {"cross_key_acceptance", c.cross_key_acceptance}};
    rec["precision"] = c.pr.precision ? nlohmann::json(*c.pr.precision) : nlohmann::json(nullptr);
    rec["recall"] = c.pr.recall ? nlohmann::json(*c.pr.recall) : nlohmann::json(nullptr);
    out << rec.dump() << "\n";
  }
  return out.str();
}

std::string bench_summary_text(const BenchSummary& s) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "datasets: " << s.cases.size() << "\n"
      << "mean precision: " << s.mean_precision << "\n"
      << "mean recall: " << s.mean_recall << "\n"
      << std::setprecision(2) << "mean training latency: " << s.mean_latency_ms << " ms\n";
  return out.str();
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# sample_rate top_k precision recall latency_ms\n" << std::fixed;
  for (const auto& r : rows) {
    out << std::setprecision(2) << r.sample_rate << " " << r.top_k << " " << std::setprecision(4)
        << r.mean_precision << " " << r.mean_recall << " " << std::setprecision(2) << r.mean_latency_ms << "\n";
  }
  return out.str();
}

}  // namespace patval
