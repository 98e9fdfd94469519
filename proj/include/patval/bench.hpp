#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "patval/lifecycle.hpp"

namespace patval {

enum class ErrorKind { Structure, Delete, Insert };
const char* to_string(ErrorKind k);

/// Relative weights of the three corruption kinds.
struct ErrorMix {
  double structure = 1.0 / 3;
  double del = 1.0 / 3;
  double insert = 1.0 / 3;
  /// Throws ConfigError unless the weights are non-negative and sum to 1.
  void validate() const;
};

struct Corruption {
  std::string value;
  ErrorKind kind = ErrorKind::Delete;
  std::size_t source = 0;
};

/// One corruption of `v`. Structure swaps one punctuation/space character
/// for a different punctuation character; values without one get a delete
/// or insert instead and `kind` is updated. The result always differs from `v`.
std::string corrupt_value(std::string_view v, ErrorKind& kind, std::mt19937_64& rng);

/// Predicate telling whether a string still belongs to the clean data.
using ValidityCheck = std::function<bool(std::string_view)>;

/// One corruption per value, kinds drawn from `mix`. When `still_valid` is
/// given, corruptions it accepts are redrawn up to `redraws` times and
/// dropped if every draw stays valid.
std::vector<Corruption> inject_errors(const std::vector<std::string>& values, const ErrorMix& mix, std::uint64_t seed,
                                      const ValidityCheck& still_valid = {}, std::size_t redraws = 16);

struct PRResult {
  /// Fraction of clean values accepted; nullopt without clean values.
  std::optional<double> precision;
  /// Fraction of corrupted values rejected; nullopt without corrupted values.
  std::optional<double> recall;
  std::size_t true_pass = 0;
  std::size_t false_reject = 0;
  std::size_t true_reject = 0;
  std::size_t false_pass = 0;
};

PRResult compute_precision_recall(const std::vector<Skeleton>& patterns, const std::vector<std::string>& clean,
                                  const std::vector<std::string>& corrupted);

struct DqConfig {
  std::size_t rounds = 50;
  std::size_t batch_size = 10;
  /// Clean values already persisted before the first round.
  std::size_t history = 100;
  bool with_validation = true;
  std::uint64_t seed = 0;
  ErrorMix mix;
};

/// Persisted-data quality per round, index 0 being the initial history.
/// Each round draws half the batch clean from the pool and corrupts the
/// other half; with validation only accepted values are persisted.
std::vector<double> dq_simulation(const std::vector<std::string>& clean_pool, const std::vector<Skeleton>& patterns,
                                  const DqConfig& config, const ValidityCheck& still_valid = {});

struct SyntheticDataset {
  std::string name;
  Skeleton truth;
  std::vector<std::string> values;
};

/// Random-style column: 1 to 3 column generators (digits, words, dates,
/// codes, small enums) joined by random delimiters, optionally repeated
/// under a separator.
SyntheticDataset synthetic_dataset(std::uint64_t seed, std::size_t n);

/// Letters "," digits groups joined by ";", e.g. "CSS,12345;JAVA,4567".
Skeleton keys_example_truth();
std::vector<std::string> keys_example_values(std::size_t n, std::uint64_t seed);

/// Operation log lines starting with DELETE or ADD.
std::vector<std::string> ops_example_values(std::size_t n, std::uint64_t seed);

struct BenchConfig {
  double sample_rate = 0.10;
  std::size_t top_k = 3;
  std::size_t depth = 3;
  std::uint64_t seed = 1;
  ErrorMix mix;
  std::size_t datasets = 100;
  std::size_t values_per_dataset = 200;
  bool refine = true;
  std::size_t threads = 0;
  /// Throws ConfigError on an out-of-range field.
  void validate() const;
};

struct BenchCaseResult {
  std::string name;
  PRResult pr;
  double latency_ms = 0.0;
  std::string top_pattern;
  /// Fraction of the next dataset's values accepted (reported, not judged).
  double cross_key_acceptance = 0.0;
};

struct BenchSummary {
  std::vector<BenchCaseResult> cases;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_latency_ms = 0.0;
};

BenchSummary run_benchmark(const BenchConfig& config);

struct SweepRow {
  double sample_rate = 0.0;
  std::size_t top_k = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_latency_ms = 0.0;
};

std::vector<SweepRow> sensitivity_sweep(const BenchConfig& base, const std::vector<double>& sample_rates,
                                        const std::vector<std::size_t>& top_ks);

/// One JSON record per dataset: name, precision, recall, latency_ms.
std::string bench_results_jsonl(const BenchSummary& s);
std::string bench_summary_text(const BenchSummary& s);
/// Whitespace-separated table with a `#` header, readable by gnuplot.
std::string sweep_table(const std::vector<SweepRow>& rows);

}  // namespace patval
