#include "patval/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "patval/bench.hpp"
#include "patval/pattern_text.hpp"
#include "patval/store_io.hpp"

namespace patval {

namespace {

struct InputOptions {
  std::string path;
  std::string format;
  std::string column;
  std::string key_field;
  std::string value_field = "value";
  bool lenient = false;
  bool trim = false;
  std::size_t max_length = 10000;

  void bind(CLI::App* app, bool required) {
    auto* opt = app->add_option("--input,-i", path, "Input file");
    if (required) opt->required();
    app->add_option("--format", format, "csv, jsonl or lines (default: from the file extension)")
        ->check(CLI::IsMember({"csv", "jsonl", "lines"}));
    app->add_option("--column", column, "CSV column holding the values");
    app->add_option("--key-field", key_field, "JSON-lines field naming the key");
    app->add_option("--value-field", value_field, "JSON-lines field holding the value");
    app->add_flag("--lenient", lenient, "Skip malformed rows instead of aborting");
    app->add_flag("--trim", trim, "Trim surrounding whitespace from values");
    app->add_option("--max-length", max_length, "Reject values longer than this");
  }

  LoadResult load() const {
    LoadOptions o;
    std::string fmt = format;
    if (fmt.empty()) {
      const auto ext = std::filesystem::path(path).extension().string();
      fmt = ext == ".csv" ? "csv" : (ext == ".jsonl" || ext == ".ndjson") ? "jsonl" : "lines";
    }
    o.format = *parse_dataset_format(fmt);
    if (o.format == DatasetFormat::Csv && column.empty()) throw ConfigError("--column is required for CSV input");
    o.column = column;
    o.key_field = key_field;
    o.value_field = value_field;
    o.lenient = lenient;
    o.trim = trim;
    o.max_value_length = max_length;
    return load_dataset(path, o);
  }
};

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::vector<FeedbackRecord> read_feedback_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot read " + path);
  std::vector<FeedbackRecord> out;
  std::string line;
  std::size_t n = 0;
  const std::int64_t base = now_ms();
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DatasetError("expected value<TAB>y|n", n);
    const std::string verdict = line.substr(tab + 1);
    if (verdict != "y" && verdict != "n") throw DatasetError("verdict must be y or n, got '" + verdict + "'", n);
    out.push_back({line.substr(0, tab), verdict == "y" ? Verdict::ConfirmedCorrect : Verdict::ConfirmedError,
                   base + static_cast<std::int64_t>(n)});
  }
  return out;
}

void print_patterns(std::ostream& out, const PatternStoreEntry& e) {
  for (std::size_t i = 0; i < e.patterns.size(); ++i) {
    out << "  [" << i << "] " << serialize_skeleton(e.patterns[i]) << "\n";
  }
}

std::string element_text(const ElementRef& e) {
  switch (e.kind) {
    case ElementRef::Kind::Atom: return "atom " + serialize_atom(*e.atom_ptr);
    case ElementRef::Kind::Delimiter: return "delimiter " + quote_literal(e.literal);
    case ElementRef::Kind::Separator: return "separator " + quote_literal(e.literal);
  }
  return {};
}

class Cli {
 public:
  Cli(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out_(out), err_(err) {}

  int run(const std::vector<std::string>& args) {
    CLI::App app{"Learn and enforce string patterns for data columns", "patval"};
    app.set_config("--config", "", "Read options from a TOML/INI file");
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.add_option("--store,-s", store_path_, "Pattern store file (default: $PATVAL_STORE or patval_store.json)");
    app.add_option("--tree", tree_path_, "Generalization tree file");

    auto* train = app.add_subcommand("train", "Learn patterns from a dataset and save them");
    InputOptions train_in;
    train_in.bind(train, true);
    train->add_option("--out,-o", store_path_, "Pattern store file to write");
    train->add_option("--key,-k", key_, "Store key (default: dataset key)");
    train->add_option("--top-k", top_k_, "Patterns kept per key")->check(CLI::PositiveNumber);
    train->add_option("--depth", depth_, "Maximum skeleton nesting")->check(CLI::PositiveNumber);
    train->add_option("--support", support_, "Minimum delimiter support")->check(CLI::Range(0.0, 1.0));
    train->add_flag("--no-refine", no_refine_, "Skip fine-grained refinement");

    auto* validate = app.add_subcommand("validate", "Check a batch against stored patterns");
    InputOptions val_in;
    val_in.bind(validate, true);
    validate->add_option("--key,-k", key_, "Store key (default: dataset key)");
    validate->add_option("--report", report_format_, "text or json")->check(CLI::IsMember({"text", "json"}));
    validate->add_option("--report-out", report_out_, "Write the report to a file");

    auto* update = app.add_subcommand("update", "Fold confirmed values and feedback into stored patterns");
    update->add_option("--key,-k", key_, "Store key")->required();
    update->add_option("--value,-v", values_, "Value confirmed correct");
    update->add_option("--feedback,-f", feedback_path_, "Feedback file: value<TAB>y|n per line");

    auto* augment = app.add_subcommand("augment", "Ask about boundary examples of refined patterns");
    augment->add_option("--key,-k", key_, "Store key")->required();
    augment->add_option("--budget", budget_, "Examples per refined atom");
    augment->add_option("--seed", seed_, "Random seed");
    augment->add_option("--feedback,-f", feedback_path_, "Verdict file: value<TAB>y|n per line");
    augment->add_flag("--interactive", interactive_, "Prompt for y/n on the terminal");

    auto* bench = app.add_subcommand("bench", "Run the synthetic precision/recall benchmark");
    BenchConfig bc;
    std::vector<double> mix;
    std::string results_path, sweep_path;
    bool sweep = false, dq = false;
    bench->add_option("--datasets", bc.datasets, "Number of synthetic datasets");
    bench->add_option("--values", bc.values_per_dataset, "Values per dataset");
    bench->add_option("--seed", bc.seed, "Random seed");
    bench->add_option("--sample-rate", bc.sample_rate, "Fraction of each dataset used for training");
    bench->add_option("--top-k", bc.top_k, "Patterns kept per dataset");
    bench->add_option("--depth", bc.depth, "Maximum skeleton nesting");
    bench->add_option("--threads", bc.threads, "Worker threads (0: all cores)");
    bench->add_option("--mix", mix, "Error weights: structure,delete,insert")->expected(3)->delimiter(',');
    bench->add_flag("--no-refine", no_refine_, "Skip fine-grained refinement");
    bench->add_option("--results", results_path, "Write one JSON record per dataset");
    bench->add_flag("--sweep", sweep, "Sweep sample rate and top-k");
    bench->add_option("--sweep-out", sweep_path, "Write the sweep table (gnuplot data)");
    bench->add_flag("--dq", dq, "Run the data-quality simulation");

    auto* explain = app.add_subcommand("explain", "Show stored patterns and how values match them");
    explain->add_option("--key,-k", key_, "Store key")->required();
    explain->add_option("--value,-v", values_, "Value to trace");

    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }

    try {
      if (!tree_path_.empty()) tree_ = GeneralizationTree::load(tree_path_);
      if (store_path_.empty()) store_path_ = default_store_path().string();
      if (*train) return run_train(train_in);
      if (*validate) return run_validate(val_in);
      if (*update) return run_update();
      if (*augment) return run_augment();
      if (*bench) {
        if (!mix.empty()) bc.mix = {mix[0], mix[1], mix[2]};
        bc.refine = !no_refine_;
        return run_bench(bc, results_path, sweep, sweep_path, dq);
      }
      if (*explain) return run_explain();
    } catch (const ConfigError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const TreeError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const DatasetError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const StoreError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::system_error& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitIo;
    }
    return kExitUsage;
  }

 private:
  const GeneralizationTree& tree() const { return tree_ ? *tree_ : GeneralizationTree::default_tree(); }

  PatternStore load() { return load_store(store_path_, tree()); }

  PatternStoreEntry& entry(PatternStore& s) {
    auto it = s.entries.find(key_);
    if (it == s.entries.end()) throw ConfigError("no patterns stored for key '" + key_ + "' in " + store_path_);
    return it->second;
  }

  int run_train(const InputOptions& input) {
    LoadResult data = input.load();
    for (const auto& w : data.warnings) err_ << "warning: " << w << "\n";
    if (!key_.empty() && data.datasets.size() > 1) throw ConfigError("--key needs a single dataset");
    LearnConfig lc;
    if (top_k_) lc.extract.top_k = *top_k_;
    if (depth_) lc.extract.depth = *depth_;
    if (support_) lc.extract.delimiter_support = *support_;
    lc.refine = !no_refine_;
    PatternStore store = load();
    for (const auto& d : data.datasets) {
      if (d.values.empty()) throw ConfigError("dataset '" + d.key + "' has no values to learn from");
      LearnedPatterns learned = learn_patterns(d.values, tree(), lc);
      for (const auto& w : learned.warnings) err_ << "warning: " << w << "\n";
      PatternStoreEntry e;
      e.key = key_.empty() ? d.key : key_;
      if (const auto* old = store.find(e.key)) {
        e.negatives = old->negatives;
        e.feedback = old->feedback;
        e.augment_rounds = old->augment_rounds;
      }
      e.patterns = learned.refined;
      e.unrefined = learned.unrefined;
      e.created_at = now_ms() / 1000;
      e.training_count = d.values.size();
      const auto& saved = store.put(std::move(e));
      out_ << "key " << saved.key << " (version " << saved.version << ", " << saved.training_count << " values)\n";
      print_patterns(out_, saved);
    }
    save_store(store_path_, store, tree());
    return kExitOk;
  }

  int run_validate(const InputOptions& input) {
    LoadResult data = input.load();
    for (const auto& w : data.warnings) err_ << "warning: " << w << "\n";
    PatternStore store = load();
    const ReportFormat fmt = report_format_ == "json" ? ReportFormat::Json : ReportFormat::Text;
    std::ofstream file;
    if (!report_out_.empty()) {
      file.open(report_out_);
      if (!file) throw std::system_error(errno, std::generic_category(), "cannot write " + report_out_);
    }
    std::ostream& dst = report_out_.empty() ? out_ : file;
    bool failures = false;
    const std::string fixed_key = key_;
    for (const auto& d : data.datasets) {
      key_ = fixed_key.empty() ? d.key : fixed_key;
      ValidationReport r = validate_batch(entry(store).patterns, d.values);
      failures = failures || r.failed > 0;
      if (fmt == ReportFormat::Text && data.datasets.size() > 1) dst << "key " << key_ << "\n";
      dst << emit_report(r, fmt);
    }
    return failures ? kExitValidationFailed : kExitOk;
  }

  int apply_records(PatternStore& store, const std::vector<FeedbackRecord>& records) {
    PatternStoreEntry& e = entry(store);
    PatternSet state{e.patterns, e.negatives, e.feedback};
    FeedbackOutcome res = apply_feedback(state, records, tree());
    for (const auto& w : res.warnings) err_ << "warning: " << w << "\n";
    for (const auto& r : records) {
      const bool relearn =
          std::find(res.needs_relearn.begin(), res.needs_relearn.end(), r.value) != res.needs_relearn.end();
      const char* what = r.verdict == Verdict::ConfirmedError ? "recorded as error"
                         : relearn                            ? "needs relearn"
                                                              : "accepted";
      out_ << quote_literal(r.value) << ": " << what << "\n";
    }
    PatternStoreEntry next = e;
    next.patterns = std::move(res.state.patterns);
    next.negatives = std::move(res.state.negatives);
    next.feedback = std::move(res.state.feedback);
    const auto& saved = store.put(std::move(next));
    out_ << "key " << saved.key << " now at version " << saved.version << "\n";
    print_patterns(out_, saved);
    save_store(store_path_, store, tree());
    return res.needs_relearn.empty() ? kExitOk : kExitValidationFailed;
  }

  int run_update() {
    std::vector<FeedbackRecord> records;
    const std::int64_t ts = now_ms();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      records.push_back({values_[i], Verdict::ConfirmedCorrect, ts + static_cast<std::int64_t>(i)});
    }
    if (!feedback_path_.empty()) {
      auto more = read_feedback_file(feedback_path_);
      records.insert(records.end(), more.begin(), more.end());
    }
    if (records.empty()) throw ConfigError("update needs --value or --feedback");
    PatternStore store = load();
    return apply_records(store, records);
  }

  int run_augment() {
    PatternStore store = load();
    PatternStoreEntry& e = entry(store);
    if (e.augment_rounds >= kAugmentRounds) {
      out_ << "augmentation is limited to the first " << kAugmentRounds << " rounds; key " << key_
           << " has used them\n";
      return kExitOk;
    }
    std::vector<AugmentExample> examples;
    for (std::size_t i = 0; i < std::min(e.patterns.size(), e.unrefined.size()); ++i) {
      auto ex = generate_examples(e.unrefined[i], e.patterns[i], tree(), budget_, seed_ + i);
      examples.insert(examples.end(), ex.begin(), ex.end());
    }
    if (examples.empty()) {
      out_ << "no boundary examples: refinement did not specialize any atom\n";
      return kExitOk;
    }
    std::vector<FeedbackRecord> records;
    if (interactive_) {
      const std::int64_t ts = now_ms();
      for (std::size_t i = 0; i < examples.size(); ++i) {
        out_ << quote_literal(examples[i].candidate) << " (" << examples[i].sibling_class
             << ") is valid data? [y/n] " << std::flush;
        std::string answer;
        if (!std::getline(in_, answer)) break;
        if (answer == "y" || answer == "n") {
          records.push_back({examples[i].candidate,
                             answer == "y" ? Verdict::ConfirmedCorrect : Verdict::ConfirmedError,
                             ts + static_cast<std::int64_t>(i)});
        }
      }
    } else if (!feedback_path_.empty()) {
      records = read_feedback_file(feedback_path_);
    } else {
      for (const auto& ex : examples) {
        out_ << ex.candidate << "\tpending\t" << ex.sibling_class << "\telement " << ex.atom_index << "\n";
      }
      return kExitOk;
    }
    e.augment_rounds += 1;
    return apply_records(store, records);
  }

  int run_bench(const BenchConfig& bc, const std::string& results_path, bool sweep, const std::string& sweep_path,
                bool dq) {
    bc.validate();
    BenchSummary s = run_benchmark(bc);
    out_ << bench_summary_text(s);
    if (!results_path.empty()) {
      std::ofstream f(results_path);
      if (!f) throw std::system_error(errno, std::generic_category(), "cannot write " + results_path);
      f << bench_results_jsonl(s);
    }
    if (sweep) {
      auto rows = sensitivity_sweep(bc, {0.05, 0.1, 0.2, 0.4}, {1, 3, 5, 10});
      const std::string table = sweep_table(rows);
      out_ << table;
      if (!sweep_path.empty()) {
        std::ofstream f(sweep_path);
        if (!f) throw std::system_error(errno, std::generic_category(), "cannot write " + sweep_path);
        f << table;
      }
    }
    if (dq) {
      const auto pool = keys_example_values(200, bc.seed);
      std::vector<std::string> train(pool.begin(), pool.begin() + 20);
      LearnConfig lc;
      lc.refine = bc.refine;
      const auto learned = learn_patterns(train, tree(), lc);
      const Skeleton truth = keys_example_truth();
      auto still_valid = [&](std::string_view v) { return skeleton_match(truth, v).accepted; };
      DqConfig with;
      with.seed = bc.seed;
      DqConfig without = with;
      without.with_validation = false;
      const auto a = dq_simulation(pool, learned.refined, with, still_valid);
      const auto b = dq_simulation(pool, learned.refined, without, still_valid);
      out_ << "# round dq_with_validation dq_without_validation\n";
      for (std::size_t r = 0; r < a.size(); ++r) out_ << r << " " << a[r] << " " << b[r] << "\n";
    }
    return kExitOk;
  }

  int run_explain() {
    PatternStore store = load();
    const PatternStoreEntry& e = entry(store);
    out_ << "key " << e.key << " version " << e.version << " trained on " << e.training_count << " values\n";
    for (std::size_t i = 0; i < e.patterns.size(); ++i) {
      out_ << "[" << i << "] " << serialize_skeleton(e.patterns[i]) << "\n";
      const auto elems = flatten_elements(e.patterns[i]);
      for (std::size_t j = 0; j < elems.size(); ++j) out_ << "    " << j << ": " << element_text(elems[j]) << "\n";
    }
    for (const auto& v : values_) {
      out_ << "value " << quote_literal(v) << "\n";
      for (std::size_t i = 0; i < e.patterns.size(); ++i) {
        std::vector<ElementSpan> trace;
        MatchResult r = skeleton_match(e.patterns[i], v, &trace);
        if (r.accepted) {
          out_ << "  [" << i << "] accepted:";
          for (const auto& s : trace) {
            out_ << " " << s.element << "=" << quote_literal(v.substr(s.begin, s.end - s.begin));
          }
          out_ << "\n";
        } else {
          out_ << "  [" << i << "] rejected at offset " << *r.fail_offset;
          if (r.fail_atom_index) out_ << ", element " << *r.fail_atom_index;
          out_ << ": " << r.reason << "\n";
        }
      }
    }
    return kExitOk;
  }

  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<GeneralizationTree> tree_;
  std::string store_path_;
  std::string tree_path_;
  std::string key_;
  std::optional<std::size_t> top_k_;
  std::optional<std::size_t> depth_;
  std::optional<double> support_;
  bool no_refine_ = false;
  std::string report_format_ = "text";
  std::string report_out_;
  std::vector<std::string> values_;
  std::string feedback_path_;
  std::size_t budget_ = 3;
  std::uint64_t seed_ = 1;
  bool interactive_ = false;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  return Cli(in, out, err).run(args);
}

}  // namespace patval
