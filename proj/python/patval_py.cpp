#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "patval/bench.hpp"
#include "patval/gentree.hpp"
#include "patval/lifecycle.hpp"
#include "patval/pattern_text.hpp"
#include "patval/sampling.hpp"
#include "patval/store_io.hpp"

namespace py = pybind11;
using namespace patval;

namespace {

const GeneralizationTree& tree() { return GeneralizationTree::default_tree(); }

py::dict entry_dict(const ValidationEntry& e) {
  py::dict d;
  d["value"] = e.value;
  d["passed"] = e.pass;
  d["pattern"] = e.best_pattern;
  d["fail_offset"] = e.fail_offset;
  d["fail_atom_index"] = e.fail_atom_index;
  d["reason"] = e.reason;
  return d;
}

ErrorMix mix_from(const std::vector<double>& w) {
  if (w.size() != 3) throw ConfigError("mix needs three weights: structure, delete, insert");
  ErrorMix m{w[0], w[1], w[2]};
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(patval, m) {
  m.doc() = "Pattern discovery and validation for string columns";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<StoreError>(m, "StoreError", PyExc_IOError);
  py::register_exception<DatasetError>(m, "DatasetError", PyExc_IOError);

  py::class_<Skeleton>(m, "Skeleton")
      .def(py::init([](const std::string& text) { return parse_skeleton(text, tree()); }), py::arg("text"))
      .def("accepts", [](const Skeleton& k, const std::string& v) { return skeleton_match(k, v).accepted; },
           py::arg("value"))
      .def("match",
           [](const Skeleton& k, const std::string& v) {
             MatchResult r = skeleton_match(k, v);
             py::dict d;
             d["accepted"] = r.accepted;
             d["matched_len"] = r.matched_len;
             d["fail_offset"] = r.fail_offset;
             d["fail_atom_index"] = r.fail_atom_index;
             d["reason"] = r.reason;
             return d;
           },
           py::arg("value"))
      .def("sample", [](const Skeleton& k, std::uint64_t seed) { return sample_string(k, tree(), seed); },
           py::arg("seed") = 0)
      .def_property_readonly("depth", [](const Skeleton& k) { return skeleton_depth(k); })
      .def("__eq__", [](const Skeleton& a, const Skeleton& b) { return a == b; })
      .def("__str__", [](const Skeleton& k) { return serialize_skeleton(k); })
      .def("__repr__", [](const Skeleton& k) { return "Skeleton(" + quote_literal(serialize_skeleton(k)) + ")"; });

  m.def(
      "learn",
      [](const std::vector<std::string>& values, std::size_t top_k, std::size_t depth, double support, bool refine) {
        LearnConfig cfg;
        cfg.extract.top_k = top_k;
        cfg.extract.depth = depth;
        cfg.extract.delimiter_support = support;
        cfg.refine = refine;
        LearnedPatterns r = learn_patterns(values, tree(), cfg);
        py::dict d;
        d["patterns"] = r.refined;
        d["unrefined"] = r.unrefined;
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("values"), py::arg("top_k") = 3, py::arg("depth") = 3, py::arg("support") = 0.5,
      py::arg("refine") = true, "Learn up to top_k patterns from example values, best first.");

  m.def(
      "validate",
      [](const std::vector<Skeleton>& patterns, const std::vector<std::string>& values) {
        ValidationReport r = validate_batch(patterns, values);
        py::list out;
        for (const auto& e : r.entries) out.append(entry_dict(e));
        return out;
      },
      py::arg("patterns"), py::arg("values"), "Validate values; a value passes when any pattern accepts it.");

  m.def(
      "report",
      [](const std::vector<Skeleton>& patterns, const std::vector<std::string>& values, const std::string& format) {
        if (format != "text" && format != "json") throw ConfigError("format must be text or json");
        return emit_report(validate_batch(patterns, values), format == "json" ? ReportFormat::Json : ReportFormat::Text);
      },
      py::arg("patterns"), py::arg("values"), py::arg("format") = "text");

  m.def(
      "update",
      [](const std::vector<Skeleton>& patterns, const std::string& value) {
        UpdateResult r = incremental_update(patterns, value, tree());
        py::dict d;
        d["patterns"] = r.patterns;
        d["status"] = std::string(to_string(r.status));
        d["updated_pattern"] = r.updated_pattern;
        d["message"] = r.message;
        return d;
      },
      py::arg("patterns"), py::arg("value"), "Fold a confirmed-correct value into the patterns.");

  m.def(
      "boundary_examples",
      [](const Skeleton& before, const Skeleton& after, std::size_t k, std::uint64_t seed) {
        py::list out;
        for (const auto& e : generate_examples(before, after, tree(), k, seed)) {
          py::dict d;
          d["candidate"] = e.candidate;
          d["element"] = e.atom_index;
          d["sibling_class"] = e.sibling_class;
          out.append(d);
        }
        return out;
      },
      py::arg("before"), py::arg("after"), py::arg("k") = 3, py::arg("seed") = 0,
      "Strings accepted by `before` but rejected by its refinement `after`.");

  m.def(
      "char_distance", [](const std::string& a, const std::string& b) {
        if (a.size() != 1 || b.size() != 1) throw ConfigError("char_distance takes single characters");
        return pattern_based_distance(static_cast<unsigned char>(a[0]), static_cast<unsigned char>(b[0]), tree());
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "segment_distance", [](const std::string& a, const std::string& b) { return segment_distance(a, b, tree()); },
      py::arg("a"), py::arg("b"));

  m.def(
      "inject_errors",
      [](const std::vector<std::string>& values, std::uint64_t seed, const std::vector<double>& mix) {
        py::list out;
        for (const auto& c : inject_errors(values, mix_from(mix), seed)) {
          out.append(py::make_tuple(c.value, std::string(to_string(c.kind)), c.source));
        }
        return out;
      },
      py::arg("values"), py::arg("seed") = 0, py::arg("mix") = std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});

  m.def(
      "benchmark",
      [](std::size_t datasets, std::size_t values, std::uint64_t seed, double sample_rate, std::size_t top_k,
         std::size_t threads) {
        BenchConfig cfg;
        cfg.datasets = datasets;
        cfg.values_per_dataset = values;
        cfg.seed = seed;
        cfg.sample_rate = sample_rate;
        cfg.top_k = top_k;
        cfg.threads = threads;
        cfg.validate();
        BenchSummary s;
        {
          py::gil_scoped_release release;
          s = run_benchmark(cfg);
        }
        py::dict d;
        d["precision"] = s.mean_precision;
        d["recall"] = s.mean_recall;
        d["latency_ms"] = s.mean_latency_ms;
        d["datasets"] = s.cases.size();
        return d;
      },
      py::arg("datasets") = 100, py::arg("values") = 200, py::arg("seed") = 1, py::arg("sample_rate") = 0.1,
      py::arg("top_k") = 3, py::arg("threads") = 0);

  m.def(
      "synthetic_dataset",
      [](std::uint64_t seed, std::size_t n) {
        SyntheticDataset d = synthetic_dataset(seed, n);
        return py::make_tuple(d.truth, d.values);
      },
      py::arg("seed"), py::arg("n") = 200, "Returns (ground-truth skeleton, values).");
}
