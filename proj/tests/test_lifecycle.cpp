#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>

#include "lifecycle_scenarios.hpp"
#include "patval/lifecycle.hpp"
#include "patval/pattern_text.hpp"

using namespace patval;

namespace {

const GeneralizationTree& tree() { return GeneralizationTree::default_tree(); }
Skeleton parse(std::string_view s) { return parse_skeleton(s, tree()); }
Skeleton keys() { return parse(R"(Recursive{Align{<UPPER>+, ",", <DIGIT>+}}[";"])"); }
Pattern pat(std::string_view s) { return std::get<BaseNode>(parse(s).node).pattern; }

}  // namespace

TEST_CASE("learn patterns") {
  SUBCASE("keys") {
    auto values = keys_example_values(24, 4);
    auto learned = learn_patterns(values, tree());
    REQUIRE(!learned.refined.empty());
    CHECK(learned.refined.front() == keys_example_truth());
    CHECK(learned.refined.size() <= 3);
    CHECK(learned.unrefined.size() == learned.refined.size());
  }
  SUBCASE("ops") {
    auto values = ops_example_values(24, 4);
    auto learned = learn_patterns(values, tree());
    REQUIRE(!learned.refined.empty());
    const std::string top = serialize_skeleton(learned.refined.front());
    CHECK(top.find(R"(Enum{"DELETE","ADD"})") != std::string::npos);
    CHECK(top.find("<") > top.find("Enum"));
    CHECK_FALSE(testgen::any_accepts(learned.refined, "KILL user 3"));
  }
  SUBCASE("no refinement") {
    LearnConfig cfg;
    cfg.refine = false;
    auto learned = learn_patterns(keys_example_values(20, 1), tree(), cfg);
    CHECK(learned.refined == learned.unrefined);
  }
}

TEST_CASE("validate batch") {
  std::vector<Skeleton> ps{keys()};
  auto report = validate_batch(ps, {"CSS,12345;JAVA,4567", "CSS,12345:JAVA"});
  REQUIRE(report.entries.size() == 2);
  CHECK(report.passed == 1);
  CHECK(report.failed == 1);
  CHECK(report.entries[0].pass);
  CHECK_FALSE(report.entries[1].pass);
  CHECK(report.entries[1].fail_offset == 9u);
  CHECK(!report.entries[1].reason.empty());

  auto empty = validate_batch(ps, {});
  CHECK(empty.entries.empty());
  CHECK(empty.passed + empty.failed == 0);
  CHECK_THROWS_AS(validate_batch({}, {"x"}), ConfigError);

  SUBCASE("pass if any and deepest progress") {
    std::vector<Skeleton> two{parse("<DIGIT>+"), parse(R"(<UPPER>+ "-" <DIGIT>+)")};
    auto r = validate_batch(two, {"AB-1", "AB-x", "7"});
    CHECK(r.entries[0].pass);
    CHECK(r.entries[0].best_pattern == 1);
    CHECK(r.entries[2].best_pattern == 0);
    CHECK_FALSE(r.entries[1].pass);
    CHECK(r.entries[1].best_pattern == 1);
    CHECK(r.entries[1].fail_offset == 3u);
  }
}

TEST_CASE("generalize pattern") {
  const auto& t = tree();
  CHECK(serialize_pattern(*generalize_pattern(pat("<DIGIT>+"), "12a3", t)) == "<ALNUM>+");
  CHECK(serialize_pattern(*generalize_pattern(pat("<DIGIT>{3}"), "12", t)) == "<DIGIT>{2,3}");
  CHECK(serialize_pattern(*generalize_pattern(pat(R"(Enum{"DELETE","ADD"} " " <LOWER>+)"), "DROP x", t)) ==
        R"(Enum{"DELETE","DROP","ADD"} " " <LOWER>+)");
  CHECK(serialize_pattern(*generalize_pattern(pat(R"(<DIGIT>+ <LOWER>+)"), "1a1", t)) == "<DIGIT>+ <ALNUM>+");
  CHECK_FALSE(generalize_pattern(pat(R"(<DIGIT>+ <LOWER>+)"), "1", t));
}

TEST_CASE("widening safety") {
  CHECK(widening_is_safe(pat("<DIGIT>+"), pat("<ALNUM>+")));
  CHECK_FALSE(widening_is_safe(pat("<ALNUM>+"), pat("<DIGIT>+")));
  CHECK_FALSE(widening_is_safe(pat(R"(<DIGIT>+ <LOWER>+)"), pat(R"(<ALNUM>+ <LOWER>+)")));
  CHECK(widening_is_safe(pat(R"(<DIGIT>+ "-")"), pat(R"(<ALNUM>+ "-")")));
  CHECK_FALSE(widening_is_safe(pat(R"(<DIGIT>+ "-")"), pat(R"(<ANY>+ "-")")));
  CHECK(widening_is_safe(pat("<DIGIT>{2}"), pat("<ALNUM>{2}")));
  CHECK_FALSE(widening_is_safe(pat("<DIGIT>+"), pat("<DIGIT>{1} <DIGIT>{1}")));
}

TEST_CASE("incremental update") {
  const auto& t = tree();
  SUBCASE("class widened to the common ancestor") {
    auto r = incremental_update({parse("<DIGIT>+")}, "12a3", t);
    CHECK(r.status == UpdateStatus::Updated);
    CHECK(r.updated_pattern == 0u);
    CHECK(serialize_skeleton(r.patterns[0]) == "<ALNUM>+");
  }
  SUBCASE("recursive count widened") {
    auto r = incremental_update({parse(R"(Recursive{<LOWER>+}[";"]{3})")}, "a;b", t);
    CHECK(r.status == UpdateStatus::CountWidened);
    CHECK(std::get<RecursiveNode>(r.patterns[0].node).count == CountSpec::range(2, 3));
  }
  SUBCASE("already accepted") {
    std::vector<Skeleton> ps{keys()};
    auto r = incremental_update(ps, "AB,1", t);
    CHECK(r.status == UpdateStatus::NoOp);
    CHECK(r.patterns == ps);
  }
  SUBCASE("structural change needs a relearn") {
    std::vector<Skeleton> ps{keys()};
    auto r = incremental_update(ps, "CSS-1", t);
    CHECK(r.status == UpdateStatus::NeedsRelearn);
    CHECK(r.patterns == ps);
    CHECK(!r.message.empty());
  }
  SUBCASE("first absorbing pattern in rank order") {
    std::vector<Skeleton> ps{parse(R"(<UPPER>+ "-" <DIGIT>+)"), parse("<LOWER>+")};
    auto r = incremental_update(ps, "ab1", t);
    CHECK(r.updated_pattern == 1u);
    CHECK(r.patterns[0] == ps[0]);
  }
  CHECK(std::string(to_string(UpdateStatus::NeedsRelearn)) == "needs-relearn");
}

TEST_CASE("update monotonicity") {
  const auto& t = tree();
  std::mt19937_64 rng(404);
  std::size_t updated = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto s = testgen::random_update_scenario(rng, t);
    auto r = incremental_update(s.patterns, s.value, t);
    if (r.status != UpdateStatus::NeedsRelearn) ++updated;
    auto bad = testgen::update_violation(s, r, t, rng, 300);
    CHECK_MESSAGE(!bad, bad.value_or(""));
  }
  CHECK(updated > 10);
  MESSAGE("updated " << updated << "/60");
}

TEST_CASE("generate examples") {
  const auto& t = tree();
  Skeleton before = parse(R"(<DIGIT>+ <ALPHA>+ <DIGIT>+)");
  Skeleton after = parse(R"(<DIGIT>+ "x" <DIGIT>+)");
  SUBCASE("confusing case") {
    auto ex = generate_examples(before, after, t, 20, 7);
    REQUIRE(!ex.empty());
    CHECK(ex.size() <= 20);
    const std::regex shape("[0-9]+[A-Z][0-9]+");
    CHECK(std::any_of(ex.begin(), ex.end(), [&](const auto& e) { return std::regex_match(e.candidate, shape); }));
    for (const auto& e : ex) {
      CHECK(skeleton_match(before, e.candidate).accepted);
      CHECK_FALSE(skeleton_match(after, e.candidate).accepted);
      CHECK(!e.verdict);
    }
    CHECK(skeleton_match(before, "3X5").accepted);
    CHECK_FALSE(skeleton_match(after, "3X5").accepted);
  }
  SUBCASE("budget zero") { CHECK(generate_examples(before, after, t, 0, 1).empty()); }
  SUBCASE("nothing refined") { CHECK(generate_examples(before, before, t, 5, 1).empty()); }
  SUBCASE("deterministic") {
    auto a = generate_examples(before, after, t, 5, 3);
    auto b = generate_examples(before, after, t, 5, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].candidate == b[i].candidate);
  }
}

TEST_CASE("augmentation boundary property") {
  const auto& t = tree();
  auto scenarios = testgen::augment_scenarios(500, 12, t);
  REQUIRE(!scenarios.empty());
  std::size_t total = 0;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    auto ex = generate_examples(scenarios[i].before, scenarios[i].after, t, 4, i);
    total += ex.size();
    for (const auto& e : ex) {
      auto bad = testgen::boundary_violation(scenarios[i], e);
      CHECK_MESSAGE(!bad, bad.value_or(""));
    }
  }
  CHECK(total > 0);
  MESSAGE("boundary examples: " << total << " from " << scenarios.size() << " scenarios");
}

TEST_CASE("apply feedback") {
  const auto& t = tree();
  PatternSet state{{parse("<DIGIT>+"), parse("<ALNUM>+"), parse(R"(<UPPER>+ "-" <DIGIT>+)")}, {}, {}};
  SUBCASE("empty records are identity") {
    auto out = apply_feedback(state, {}, t);
    CHECK(out.state == state);
    CHECK(out.warnings.empty());
  }
  SUBCASE("error demotes accepting pattern") {
    auto out = apply_feedback(state, {{"abc", Verdict::ConfirmedError, 1}}, t);
    CHECK(out.state.negatives == std::vector<std::string>{"abc"});
    REQUIRE(out.state.patterns.size() == 3);
    CHECK(out.state.patterns[0] == state.patterns[0]);
    CHECK(out.state.patterns[1] == state.patterns[2]);
    CHECK(out.state.patterns[2] == state.patterns[1]);
  }
  SUBCASE("correct delegates to incremental update") {
    PatternSet s{{parse("<DIGIT>+")}, {}, {}};
    auto out = apply_feedback(s, {{"12a3", Verdict::ConfirmedCorrect, 1}}, t);
    CHECK(out.state.patterns == incremental_update(s.patterns, "12a3", t).patterns);
  }
  SUBCASE("contradiction keeps the latest") {
    auto out = apply_feedback(state,
                              {{"abc", Verdict::ConfirmedCorrect, 5}, {"abc", Verdict::ConfirmedError, 2}}, t);
    CHECK(!out.warnings.empty());
    CHECK(out.state.negatives.empty());
  }
  SUBCASE("needs relearn is reported") {
    PatternSet s{{keys()}, {}, {}};
    auto out = apply_feedback(s, {{"1-1", Verdict::ConfirmedCorrect, 1}}, t);
    CHECK(out.needs_relearn == std::vector<std::string>{"1-1"});
    CHECK(out.state.patterns == s.patterns);
  }
  SUBCASE("idempotence") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<FeedbackRecord> records;
      for (std::size_t i = testgen::uniform(rng, 0, 5); i > 0; --i) {
        records.push_back({testgen::random_from(rng, "aB1-", 1, 4),
                           testgen::coin(rng) ? Verdict::ConfirmedCorrect : Verdict::ConfirmedError,
                           static_cast<std::int64_t>(testgen::uniform(rng, 0, 9))});
      }
      auto once = apply_feedback(state, records, t);
      auto twice = apply_feedback(once.state, records, t);
      CHECK(once.state == twice.state);
    }
  }
}
