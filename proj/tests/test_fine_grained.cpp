#include <doctest.h>

#include <cmath>
#include <random>

#include "refine_properties.hpp"
#include "patval/fine_grained.hpp"
#include "patval/pattern_text.hpp"

using namespace patval;

namespace {

const GeneralizationTree& tree() { return GeneralizationTree::default_tree(); }
AtomPattern cls(const char* label, Repetition r = {}) { return make_class(tree(), *tree().find_label(label), r); }

SlotStats repeated(std::initializer_list<std::pair<const char*, int>> counts) {
  std::vector<std::string> subs;
  for (const auto& [s, n] : counts) subs.insert(subs.end(), static_cast<std::size_t>(n), s);
  return SlotStats::from(0, subs);
}

}  // namespace

TEST_CASE("token entropy") {
  CHECK(token_entropy(repeated({{"ADD", 10}})) == 1.0);
  CHECK(token_entropy(repeated({{"a", 5}, {"b", 5}})) == doctest::Approx(2.0));
  CHECK(token_entropy(repeated({{"w", 1}, {"x", 1}, {"y", 1}, {"z", 1}})) == doctest::Approx(3.0));
  EntropyParams p;
  p.beta = 0.0;
  CHECK(token_entropy(repeated({{"ADD", 3}}), p) == 0.0);
}

TEST_CASE("slot stats") {
  auto s = repeated({{"ab", 2}, {"abcd", 1}, {"x", 1}});
  CHECK(s.mean_len == doctest::Approx(9.0 / 4.0));
  CHECK(s.distinct == 3);
  Pattern p{{cls("UPPER"), make_literal(","), cls("DIGIT")}};
  auto st = slot_stats(p, {"AB,12", "C,3", "bad"});
  REQUIRE(st.size() == 3);
  CHECK(st[0].substrings == std::vector<std::string>{"AB", "C"});
  CHECK(st[1].substrings == std::vector<std::string>{",", ","});
  CHECK(st[2].mean_len == 1.5);
}

TEST_CASE("atom cost") {
  auto id = repeated({{"ID:", 4}});
  CHECK(atom_cost(make_literal("ID:"), id, tree()) == 3.0);
  auto digits = repeated({{"12", 1}, {"345", 1}, {"6", 1}});
  const double any = atom_cost(cls("ANY"), digits, tree());
  const double digit = atom_cost(cls("DIGIT"), digits, tree());
  CHECK(digit < any);
  CHECK(any - digit == doctest::Approx(2.0 * 0.5 * (std::log2(96.0) - std::log2(10.0))));
  CHECK(atom_cost(make_enum({"ADD"}), repeated({{"ADD", 2}}), tree()) == 3.0);
}

TEST_CASE("greedy travel") {
  const auto& t = tree();
  SUBCASE("digit slot under ALNUM") {
    Pattern p{{cls("ALNUM")}};
    std::vector<std::string> segs{"12", "903", "4", "55555", "12345678", "0", "77"};
    CHECK(serialize_pattern(greedy_travel(p, segs, t)) == "<DIGIT>+");
  }
  SUBCASE("command words become an enum") {
    Pattern p{{cls("UPPER"), make_literal(" "), cls("LOWER"), make_literal(" "), cls("DIGIT")}};
    std::vector<std::string> segs{"DELETE user 1", "ADD table 22", "DELETE index 3", "ADD user 41",
                                  "DELETE group 9", "ADD group 17"};
    Pattern r = greedy_travel(p, segs, t);
    CHECK(r.atoms[0] == make_enum({"ADD", "DELETE"}));
    CHECK(std::holds_alternative<ClassAtom>(r.atoms[2]));
    CHECK_FALSE(pattern_match(r, "KILL user 3").accepted);
    for (const auto& s : segs) CHECK(pattern_match(r, s).accepted);
  }
  SUBCASE("high-cardinality mixed slot stays") {
    Pattern p{{cls("ALNUM")}};
    std::vector<std::string> segs{"aB3x", "Zq9", "k2M", "77Ab", "xY", "p0Q1", "Hh5"};
    CHECK(greedy_travel(p, segs, t) == p);
  }
  SUBCASE("fixed width is pinned") {
    Pattern p{{cls("DIGIT")}};
    std::vector<std::string> segs{"123", "456", "789", "012", "345", "678"};
    CHECK(serialize_pattern(greedy_travel(p, segs, t)) == "<DIGIT>{3}");
    EntropyParams no_pin;
    no_pin.pin_fixed_width = false;
    CHECK(greedy_travel(p, segs, t, no_pin) == p);
  }
  SUBCASE("minimal pattern unchanged") {
    Pattern p{{make_literal("ID:"), cls("DIGIT")}};
    std::vector<std::string> segs{"ID:1", "ID:22", "ID:333", "ID:4", "ID:55", "ID:6", "ID:777"};
    CHECK(greedy_travel(p, segs, t) == p);
  }
}

TEST_CASE("base segments") {
  Skeleton k = parse_skeleton(R"(Recursive{Align{<UPPER>+, ",", <DIGIT>+}}[";"])");
  auto segs = base_segments(k, {"AB,1;C,22", "x", "D,3"});
  REQUIRE(segs.size() == 2);
  CHECK(segs[0] == std::vector<std::string>{"AB", "C", "D"});
  CHECK(segs[1] == std::vector<std::string>{"1", "22", "3"});
}

TEST_CASE("refine patterns") {
  const auto& t = tree();
  std::vector<std::string> values{"CSS,12345;JAVA,4567", "A,1;B,2", "RUST,77", "GO,1;LUA,22;PHP,333"};
  Skeleton coarse = parse_skeleton(R"(Recursive{Align{<ALNUM>+, ",", <ALNUM>+}}[";"])");
  std::vector<std::string> warnings;
  auto out = refine_patterns({coarse, parse_skeleton("<DIGIT>+")}, values, t, {}, &warnings);
  REQUIRE(out.size() == 1);
  CHECK(warnings.size() == 1);
  CHECK(serialize_skeleton(out[0]) == R"(Recursive{Align{<UPPER>+, ",", <DIGIT>+}}[";"])");
  for (const auto& v : values) CHECK(skeleton_match(out[0], v).accepted);
  CHECK(refine_patterns(out, values, t) == out);
}

TEST_CASE("refinement properties") {
  const auto& t = tree();
  EntropyParams params;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    auto c = testgen::random_refine_case(rng, t);
    Pattern r = greedy_travel(c.general, c.segments, t, params);
    auto cov = testgen::coverage_violation(c, r);
    auto cost = testgen::cost_violation(c, r, t, params);
    auto idem = testgen::idempotence_violation(c, r, t, params);
    auto sound = testgen::soundness_violation(c, r);
    CHECK_MESSAGE(!cov, cov.value_or(""));
    CHECK_MESSAGE(!cost, cost.value_or(""));
    CHECK_MESSAGE(!idem, idem.value_or(""));
    CHECK_MESSAGE(!sound, sound.value_or(""));
  }
}

TEST_CASE("skeleton refinement keeps every accepted value") {
  const auto& t = tree();
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    Skeleton k = testgen::random_skeleton(rng, t, 2);
    std::vector<std::string> values;
    try {
      for (int i = 0; i < 6; ++i) values.push_back(sample_string(k, t, rng));
    } catch (const SampleError&) {
      continue;
    }
    auto out = refine_patterns({k}, values, t);
    REQUIRE(out.size() == 1);
    for (const auto& v : values) CHECK(skeleton_match(out[0], v).accepted);
  }
}

TEST_CASE("greedy cost is near the exhaustive minimum") {
  const auto& t = tree();
  EntropyParams params;
  params.enum_threshold = 0;
  params.pin_fixed_width = false;
  std::mt19937_64 rng(99);
  int optimal = 0;
  const int trials = 300;
  for (int trial = 0; trial < trials; ++trial) {
    auto c = testgen::random_refine_case(rng, t, 3);
    Pattern r = greedy_travel(c.general, c.segments, t, params);
    const double greedy = testgen::total_cost(r, c.segments, t, params);
    if (greedy <= testgen::exhaustive_min_cost(c.general, c.segments, t, params) + 1e-9) ++optimal;
  }
  CHECK(optimal >= trials * 9 / 10);
  MESSAGE("greedy optimal on " << optimal << "/" << trials);
}
