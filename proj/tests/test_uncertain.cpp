#include <gtest/gtest.h>

#include <cstdlib>

#include "support/oracles.hpp"
#include "uconf/log_io.hpp"
#include "uconf/uncertain.hpp"

using namespace uconf;

namespace {

UncertainTrace running_example() {
  return load_log_file(UCONF_FIXTURES_DIR "/running_example.json", LogFormat::json).traces.at(0);
}

}  // namespace

TEST(Uncertain, RunningExampleOrders) {
  const auto orders = order_realizations(running_example());
  const std::vector<EventIdSequence> expected{
      {"e1", "e2", "e3", "e4"}, {"e1", "e3", "e2", "e4"}, {"e3", "e1", "e2", "e4"}};
  EXPECT_EQ(orders, expected);
}

TEST(Uncertain, RunningExampleRealizationsOfOneOrder) {
  const auto r = realizations_of_order(running_example(), {"e1", "e2", "e3", "e4"});
  const std::set<LabelSequence> expected{{"NightSweats", "PrTP", "Splenomeg", "Adm"},
                                         {"NightSweats", "SecTP", "Splenomeg", "Adm"},
                                         {"PrTP", "Splenomeg", "Adm"},
                                         {"SecTP", "Splenomeg", "Adm"}};
  EXPECT_EQ(r, expected);
}

TEST(Uncertain, RunningExampleHasTenRealizations) {
  const auto t = running_example();
  EXPECT_EQ(realizations(t).size(), 10u);
  EXPECT_EQ(realizations(t), oracle::realizations(t));
}

TEST(Uncertain, CertainTraceHasOneRealization) {
  UncertainTrace t{"c", {certain_event("b", "B", Timestamp{2}), certain_event("a", "A", Timestamp{1})}};
  EXPECT_EQ(realizations(t), (std::set<LabelSequence>{{"A", "B"}}));
  EXPECT_EQ(certain_view(t), (LabelSequence{"A", "B"}));
}

TEST(Uncertain, EqualTimestampsAreUnordered) {
  UncertainTrace t{"c", {certain_event("a", "A", Timestamp{5}), certain_event("b", "B", Timestamp{5})}};
  EXPECT_FALSE(certain_view(t));
  EXPECT_EQ(realizations(t), (std::set<LabelSequence>{{"A", "B"}, {"B", "A"}}));
}

TEST(Uncertain, CertainViewRejectsUncertainEvents) {
  auto t = running_example();
  EXPECT_FALSE(certain_view(t));
}

TEST(Uncertain, RealizationsMatchBruteForce) {
  oracle::Gen g(101);
  const auto labels = oracle::alphabet(3);
  for (int i = 0; i < 300; ++i) {
    const auto t = oracle::random_trace(g, 6, labels);
    ASSERT_EQ(realizations(t), oracle::realizations(t)) << i;
    const auto orders = order_realizations(t);
    ASSERT_EQ(std::set<EventIdSequence>(orders.begin(), orders.end()), oracle::orders(t)) << i;
    ASSERT_EQ(std::set<EventIdSequence>(orders.begin(), orders.end()).size(), orders.size());
  }
}

TEST(Uncertain, PrecedesIsAStrictPartialOrder) {
  oracle::Gen g(5);
  const auto labels = oracle::alphabet(2);
  for (int i = 0; i < 200; ++i) {
    const auto t = oracle::random_trace(g, 7, labels);
    for (const auto& a : t.events) {
      EXPECT_FALSE(precedes(a, a));
      for (const auto& b : t.events) {
        if (precedes(a, b)) {
          EXPECT_FALSE(precedes(b, a));
        }
        for (const auto& c : t.events)
          if (precedes(a, b) && precedes(b, c)) {
            EXPECT_TRUE(precedes(a, c));
          }
        const bool overlap = a.t_min <= b.t_max && b.t_min <= a.t_max;
        EXPECT_EQ(!precedes(a, b) && !precedes(b, a), overlap);
      }
    }
  }
}

TEST(Uncertain, LooseningOnlyAddsRealizations) {
  oracle::Gen g(21);
  const auto labels = oracle::alphabet(3);
  for (int i = 0; i < 200; ++i) {
    const auto t = oracle::random_trace(g, 6, labels);
    const auto looser = oracle::loosen(g, t, labels);
    const auto small = realizations(t);
    const auto big = realizations(looser);
    EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  }
}

TEST(Uncertain, ValidationRejectsMalformedEvents) {
  auto e = certain_event("x", "A", Timestamp{3});
  e.t_min = Timestamp{4};
  EXPECT_THROW(validate(e), ValidationError);
  auto f = certain_event("y", "A", Timestamp{1});
  f.activities.clear();
  EXPECT_THROW(validate(f), ValidationError);
  EXPECT_THROW(validate(certain_event("z", "tau", Timestamp{1})), ValidationError);
  UncertainTrace dup{"c", {certain_event("a", "A", Timestamp{1}), certain_event("a", "B", Timestamp{2})}};
  EXPECT_THROW(validate(dup), ValidationError);
}

TEST(Uncertain, EventCapThrows) {
  UncertainTrace t{"big", {}};
  for (int i = 0; i < 13; ++i) t.events.push_back(certain_event("e" + std::to_string(100 + i), "A", Timestamp{i}));
  EXPECT_THROW((void)realizations(t), ResourceError);
  EXPECT_NO_THROW((void)realizations(t, EnumerationCaps{20, 10}));
}

TEST(Uncertain, RealizationCapThrows) {
  UncertainTrace t{"wide", {}};
  for (int i = 0; i < 6; ++i) t.events.push_back(certain_event("e" + std::to_string(i), "A" + std::to_string(i), Timestamp{0}));
  EXPECT_EQ(realizations(t).size(), 720u);
  EXPECT_THROW((void)realizations(t, EnumerationCaps{12, 100}), ResourceError);
}

TEST(Uncertain, CapFromEnvironment) {
  ::setenv("UNCERTAIN_CONFORM_CAP", "5,77", 1);
  auto caps = EnumerationCaps::from_environment();
  EXPECT_EQ(caps.max_events, 5u);
  EXPECT_EQ(caps.max_realizations, 77u);
  ::setenv("UNCERTAIN_CONFORM_CAP", "9", 1);
  caps = EnumerationCaps::from_environment();
  EXPECT_EQ(caps.max_events, 9u);
  EXPECT_EQ(caps.max_realizations, 1'000'000u);
  ::setenv("UNCERTAIN_CONFORM_CAP", "lots", 1);
  EXPECT_THROW((void)EnumerationCaps::from_environment(), DomainError);
  ::unsetenv("UNCERTAIN_CONFORM_CAP");
}

TEST(Uncertain, TraceEqualityIgnoresStoredOrder) {
  UncertainTrace a{"c", {certain_event("a", "A", Timestamp{1}), certain_event("b", "B", Timestamp{2})}};
  UncertainTrace b{"c", {a.events[1], a.events[0]}};
  EXPECT_EQ(a, b);
}
