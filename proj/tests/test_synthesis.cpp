#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "uconf/alignment.hpp"
#include "uconf/log_io.hpp"
#include "uconf/synthesis.hpp"

using namespace uconf;

namespace {

UncertainLog one_trace(std::initializer_list<Label> labels) {
  UncertainTrace t{"c", {}};
  std::int64_t k = 0;
  for (const auto& l : labels) {
    t.events.push_back(certain_event("c:e" + std::to_string(k + 1), l, Timestamp{kPlayoutOrigin.ns + k * kMinuteNs}));
    ++k;
  }
  return UncertainLog{{t}};
}

LabelSequence view(const UncertainTrace& t) { return *certain_view(t); }

}  // namespace

TEST(Synthesis, ActivityNames) {
  EXPECT_EQ(activity_name(0), "A");
  EXPECT_EQ(activity_name(25), "Z");
  EXPECT_EQ(activity_name(26), "AA");
  EXPECT_EQ(activity_name(27), "AB");
  EXPECT_EQ(activity_name(26 + 26 * 26), "AAA");
}

TEST(Synthesis, BlockNetIsDeterministicAndLabeled) {
  for (std::size_t n : {1u, 5u, 20u}) {
    const auto a = random_block_net(n, 42);
    EXPECT_EQ(a.net, random_block_net(n, 42).net);
    const auto labels = a.net.visible_labels();
    EXPECT_EQ(labels.size(), n);
    EXPECT_EQ(std::set<Label>(labels.begin(), labels.end()).size(), n);
  }
  EXPECT_THROW((void)random_block_net(0, 1), DomainError);
}

TEST(Synthesis, BlockNetsAreSound) {
  // Every reachable marking can still reach the final marking; no dead transitions.
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto sn = random_block_net(1 + seed % 9, seed);
    std::set<std::vector<std::uint32_t>> seen;
    std::vector<Marking> stack{sn.initial_marking};
    std::set<std::size_t> fired;
    bool final_seen = false;
    while (!stack.empty()) {
      auto m = stack.back();
      stack.pop_back();
      if (!seen.insert({m.counts().begin(), m.counts().end()}).second) continue;
      if (m == sn.final_marking) {
        final_seen = true;
        continue;
      }
      bool any = false;
      for (std::size_t t = 0; t < sn.net.transition_count(); ++t)
        if (enabled(sn.net, m, t)) {
          any = true;
          fired.insert(t);
          stack.push_back(fire(sn.net, m, t));
        }
      ASSERT_TRUE(any) << "dead marking, seed " << seed;
    }
    EXPECT_TRUE(final_seen);
    EXPECT_EQ(fired.size(), sn.net.transition_count());
  }
}

TEST(Synthesis, PlayoutIsDeterministicAndSpaced) {
  const auto net = random_block_net(10, 3);
  const auto a = playout(net, 20, 9);
  EXPECT_EQ(a, playout(net, 20, 9));
  EXPECT_NE(a, playout(net, 20, 10));
  for (const auto& t : a.traces) {
    for (std::size_t k = 0; k < t.events.size(); ++k) {
      EXPECT_EQ(t.events[k].t_min.ns, kPlayoutOrigin.ns + static_cast<std::int64_t>(k) * kMinuteNs);
      EXPECT_EQ(t.events[k].id, t.case_id + ":e" + std::to_string(k + 1));
    }
  }
  EXPECT_EQ(a.traces[0].case_id, "case1");
}

TEST(Synthesis, DeviateExamples) {
  const std::vector<Label> universe{"a", "b"};
  EXPECT_EQ(view(deviate(one_trace({"a", "b"}), {0, 1, 0}, universe, 5).traces[0]), (LabelSequence{"b", "a"}));
  EXPECT_EQ(view(deviate(one_trace({"a", "b"}), {1, 0, 0}, universe, 5).traces[0]), (LabelSequence{"b", "a"}));
  const auto dup = deviate(one_trace({"a", "b"}), {0, 0, 1}, universe, 5).traces[0];
  EXPECT_EQ(view(dup), (LabelSequence{"a", "a", "b", "b"}));
  EXPECT_EQ(dup.events[1].id, "c:e1+dup");
  const auto none = deviate(one_trace({"a", "b"}), {0, 0, 0}, universe, 5);
  EXPECT_EQ(none, one_trace({"a", "b"}));
  EXPECT_THROW((void)deviate(one_trace({"a"}), {0.5, 0, 0}, {"a"}, 1), DomainError);
  EXPECT_THROW((void)deviate(one_trace({"a"}), {1.5, 0, 0}, universe, 1), DomainError);
}

TEST(Synthesis, UncertainizeExamples) {
  const std::vector<Label> universe{"a", "b", "c"};
  const auto base = one_trace({"a", "b", "c"});
  const auto all = uncertainize(base, {1, 1, 1}, universe, 3).traces[0];
  for (const auto& e : all.events) {
    EXPECT_EQ(e.activities.size(), 2u);
    EXPECT_LT(e.t_min, e.t_max);
    EXPECT_TRUE(e.indeterminate());
  }
  EXPECT_EQ(uncertainize(base, {0, 0, 0}, universe, 3), base);
  EXPECT_THROW((void)uncertainize(base, {0.1, 0, 0}, {"a"}, 3), DomainError);
  EXPECT_NO_THROW((void)uncertainize(base, {0, 0.5, 0.5}, {"a"}, 3));
}

TEST(Synthesis, UncertaintyGrowsMonotonicallyWithRate) {
  const auto net = random_block_net(6, 11);
  const auto log = playout(net, 30, 2);
  const auto universe = net.net.visible_labels();
  std::vector<double> ps{0, 0.1, 0.3, 0.5};
  for (std::size_t i = 1; i < ps.size(); ++i) {
    const auto lo = uncertainize(log, {ps[i - 1], ps[i - 1], ps[i - 1]}, universe, 77);
    const auto hi = uncertainize(log, {ps[i], ps[i], ps[i]}, universe, 77);
    for (std::size_t t = 0; t < log.traces.size(); ++t) {
      const auto small = realizations(lo.traces[t], EnumerationCaps{64, 1'000'000});
      const auto big = realizations(hi.traces[t], EnumerationCaps{64, 1'000'000});
      EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    }
  }
}

TEST(Synthesis, GeneratedLogsValidate) {
  const auto net = random_block_net(12, 5);
  auto log = playout(net, 25, 5);
  log = deviate(log, {0.3, 0.3, 0.3}, net.net.visible_labels(), 6);
  log = uncertainize(log, {0.2, 0.2, 0.2}, net.net.visible_labels(), 7);
  EXPECT_NO_THROW(validate(log));
  EXPECT_EQ(load_log_string(save_log(log, LogFormat::json), LogFormat::json), log);
}
