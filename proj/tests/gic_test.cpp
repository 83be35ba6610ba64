#include <gtest/gtest.h>

#include <vector>

#include "irqbench/gic.hpp"
#include "oracles/reference.hpp"

using namespace irqbench;
using namespace irqbench::gic;

namespace {

Distributor single(Trigger trigger, Priority prio = 0) {
  std::vector<InterruptSpec> specs{{121, trigger, prio, CoreMask::only(0), true}};
  return Distributor::configure(specs, 1);
}

// Raise an edge line, hold it for `width` ns, then release it.
Recognition pulse(Distributor& d, InterruptId id, Nanos start, Nanos width) {
  d.assert_line(id, true, start);
  return d.assert_line(id, false, start + width);
}

}  // namespace

TEST(Configure, SingleInterruptStartsInactive) {
  auto d = single(Trigger::edge);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_EQ(d.cpu(0).priority_mask, kDefaultPriorityLevels);
  EXPECT_EQ(d.cpu(0).running_priority, d.idle_priority());
  EXPECT_FALSE(d.cpu(0).signaled);
}

TEST(Configure, EmptySetNeverSelects) {
  auto d = Distributor::configure({}, 2);
  EXPECT_FALSE(d.select(0));
  EXPECT_FALSE(d.select(1));
  EXPECT_EQ(d.acknowledge(0, 0), kSpuriousId);
}

TEST(Configure, RejectsInvalidSpecs) {
  using V = std::vector<InterruptSpec>;
  EXPECT_THROW(Distributor::configure(V{{40, Trigger::edge, 1, CoreMask::only(0)}, {40, Trigger::edge, 2, CoreMask::only(0)}}, 1),
               ConfigError);
  EXPECT_THROW(Distributor::configure(V{{40, Trigger::edge, 16, CoreMask::only(0)}}, 1), ConfigError);
  EXPECT_THROW(Distributor::configure(V{{40, Trigger::edge, 1, CoreMask{0}}}, 1), ConfigError);
  EXPECT_THROW(Distributor::configure(V{{40, Trigger::edge, 1, CoreMask::only(2)}}, 2), ConfigError);
  EXPECT_THROW(Distributor::configure(V{{1020, Trigger::edge, 1, CoreMask::only(0)}}, 1), ConfigError);
  EXPECT_THROW(Distributor::configure({}, 0), ConfigError);
  EXPECT_THROW(Distributor::configure({}, 5), ConfigError);
  EXPECT_THROW(Distributor::configure({}, 1, 257), ConfigError);
  // A disabled interrupt may leave its targets empty.
  EXPECT_NO_THROW(Distributor::configure(V{{40, Trigger::edge, 1, CoreMask{0}, false}}, 1));
}

TEST(Recognition, EdgePulseBelowThresholdIsIgnored) {
  auto d = single(Trigger::edge);
  EXPECT_EQ(pulse(d, 121, 100, 36), Recognition::ignored);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_FALSE(d.filter(0).signal());
}

TEST(Recognition, EdgePulseAtThresholdIsRecognized) {
  auto d = single(Trigger::edge);
  EXPECT_EQ(pulse(d, 121, 100, 40), Recognition::recognized);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
}

TEST(Recognition, SettleQualifiesOnceWidthHasElapsed) {
  auto d = single(Trigger::edge);
  EXPECT_EQ(d.assert_line(121, true, 0), Recognition::deferred);
  EXPECT_EQ(d.settle(121, 39), Recognition::deferred);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_EQ(d.settle(121, 40), Recognition::recognized);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
  // The falling edge of an already qualified pulse adds nothing.
  EXPECT_EQ(d.assert_line(121, false, 1000), Recognition::ignored);
  EXPECT_EQ(d.state(121).pend_count, 0u);
}

TEST(Recognition, TimeRegressionThrows) {
  auto d = single(Trigger::edge);
  d.assert_line(121, true, 100);
  EXPECT_THROW(d.assert_line(121, false, 99), StateError);
}

TEST(Recognition, UnknownIdThrows) {
  auto d = single(Trigger::edge);
  EXPECT_THROW(d.assert_line(7, true, 0), StateError);
}

TEST(Recognition, LevelRepPendsAfterEoiWhileHigh) {
  auto d = single(Trigger::level);
  EXPECT_EQ(d.assert_line(121, true, 0), Recognition::recognized);
  ASSERT_EQ(d.filter(0).id, InterruptId{121});
  EXPECT_EQ(d.acknowledge(0, 10), 121u);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::active_and_pending);
  d.end_of_interrupt(0, 121, 20);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
  EXPECT_EQ(d.filter(0).id, InterruptId{121});
}

TEST(Recognition, LevelFallWithdrawsPending) {
  auto d = single(Trigger::level);
  d.assert_line(121, true, 0);
  d.assert_line(121, false, 10);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_FALSE(d.filter(0).signal());
}

TEST(Select, LowestPriorityValueWins) {
  std::vector<InterruptSpec> specs{{40, Trigger::level, 8, CoreMask::only(0)}, {41, Trigger::level, 2, CoreMask::only(0)}};
  auto d = Distributor::configure(specs, 1);
  d.assert_line(40, true, 0);
  d.assert_line(41, true, 0);
  EXPECT_EQ(d.select(0), InterruptId{41});
}

TEST(Select, TieBreaksOnLowestId) {
  std::vector<InterruptSpec> specs{{41, Trigger::level, 3, CoreMask::only(0)}, {40, Trigger::level, 3, CoreMask::only(0)}};
  auto d = Distributor::configure(specs, 1);
  d.assert_line(41, true, 0);
  d.assert_line(40, true, 0);
  EXPECT_EQ(d.select(0), InterruptId{40});
}

TEST(Select, RespectsTargetsAndEnable) {
  std::vector<InterruptSpec> specs{{40, Trigger::level, 1, CoreMask::only(1)},
                                   {41, Trigger::level, 0, CoreMask::only(0), false},
                                   {42, Trigger::level, 5, CoreMask::first(2)}};
  auto d = Distributor::configure(specs, 2);
  for (InterruptId id : {40u, 41u, 42u}) d.assert_line(id, true, 0);
  EXPECT_EQ(d.select(0), InterruptId{42});
  EXPECT_EQ(d.select(1), InterruptId{40});
  EXPECT_EQ(d.enabled_for(0), 1u);
  EXPECT_EQ(d.enabled_for(1), 2u);
}

// Every configuration of up to 4 interrupts over 4 priorities and every subset
// of pending lines. The acceptance binary runs the full 8 x 16 sweep.
TEST(Select, MatchesBruteForceOnSmallConfigurations) {
  for (unsigned n = 0; n <= 4; ++n) {
    unsigned combos = 1;
    for (unsigned i = 0; i < n; ++i) combos *= 4;
    for (unsigned code = 0; code < combos; ++code) {
      std::vector<InterruptSpec> specs;
      unsigned c = code;
      for (unsigned i = 0; i < n; ++i) {
        specs.push_back({100 - 7 * i, Trigger::level, c % 4, CoreMask::only(0)});
        c /= 4;
      }
      for (unsigned subset = 0; subset < (1u << n); ++subset) {
        auto d = Distributor::configure(specs, 1);
        std::vector<oracle::Pending> pending;
        for (unsigned i = 0; i < n; ++i) {
          if (subset >> i & 1u) {
            d.assert_line(specs[i].id, true, 0);
            pending.push_back({specs[i].id, specs[i].priority});
          }
        }
        ASSERT_EQ(d.select(0), oracle::select(pending)) << "code " << code << " subset " << subset;
      }
    }
  }
}

TEST(Filter, TruthTable) {
  for (Priority p = 0; p < 16; ++p) {
    for (Priority m = 0; m <= 16; ++m) {
      for (Priority r = 0; r <= 16; ++r) {
        ASSERT_EQ(passes_filter(p, m, r), oracle::filter(p, m, r));
      }
    }
  }
}

TEST(Filter, MaskedAndNonPreemptingCases) {
  auto d = single(Trigger::level, 5);
  d.set_priority_mask(0, 4);
  d.assert_line(121, true, 0);
  EXPECT_FALSE(d.filter(0).signal());
  EXPECT_FALSE(d.cpu(0).signaled);
  d.set_priority_mask(0, 15);
  EXPECT_EQ(d.filter(0).id, InterruptId{121});
  EXPECT_THROW(d.set_priority_mask(0, 17), ConfigError);

  // A lower-priority interrupt may not preempt the running one.
  std::vector<InterruptSpec> specs{{40, Trigger::level, 2, CoreMask::only(0)}, {41, Trigger::level, 3, CoreMask::only(0)}};
  auto e = Distributor::configure(specs, 1);
  e.assert_line(40, true, 0);
  e.filter(0);
  ASSERT_EQ(e.acknowledge(0, 1), 40u);
  e.assert_line(41, true, 2);
  EXPECT_FALSE(e.filter(0).signal());
  e.end_of_interrupt(0, 40, 3);
  EXPECT_EQ(e.filter(0).id, InterruptId{40});  // line 40 still high
}

TEST(Acknowledge, ReturnsSignaledIdAndSetsActive) {
  std::vector<InterruptSpec> specs{{61, Trigger::edge, 4, CoreMask::only(0)}};
  auto d = Distributor::configure(specs, 1);
  pulse(d, 61, 0, 100);
  ASSERT_TRUE(d.filter(0).signal());
  EXPECT_EQ(d.acknowledge(0, 200), 61u);
  EXPECT_EQ(d.state(61).lifecycle, Lifecycle::active);
  EXPECT_EQ(d.cpu(0).running_priority, 4u);
  EXPECT_EQ(d.cpu(0).active, InterruptId{61});
}

TEST(Acknowledge, SpuriousWithoutSignal) {
  auto d = single(Trigger::edge);
  EXPECT_EQ(d.acknowledge(0, 0), kSpuriousId);
  // Pending but the filter was never run: no signal is asserted yet.
  pulse(d, 121, 0, 40);
  EXPECT_EQ(d.acknowledge(0, 50), kSpuriousId);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
}

TEST(Acknowledge, LosingCoreOfARaceGetsSpurious) {
  std::vector<InterruptSpec> specs{{121, Trigger::edge, 0, CoreMask::first(2)}};
  auto d = Distributor::configure(specs, 2);
  pulse(d, 121, 0, 40);
  ASSERT_TRUE(d.filter(0).signal());
  ASSERT_TRUE(d.filter(1).signal());
  EXPECT_EQ(d.acknowledge(1, 60), 121u);
  EXPECT_EQ(d.acknowledge(0, 64), kSpuriousId);
}

TEST(EndOfInterrupt, EdgeGoesInactive) {
  auto d = single(Trigger::edge);
  pulse(d, 121, 0, 40);
  d.filter(0);
  ASSERT_EQ(d.acknowledge(0, 50), 121u);
  d.end_of_interrupt(0, 121, 60);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_EQ(d.cpu(0).running_priority, d.idle_priority());
  EXPECT_FALSE(d.cpu(0).active);
}

TEST(EndOfInterrupt, RejectsIdsNotActiveOnCore) {
  auto d = single(Trigger::edge);
  EXPECT_THROW(d.end_of_interrupt(0, 121, 0), StateError);
  EXPECT_THROW(d.end_of_interrupt(0, 5, 0), StateError);
  EXPECT_THROW(d.end_of_interrupt(1, 121, 0), StateError);
}

TEST(EdgeCollapsing, RepeatedEdgesYieldOneExtraDelivery) {
  auto d = single(Trigger::edge);
  pulse(d, 121, 0, 40);
  d.filter(0);
  ASSERT_EQ(d.acknowledge(0, 100), 121u);
  // Five qualifying edges while active collapse into one re-delivery.
  for (int i = 0; i < 5; ++i) pulse(d, 121, 200 + 100 * i, 50);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::active_and_pending);
  d.end_of_interrupt(0, 121, 1000);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
  d.filter(0);
  ASSERT_EQ(d.acknowledge(0, 1100), 121u);
  d.end_of_interrupt(0, 121, 1200);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
  EXPECT_FALSE(d.filter(0).signal());
}

TEST(EdgeCollapsing, EdgesWhileInactiveMakeOnePending) {
  auto d = single(Trigger::edge);
  for (int i = 0; i < 4; ++i) pulse(d, 121, 100 * i, 40);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::pending);
  d.filter(0);
  ASSERT_EQ(d.acknowledge(0, 500), 121u);
  d.end_of_interrupt(0, 121, 600);
  EXPECT_EQ(d.state(121).lifecycle, Lifecycle::inactive);
}
