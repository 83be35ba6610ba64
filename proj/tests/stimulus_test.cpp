#include <gtest/gtest.h>

#include <vector>

#include "irqbench/stimulus.hpp"
#include "irqbench/units.hpp"

using namespace irqbench;
using namespace irqbench::stimulus;

TEST(Patterns, ThroughputDefaults) {
  const auto p = throughput_pattern();
  EXPECT_EQ(p.high, 9'750'000'000);
  EXPECT_EQ(p.low, 250'000'000);
  EXPECT_EQ(p.mode, Mode::throughput);
}

TEST(Patterns, ScalingPreservesRatio) {
  const auto p = throughput_pattern().scaled(1000);
  EXPECT_EQ(p.high, 9'750'000);
  EXPECT_EQ(p.low, 250'000);
  EXPECT_EQ(p.high * 250'000'000, p.low * 9'750'000'000);
  EXPECT_THROW(p.scaled(0), ConfigError);
}

TEST(Patterns, ThroughputCaptureHasTwelvePhases) {
  EXPECT_EQ(throughput_pattern().complete_phases(kThroughputCapture), 12u);
  EXPECT_EQ(throughput_pattern().scaled(1000).complete_phases(kThroughputCapture / 1000), 12u);
}

TEST(Patterns, LatencyDefaultsAndPhaseCount) {
  const auto p = latency_pattern();
  EXPECT_EQ(p.high, 1'000'000);
  EXPECT_EQ(p.low, 4'000'000);
  EXPECT_EQ(p.complete_phases(kLatencyCapture), 6000u);
  for (std::uint64_t i : {0u, 1u, 17u, 5999u}) {
    EXPECT_EQ(p.phase_start(i), static_cast<Nanos>(i) * 5'000'000);
  }
}

TEST(Patterns, RepetitionsCapPhaseCount) {
  auto p = latency_pattern();
  p.repetitions = 3;
  EXPECT_EQ(p.complete_phases(kLatencyCapture), 3u);
}

TEST(Patterns, Validation) {
  StimulationPattern p{39, 100};
  EXPECT_THROW(validate(p), ConfigError);
  p.high = 40;
  EXPECT_NO_THROW(validate(p));
  p.low = -1;
  EXPECT_THROW(validate(p), ConfigError);
  p.low = 0;
  p.lines.clear();
  EXPECT_THROW(validate(p), ConfigError);
  EXPECT_THROW(parse_mode("both"), ConfigError);
  EXPECT_EQ(parse_mode("throughput"), Mode::throughput);
}

TEST(Edges, ExactlyPeriodicAndMirroredOnSameTick) {
  const auto p = latency_pattern().scaled(1000);
  const auto es = edges(p, 10 * p.period() + 3);
  ASSERT_EQ(es.size(), 20u);
  for (std::size_t i = 0; i < es.size(); i += 2) {
    EXPECT_TRUE(es[i].level);
    EXPECT_EQ(es[i].time, static_cast<Nanos>(i / 2) * p.period());
    EXPECT_FALSE(es[i + 1].level);
    EXPECT_EQ(es[i + 1].time, es[i].time + p.high);
    const auto hw = hardware_event(es[i]);
    EXPECT_EQ(hw.tick, trace::quantize(static_cast<std::uint64_t>(es[i].time)));
    EXPECT_EQ(hw.kind, trace::EventKind::hw_rising);
  }
}

namespace {

struct Driven {
  gic::Distributor gic;
  std::vector<trace::TraceEvent> events;
};

Driven drive_once(const StimulationPattern& p, gic::Trigger trigger, Nanos duration) {
  std::vector<gic::InterruptSpec> specs{{121, trigger, 0, gic::CoreMask::only(0)}};
  Driven d{gic::Distributor::configure(specs, 1), {}};
  const std::vector<gic::InterruptId> ids{121};
  drive(p, d.gic, ids, [&](const trace::TraceEvent& e) { d.events.push_back(e); }, duration);
  return d;
}

}  // namespace

TEST(Drive, OneLatencyPhaseEmitsOneRisingEdge) {
  const auto p = latency_pattern();
  const auto d = drive_once(p, gic::Trigger::edge, p.period());
  ASSERT_EQ(d.events.size(), 2u);
  EXPECT_EQ(d.events[0].kind, trace::EventKind::hw_rising);
  EXPECT_EQ(d.events[0].tick, 0u);
  EXPECT_EQ(d.gic.state(121).lifecycle, gic::Lifecycle::pending);
}

TEST(Drive, PartialPhaseIsDropped) {
  const auto p = latency_pattern();
  const auto d = drive_once(p, gic::Trigger::edge, p.period() - 1);
  EXPECT_TRUE(d.events.empty());
  EXPECT_EQ(d.gic.state(121).lifecycle, gic::Lifecycle::inactive);
}

TEST(Drive, LevelLineHeldHighForHighPhase) {
  auto p = throughput_pattern().scaled(1000);
  p.repetitions = 1;
  std::vector<gic::InterruptSpec> specs{{121, gic::Trigger::level, 0, gic::CoreMask::only(0)}};
  auto g = gic::Distributor::configure(specs, 1);
  const std::vector<gic::InterruptId> ids{121};
  std::vector<bool> levels_seen;
  drive(p, g, ids, [&](const trace::TraceEvent&) { levels_seen.push_back(g.state(121).line_level); },
        kThroughputCapture / 1000);
  ASSERT_EQ(levels_seen.size(), 2u);
  EXPECT_TRUE(levels_seen[0]);
  EXPECT_FALSE(levels_seen[1]);
}

TEST(Drive, UnmappedLineIsRejected) {
  const auto p = latency_pattern();
  std::vector<gic::InterruptSpec> specs{{121, gic::Trigger::edge, 0, gic::CoreMask::only(0)}};
  auto g = gic::Distributor::configure(specs, 1);
  const std::vector<gic::InterruptId> ids{};
  EXPECT_THROW(drive(p, g, ids, [](const trace::TraceEvent&) {}, p.period()), ConfigError);
}

TEST(Units, Durations) {
  EXPECT_EQ(parse_duration("30s"), 30'000'000'000);
  EXPECT_EQ(parse_duration("250ms"), 250'000'000);
  EXPECT_EQ(parse_duration("40us"), 40'000);
  EXPECT_EQ(parse_duration("1000ns"), 1000);
  EXPECT_EQ(parse_duration("1000"), 1000);
  EXPECT_EQ(parse_duration("9.75s"), 9'750'000'000);
  EXPECT_THROW(parse_duration("1.5ns"), ConfigError);
  EXPECT_THROW(parse_duration("ten"), ConfigError);
  EXPECT_THROW(parse_duration("5m"), ConfigError);
  EXPECT_THROW(parse_duration(""), ConfigError);
}

TEST(Units, SeedLists) {
  EXPECT_EQ(parse_seed_list("1..3"), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seed_list("4,2,9"), (std::vector<std::uint64_t>{4, 2, 9}));
  EXPECT_THROW(parse_seed_list("3..1"), ConfigError);
  EXPECT_THROW(parse_seed_list("a"), ConfigError);
  EXPECT_THROW(parse_seed_list("1,,2"), ConfigError);
}
