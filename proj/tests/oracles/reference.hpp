#pragma once

// Independent reference implementations used as test oracles. They favor
// obviousness over speed: full scans, no sorting tricks, no shared helpers
// with the library under test.

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "irqbench/analysis.hpp"
#include "irqbench/gic.hpp"
#include "irqbench/trace.hpp"

namespace oracle {

using irqbench::trace::EventKind;
using irqbench::trace::TraceCapture;
using irqbench::trace::TraceEvent;

struct Pending {
  std::uint32_t id;
  std::uint32_t priority;
};

// argmin over (priority, id).
inline std::optional<std::uint32_t> select(const std::vector<Pending>& pending) {
  std::optional<Pending> best;
  for (const auto& p : pending) {
    if (!best || p.priority < best->priority || (p.priority == best->priority && p.id < best->id)) {
      best = p;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

// Masking truth table written out case by case.
inline bool filter(std::uint32_t prio, std::uint32_t mask, std::uint32_t running) {
  if (prio >= mask) return false;
  if (prio >= running) return false;
  return true;
}

inline std::vector<std::uint64_t> rising(const TraceCapture& c, std::uint16_t ch) {
  std::multiset<std::uint64_t> s;
  for (const auto& e : c.events) {
    if (e.kind == EventKind::hw_rising && e.channel == ch) s.insert(e.tick);
  }
  return {s.begin(), s.end()};
}

struct LatencyResult {
  std::vector<std::uint64_t> latency_ns;
  std::uint64_t misses = 0;
};

// For each phase scan every event for the earliest sw-event in [A_i, A_{i+1}).
inline LatencyResult latencies(const TraceCapture& c, std::uint16_t stim, std::uint16_t isr) {
  const auto edges = rising(c, stim);
  LatencyResult r;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto a = edges[i];
    const auto close = i + 1 < edges.size() ? edges[i + 1] : std::numeric_limits<std::uint64_t>::max();
    std::optional<std::uint64_t> b;
    for (const auto& e : c.events) {
      if (e.kind != EventKind::sw_event || e.channel != isr) continue;
      if (e.tick < a) continue;
      if (i + 1 < edges.size() && e.tick >= close) continue;
      if (!b || e.tick < *b) b = e.tick;
    }
    if (b) {
      r.latency_ns.push_back((*b - a) * c.tick_ns);
    } else {
      ++r.misses;
    }
  }
  return r;
}

struct ThroughputResult {
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> high_ns;
};

// Counts per phase; the last phase only when the capture end reaches one
// previous period past its edge.
inline ThroughputResult throughputs(const TraceCapture& c, std::uint16_t stim, const std::set<std::uint16_t>& isr) {
  const auto edges = rising(c, stim);
  ThroughputResult r;
  if (edges.size() < 2) return r;
  std::optional<std::uint64_t> end;
  if (c.metadata.contains("duration_ns")) end = c.metadata["duration_ns"].get<std::uint64_t>() / c.tick_ns;
  std::optional<std::uint64_t> fallback;
  if (c.metadata.contains("pattern")) fallback = c.metadata["pattern"]["high_ns"].get<std::uint64_t>();

  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::uint64_t close;
    if (i + 1 < edges.size()) {
      close = edges[i + 1];
    } else {
      close = edges[i] + (edges[i] - edges[i - 1]);
      if (!end || close > *end) break;
    }
    std::optional<std::uint64_t> fall;
    for (const auto& e : c.events) {
      if (e.kind == EventKind::hw_falling && e.channel == stim && e.tick > edges[i] && e.tick <= close) {
        if (!fall || e.tick < *fall) fall = e.tick;
      }
    }
    std::uint64_t high = fall ? (*fall - edges[i]) * c.tick_ns : fallback.value_or(0);
    if (high == 0) continue;
    std::uint64_t n = 0;
    for (const auto& e : c.events) {
      if (e.kind == EventKind::sw_event && isr.count(e.channel) && e.tick >= edges[i] && e.tick < close) ++n;
    }
    r.counts.push_back(n);
    r.high_ns.push_back(high);
  }
  return r;
}

// Random capture of rising, falling and software events on random channels,
// with repeated ticks. Stimulus is channel 0. rising_weight sets the share of
// rising edges relative to the other two kinds (weight 1 each).
inline TraceCapture random_capture(std::mt19937_64& rng, std::size_t max_events, std::uint16_t channels = 3,
                                   double rising_weight = 1.0) {
  std::uniform_int_distribution<std::size_t> count(0, max_events);
  std::discrete_distribution<int> kind({rising_weight, 1.0, 1.0});
  std::uniform_int_distribution<std::uint16_t> ch(0, channels - 1);
  std::uniform_int_distribution<std::uint64_t> step(0, 40);
  std::bernoulli_distribution same_tick(0.1);
  TraceCapture c;
  c.metadata["channels"] = channels;
  const auto n = count(rng);
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!same_tick(rng)) t += step(rng);
    const auto k = static_cast<EventKind>(kind(rng));
    const auto payload = k == EventKind::sw_event ? static_cast<std::uint32_t>(rng()) : 0u;
    c.events.push_back({t, k, ch(rng), payload});
  }
  std::bernoulli_distribution with_duration(0.5);
  if (with_duration(rng)) {
    std::uniform_int_distribution<std::uint64_t> extra(0, 200);
    c.metadata["duration_ns"] = (t + extra(rng)) * c.tick_ns;
  }
  std::bernoulli_distribution with_high(0.5);
  if (with_high(rng)) c.metadata["pattern"] = {{"high_ns", std::uniform_int_distribution<std::uint64_t>(1, 400)(rng)}};
  return c;
}

}  // namespace oracle
