#pragma once

// Model of the programmable-logic interrupt generation block: a periodic
// logical-high/low pattern on one or more lines, each edge mirrored into the
// trace as a hardware event on the same tick.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irqbench/error.hpp"
#include "irqbench/gic.hpp"
#include "irqbench/trace.hpp"

namespace irqbench::stimulus {

using Nanos = std::int64_t;

inline constexpr Nanos kMillisecond = 1'000'000;
inline constexpr Nanos kSecond = 1'000'000'000;
inline constexpr std::uint64_t kDefaultTimeScale = 1000;

// Capture lengths of the two procedures, before desk scaling.
inline constexpr Nanos kLatencyCapture = 30 * kSecond;
inline constexpr Nanos kThroughputCapture = 120 * kSecond;

enum class Mode : std::uint8_t { latency, throughput };

inline const char* to_string(Mode m) { return m == Mode::latency ? "latency" : "throughput"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "latency") return Mode::latency;
  if (s == "throughput") return Mode::throughput;
  throw ConfigError("unknown measurement mode '" + s + "' (expected latency or throughput)");
}

struct StimulationPattern {
  Nanos high = 0;
  Nanos low = 0;
  // 0 means unbounded; otherwise at most this many phases are generated.
  std::uint64_t repetitions = 0;
  std::vector<unsigned> lines{0};
  Mode mode = Mode::latency;

  Nanos period() const { return high + low; }

  // Start of phase i.
  Nanos phase_start(std::uint64_t i) const { return static_cast<Nanos>(i) * period(); }

  // Phases that fit completely into [0, duration).
  std::uint64_t complete_phases(Nanos duration) const {
    if (period() <= 0 || duration < period()) {
      return 0;
    }
    auto n = static_cast<std::uint64_t>(duration / period());
    return repetitions != 0 && repetitions < n ? repetitions : n;
  }

  // Divide both phase lengths by the desk-scale divisor.
  StimulationPattern scaled(std::uint64_t divisor) const {
    if (divisor == 0) {
      throw ConfigError("time-scale divisor must be positive");
    }
    auto p = *this;
    p.high = high / static_cast<Nanos>(divisor);
    p.low = low / static_cast<Nanos>(divisor);
    return p;
  }

  friend bool operator==(const StimulationPattern&, const StimulationPattern&) = default;
};

// Throws ConfigError unless the pattern is recognizable and well formed.
inline void validate(const StimulationPattern& p) {
  if (p.high < gic::kMinPulseWidth) {
    throw ConfigError("high phase of " + std::to_string(p.high) + " ns is shorter than the " +
                      std::to_string(gic::kMinPulseWidth) + " ns recognition threshold");
  }
  if (p.low < 0) {
    throw ConfigError("low phase must be non-negative");
  }
  if (p.lines.empty()) {
    throw ConfigError("pattern drives no lines");
  }
}

// 9.75 s signaled, 250 ms pause.
inline StimulationPattern throughput_pattern() {
  return {9'750 * kMillisecond, 250 * kMillisecond, 0, {0}, Mode::throughput};
}

// 1 ms trigger, 4 ms pause; one edge-triggered interrupt per phase.
inline StimulationPattern latency_pattern() {
  return {1 * kMillisecond, 4 * kMillisecond, 0, {0}, Mode::latency};
}

inline StimulationPattern pattern_for(Mode m) {
  return m == Mode::latency ? latency_pattern() : throughput_pattern();
}

inline Nanos capture_length(Mode m) { return m == Mode::latency ? kLatencyCapture : kThroughputCapture; }

struct LineEdge {
  Nanos time = 0;
  unsigned line = 0;
  bool level = false;
  std::uint64_t phase = 0;
};

// All edges of complete phases, in time order. Rising edge of phase i at
// i * period, falling edge at i * period + high. A zero-length low phase
// still produces a falling edge so every phase is delimited.
inline std::vector<LineEdge> edges(const StimulationPattern& p, Nanos duration) {
  std::vector<LineEdge> out;
  const auto n = p.complete_phases(duration);
  out.reserve(static_cast<std::size_t>(n) * p.lines.size() * 2);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Nanos start = p.phase_start(i);
    for (unsigned line : p.lines) out.push_back({start, line, true, i});
    for (unsigned line : p.lines) out.push_back({start + p.high, line, false, i});
  }
  return out;
}

inline trace::TraceEvent hardware_event(const LineEdge& e) {
  return {trace::quantize(static_cast<std::uint64_t>(e.time)),
          e.level ? trace::EventKind::hw_rising : trace::EventKind::hw_falling,
          static_cast<std::uint16_t>(e.line), 0};
}

// Drive the pattern into a distributor and the trace sink. line_ids maps
// pattern line index to interrupt id. Partial trailing phases are not driven.
template <typename Sink>
void drive(const StimulationPattern& pattern, gic::Distributor& gic,
           std::span<const gic::InterruptId> line_ids, Sink&& sink, Nanos duration) {
  for (unsigned line : pattern.lines) {
    if (line >= line_ids.size() || !gic.contains(line_ids[line])) {
      throw ConfigError("pattern line " + std::to_string(line) + " is not mapped to a configured interrupt");
    }
  }
  for (const auto& e : edges(pattern, duration)) {
    const auto id = line_ids[e.line];
    gic.assert_line(id, e.level, e.time);
    if (e.level) {
      // A pulse at least as long as the threshold is qualified once it has elapsed.
      if (pattern.high >= gic::kMinPulseWidth) {
        gic.settle(id, e.time + gic::kMinPulseWidth);
      }
    }
    sink(hardware_event(e));
  }
}

}  // namespace irqbench::stimulus
