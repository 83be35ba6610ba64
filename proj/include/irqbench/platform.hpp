#pragma once

// Discrete-event model of the interrupt path on a multi-core platform. Time is
// kept in integer nanoseconds and quantized to 4 ns ticks when written to the
// trace. Events at equal times run in scheduling order, so a run is a pure
// function of (scenario, timing, seed, duration, options).
//
// Per delivery the path is:
//   line edge -> recognition -> select/forward/signal -> acknowledge
//   -> vector/dispatch -> ISR entry (sw-event) -> ISR body -> EOI
// The GIC state machine decides *what* happens at each step; the timing model
// decides *when*.

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include <nlohmann/json.hpp>

#include "irqbench/error.hpp"
#include "irqbench/gic.hpp"
#include "irqbench/rng.hpp"
#include "irqbench/scenarios.hpp"
#include "irqbench/stimulus.hpp"
#include "irqbench/timing.hpp"
#include "irqbench/trace.hpp"

namespace irqbench::platform {

using Nanos = std::int64_t;
using stimulus::Mode;

struct RunOptions {
  Mode mode = Mode::latency;
  // Desk-scale divisor applied to the stimulation pattern.
  std::uint64_t time_scale = stimulus::kDefaultTimeScale;
  // Replaces the (scaled) default pattern for the mode.
  std::optional<stimulus::StimulationPattern> pattern;
  // When false the pattern may carry pulses below the recognition threshold,
  // for probing the recognition rule itself.
  bool enforce_min_pulse = true;
};

struct RunStats {
  std::uint64_t phases = 0;
  std::uint64_t deliveries = 0;
  std::uint64_t spurious = 0;
  std::uint64_t ignored_pulses = 0;
};

struct RunResult {
  trace::TraceCapture capture;
  RunStats stats;
};

class Simulator {
public:
  Simulator(const scenarios::ScenarioConfig& scenario, const timing::TimingModel& timing,
            std::uint64_t seed, Nanos duration, const RunOptions& options)
      : scenario_(scenario), timing_(timing), seed_(seed), duration_(duration), options_(options),
        gic_(configure(scenario, options.mode)) {
    pattern_ = options.pattern ? *options.pattern
                               : stimulus::pattern_for(options.mode).scaled(options.time_scale);
    pattern_.mode = options.mode;
    if (options.enforce_min_pulse) {
      stimulus::validate(pattern_);
    } else if (pattern_.high <= 0 || pattern_.lines.empty()) {
      throw ConfigError("pattern needs a positive high phase and at least one line");
    }
    if (pattern_.lines != std::vector<unsigned>{0}) {
      throw ConfigError("the platform drives exactly one stimulated line (line 0)");
    }
    if (duration < pattern_.period()) {
      throw ConfigError("duration " + std::to_string(duration) +
                        " ns is shorter than one stimulation phase (" +
                        std::to_string(pattern_.period()) + " ns)");
    }

    const unsigned cores = scenario.enabled_cores;
    cores_.resize(cores);
    for (unsigned c = 0; c < cores; ++c) {
      cores_[c].rng = timing::PathRng::for_core(seed, c);
    }
    ctx_.cache = scenario.cache;
    ctx_.stack = scenario.stack;
    ctx_.contending_cores = scenario.contending_cores();
    ctx_.enabled_interrupts = gic_.enabled_for(0);
    if (scenario.memory_stressor) {
      std::vector<unsigned> all(gic::kMaxCores);
      for (unsigned c = 0; c < all.size(); ++c) all[c] = c;
      if (scenario.enabled_cores < gic::kMaxCores) all.resize(scenario.enabled_cores);
      ctx_.stressor = timing::run_memory_stressor(std::move(all), scenario.memory_array_bytes);
    }
    phases_ = pattern_.complete_phases(duration);
  }

  RunResult run() {
    RunResult out;
    out.capture.events.reserve(static_cast<std::size_t>(phases_) * 3);
    auto& events = out.capture.events;
    out.stats = run([&](const trace::TraceEvent& e) { events.push_back(e); });
    out.capture.metadata = metadata();
    return out;
  }

  // Stream events to a sink instead of collecting them; for captures too
  // large to hold in memory.
  RunStats run(std::function<void(const trace::TraceEvent&)> sink) {
    if (started_) {
      throw StateError("a simulator instance runs once");
    }
    started_ = true;
    sink_ = std::move(sink);
    if (phases_ > 0) {
      schedule(0, EventType::line_rise, 0, 0);
    }
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      if (ev.time > duration_) {
        break;
      }
      now_ = ev.time;
      dispatch(ev);
    }
    stats_.phases = phases_;
    sink_ = nullptr;
    return stats_;
  }

  // Capture metadata, including run statistics once the run has finished.
  nlohmann::json metadata() const {
    auto m = base_metadata();
    m["stats"] = {{"phases", stats_.phases},
                  {"deliveries", stats_.deliveries},
                  {"spurious", stats_.spurious},
                  {"ignored_pulses", stats_.ignored_pulses}};
    return m;
  }

  const stimulus::StimulationPattern& pattern() const { return pattern_; }

private:
  enum class EventType : std::uint8_t { line_rise, line_fall, recognize, acknowledge, isr_entry, isr_done };

  struct Event {
    Nanos time;
    std::uint64_t seq;
    EventType type;
    unsigned core;
    std::uint64_t arg;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  enum class CoreState : std::uint8_t { idle, signaling, handling };

  struct Core {
    CoreState state = CoreState::idle;
    gic::InterruptId current = gic::kSpuriousId;
    timing::PathRng rng{CounterRng(0, 0), CounterRng(0, 0), CounterRng(0, 0), CounterRng(0, 0)};
  };

  static gic::Distributor configure(const scenarios::ScenarioConfig& s, Mode mode) {
    scenarios::validate(s);
    if (!s.supports(mode)) {
      throw ConfigError(s.name + " is not defined for " + stimulus::to_string(mode) + " measurements");
    }
    const auto specs = scenarios::interrupt_specs(s, mode);
    return gic::Distributor::configure(specs, s.enabled_cores, s.priority_levels);
  }

  nlohmann::json base_metadata() const {
    return {{trace::meta::kScenario, scenario_.name},
            {trace::meta::kSeed, seed_},
            {trace::meta::kDurationNs, duration_},
            {trace::meta::kTimeScale, options_.time_scale},
            {trace::meta::kMode, stimulus::to_string(options_.mode)},
            {trace::meta::kChannels, std::max<unsigned>(scenario_.enabled_cores, 1)},
            {"stim_channel", 0},
            {"isr_channels", scenario_.enabled_cores},
            {"measured_core", 0},
            {"pattern",
             {{"high_ns", pattern_.high}, {"low_ns", pattern_.low}, {"phases", phases_}}},
            {"config", scenarios::to_json(scenario_)},
            {"timing", timing::to_map(timing_)}};
  }

  void schedule(Nanos time, EventType type, unsigned core, std::uint64_t arg) {
    queue_.push(Event{time, next_seq_++, type, core, arg});
  }

  void emit(trace::EventKind kind, std::uint16_t channel, std::uint32_t payload) {
    sink_({trace::quantize(static_cast<std::uint64_t>(now_)), kind, channel, payload});
  }

  void dispatch(const Event& ev) {
    switch (ev.type) {
      case EventType::line_rise: on_rise(ev.arg); break;
      case EventType::line_fall: on_fall(); break;
      case EventType::recognize: on_recognize(ev.arg); break;
      case EventType::acknowledge: on_acknowledge(ev.core); break;
      case EventType::isr_entry: on_isr_entry(ev.core); break;
      case EventType::isr_done: on_isr_done(ev.core); break;
    }
  }

  void on_rise(std::uint64_t phase) {
    gic_.assert_line(scenarios::kMeasuredId, true, now_);
    emit(trace::EventKind::hw_rising, 0, 0);
    schedule(now_ + pattern_.high, EventType::line_fall, 0, phase);
    schedule(now_ + timing::sample_recognize(timing_, line_rng_), EventType::recognize, 0, phase);
    if (phase + 1 < phases_) {
      schedule(pattern_.phase_start(phase + 1), EventType::line_rise, 0, phase + 1);
    }
  }

  void on_fall() {
    const auto outcome = gic_.assert_line(scenarios::kMeasuredId, false, now_);
    if (outcome == gic::Recognition::ignored &&
        gic_.spec(scenarios::kMeasuredId).trigger == gic::Trigger::edge &&
        pattern_.high < gic::kMinPulseWidth) {
      ++stats_.ignored_pulses;
    }
    emit(trace::EventKind::hw_falling, 0, 0);
    update_cores();
  }

  void on_recognize(std::uint64_t phase) {
    if (gic_.spec(scenarios::kMeasuredId).trigger == gic::Trigger::edge) {
      const auto outcome = gic_.settle(scenarios::kMeasuredId, now_);
      if (outcome == gic::Recognition::deferred) {
        // Recognition cannot complete before the minimum pulse width.
        schedule(pattern_.phase_start(phase) + gic::kMinPulseWidth, EventType::recognize, 0, phase);
        return;
      }
    }
    update_cores();
  }

  // Offer the highest-priority pending interrupt to every idle core. Busy
  // cores are refreshed too so that stale signals are withdrawn.
  void update_cores() {
    for (unsigned c = 0; c < cores_.size(); ++c) {
      const auto decision = gic_.filter(c);
      Core& core = cores_[c];
      if (core.state == CoreState::idle && decision.signal()) {
        core.state = CoreState::signaling;
        const Nanos delay = timing::sample_signal_path(timing_, ctx_, core.rng) +
                            timing::sample_ack(timing_, ctx_, core.rng);
        schedule(now_ + delay, EventType::acknowledge, c, 0);
      }
    }
  }

  void on_acknowledge(unsigned c) {
    Core& core = cores_[c];
    // Another core may have taken the interrupt; refresh this core's signal first.
    gic_.filter(c);
    const auto id = gic_.acknowledge(c, now_);
    if (id == gic::kSpuriousId) {
      ++stats_.spurious;
      core.state = CoreState::idle;
      update_cores();
      return;
    }
    core.state = CoreState::handling;
    core.current = id;
    ++stats_.deliveries;
    schedule(now_ + timing::sample_dispatch(timing_, ctx_, core.rng), EventType::isr_entry, c, 0);
    update_cores();
  }

  void on_isr_entry(unsigned c) {
    Core& core = cores_[c];
    // Only the measured interrupt's handler writes a trace event.
    if (core.current == scenarios::kMeasuredId) {
      emit(trace::EventKind::sw_event, static_cast<std::uint16_t>(c), core.current);
    }
    schedule(now_ + timing::sample_completion(timing_, ctx_, core.rng), EventType::isr_done, c, 0);
  }

  void on_isr_done(unsigned c) {
    Core& core = cores_[c];
    gic_.end_of_interrupt(c, core.current, now_);
    core.current = gic::kSpuriousId;
    core.state = CoreState::idle;
    update_cores();
  }

  scenarios::ScenarioConfig scenario_;
  timing::TimingModel timing_;
  std::uint64_t seed_;
  Nanos duration_;
  RunOptions options_;
  gic::Distributor gic_;
  stimulus::StimulationPattern pattern_;
  timing::PathContext ctx_;
  std::vector<Core> cores_;
  CounterRng line_rng_{seed_, streams::line(0)};
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t phases_ = 0;
  Nanos now_ = 0;
  RunStats stats_;
  std::function<void(const trace::TraceEvent&)> sink_;
  bool started_ = false;
};

inline RunResult simulate(const scenarios::ScenarioConfig& scenario, const timing::TimingModel& timing,
                          std::uint64_t seed, Nanos duration, const RunOptions& options = {}) {
  timing::validate(timing);
  return Simulator(scenario, timing, seed, duration, options).run();
}

inline trace::TraceCapture run(const scenarios::ScenarioConfig& scenario, const timing::TimingModel& timing,
                               std::uint64_t seed, Nanos duration, const RunOptions& options = {}) {
  return simulate(scenario, timing, seed, duration, options).capture;
}

}  // namespace irqbench::platform
