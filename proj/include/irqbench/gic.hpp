#pragma once

// GICv2 Distributor and per-core CPU interfaces, reduced to the IRQ path:
// recognition, highest-priority-pending selection, priority masking,
// acknowledge and end-of-interrupt. FIQs, groups, security states and SGI
// registers are not modeled. Preemption depth is one: while a core has an
// active interrupt nothing else is signaled to it.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irqbench/error.hpp"

namespace irqbench::gic {

using InterruptId = std::uint32_t;
using Priority = std::uint32_t;
using Nanos = std::int64_t;

inline constexpr InterruptId kMaxInterruptId = 1019;
inline constexpr InterruptId kSpuriousId = 1023;
inline constexpr unsigned kMaxCores = 4;
inline constexpr Priority kDefaultPriorityLevels = 16;
inline constexpr Priority kMaxPriorityLevels = 256;
inline constexpr Nanos kMinPulseWidth = 40;

enum class Trigger : std::uint8_t { edge, level };

enum class Lifecycle : std::uint8_t { inactive, pending, active, active_and_pending };

// deferred: an edge-triggered rising edge whose width is not yet known and
// whose minimum width has not yet elapsed; settle() decides it later.
enum class Recognition : std::uint8_t { recognized, ignored, deferred };

inline const char* to_string(Trigger t) {
  return t == Trigger::edge ? "edge" : "level";
}

inline const char* to_string(Lifecycle l) {
  switch (l) {
    case Lifecycle::inactive: return "inactive";
    case Lifecycle::pending: return "pending";
    case Lifecycle::active: return "active";
    case Lifecycle::active_and_pending: return "active-and-pending";
  }
  return "?";
}

// Bit i set means core i is a target.
struct CoreMask {
  std::uint8_t bits = 0;

  static constexpr CoreMask only(unsigned core) { return {static_cast<std::uint8_t>(1u << core)}; }
  static constexpr CoreMask first(unsigned count) {
    return {static_cast<std::uint8_t>((1u << count) - 1u)};
  }
  constexpr bool contains(unsigned core) const { return (bits >> core) & 1u; }
  constexpr bool empty() const { return bits == 0; }
  friend constexpr bool operator==(CoreMask, CoreMask) = default;
};

struct InterruptSpec {
  InterruptId id = 0;
  Trigger trigger = Trigger::edge;
  Priority priority = 0;
  CoreMask targets = CoreMask::only(0);
  bool enabled = true;
};

struct InterruptState {
  Lifecycle lifecycle = Lifecycle::inactive;
  bool line_level = false;
  // Qualifying edges observed while the interrupt was already pending or
  // active. Collapsed into a single re-delivery.
  std::uint32_t pend_count = 0;
};

struct CpuInterfaceState {
  Priority priority_mask = 0;
  Priority running_priority = 0;
  std::optional<InterruptId> signaled;
  std::optional<InterruptId> active;
};

struct SignalDecision {
  std::optional<InterruptId> id;  // empty means quiet

  bool signal() const { return id.has_value(); }
  static SignalDecision quiet() { return {}; }
  friend bool operator==(const SignalDecision&, const SignalDecision&) = default;
};

// Pure masking rule of the CPU interface.
constexpr bool passes_filter(Priority prio, Priority mask, Priority running) {
  return prio < mask && prio < running;
}

class Distributor {
public:
  static Distributor configure(std::span<const InterruptSpec> specs, unsigned cores,
                               Priority priority_levels = kDefaultPriorityLevels) {
    if (cores < 1 || cores > kMaxCores) {
      throw ConfigError("core count must be in 1.." + std::to_string(kMaxCores) + ", got " +
                        std::to_string(cores));
    }
    if (priority_levels < 1 || priority_levels > kMaxPriorityLevels) {
      throw ConfigError("priority levels must be in 1.." + std::to_string(kMaxPriorityLevels));
    }
    Distributor d;
    d.cores_ = cores;
    d.levels_ = priority_levels;
    d.index_.fill(-1);
    d.lines_.reserve(specs.size());
    for (const auto& s : specs) {
      if (s.id > kMaxInterruptId) {
        throw ConfigError("interrupt id " + std::to_string(s.id) + " out of range 0.." +
                          std::to_string(kMaxInterruptId));
      }
      if (d.index_[s.id] >= 0) {
        throw ConfigError("duplicate interrupt id " + std::to_string(s.id));
      }
      if (s.priority >= priority_levels) {
        throw ConfigError("priority " + std::to_string(s.priority) + " of interrupt " +
                          std::to_string(s.id) + " outside 0.." +
                          std::to_string(priority_levels - 1));
      }
      if (s.enabled && s.targets.empty()) {
        throw ConfigError("enabled interrupt " + std::to_string(s.id) + " has no target core");
      }
      if (s.targets.bits >> cores) {
        throw ConfigError("interrupt " + std::to_string(s.id) + " targets an unconfigured core");
      }
      d.index_[s.id] = 0;
      d.lines_.push_back(Line{s, {}, 0, false, 0});
    }
    // Scan order is ascending id so the first minimum wins equal-priority ties.
    std::sort(d.lines_.begin(), d.lines_.end(),
              [](const Line& a, const Line& b) { return a.spec.id < b.spec.id; });
    for (std::size_t i = 0; i < d.lines_.size(); ++i) {
      d.index_[d.lines_[i].spec.id] = static_cast<int>(i);
    }
    for (unsigned c = 0; c < cores; ++c) {
      d.cpus_[c].priority_mask = priority_levels;
      d.cpus_[c].running_priority = priority_levels;
    }
    return d;
  }

  unsigned cores() const { return cores_; }
  Priority priority_levels() const { return levels_; }
  Priority idle_priority() const { return levels_; }
  std::size_t size() const { return lines_.size(); }
  bool contains(InterruptId id) const { return id <= kMaxInterruptId && index_[id] >= 0; }

  const InterruptSpec& spec(InterruptId id) const { return line(id).spec; }
  const InterruptState& state(InterruptId id) const { return line(id).state; }
  const CpuInterfaceState& cpu(unsigned core) const { return cpus_.at(checked_core(core)); }

  // Number of enabled interrupts that may be forwarded to this core.
  std::size_t enabled_for(unsigned core) const {
    checked_core(core);
    return static_cast<std::size_t>(std::count_if(lines_.begin(), lines_.end(), [&](const Line& l) {
      return l.spec.enabled && l.spec.targets.contains(core);
    }));
  }

  void set_priority_mask(unsigned core, Priority mask) {
    if (mask > levels_) {
      throw ConfigError("priority mask above idle level");
    }
    cpus_.at(checked_core(core)).priority_mask = mask;
  }

  // Drive the input line. Edge-triggered lines qualify a rising edge only once
  // it has stayed high for kMinPulseWidth; shorter pulses are dropped.
  Recognition assert_line(InterruptId id, bool level, Nanos time) {
    Line& l = line(id);
    if (time < l.last_time) {
      throw StateError("time regression on interrupt " + std::to_string(id) + ": " +
                       std::to_string(time) + " < " + std::to_string(l.last_time));
    }
    l.last_time = time;
    const bool was = l.state.line_level;
    l.state.line_level = level;

    if (l.spec.trigger == Trigger::level) {
      if (level && !was) {
        return raise_level(l);
      }
      if (!level && was) {
        if (l.state.lifecycle == Lifecycle::pending) {
          l.state.lifecycle = Lifecycle::inactive;
        } else if (l.state.lifecycle == Lifecycle::active_and_pending) {
          l.state.lifecycle = Lifecycle::active;
        }
      }
      return Recognition::ignored;
    }

    if (level && !was) {
      l.awaiting = true;
      l.rise_time = time;
      return Recognition::deferred;
    }
    if (!level && was && l.awaiting) {
      l.awaiting = false;
      if (time - l.rise_time >= kMinPulseWidth) {
        apply_edge(l);
        return Recognition::recognized;
      }
    }
    return Recognition::ignored;
  }

  // Complete a deferred edge recognition once the minimum width has elapsed.
  Recognition settle(InterruptId id, Nanos time) {
    Line& l = line(id);
    if (time < l.last_time) {
      throw StateError("time regression on interrupt " + std::to_string(id));
    }
    l.last_time = time;
    if (!l.awaiting) {
      return Recognition::ignored;
    }
    if (time - l.rise_time < kMinPulseWidth) {
      return Recognition::deferred;
    }
    l.awaiting = false;
    apply_edge(l);
    return Recognition::recognized;
  }

  // Highest-priority pending interrupt for this core: minimal (priority, id).
  std::optional<InterruptId> select(unsigned core) const {
    checked_core(core);
    const Line* best = nullptr;
    for (const Line& l : lines_) {
      if (!l.spec.enabled || l.state.lifecycle != Lifecycle::pending ||
          !l.spec.targets.contains(core)) {
        continue;
      }
      if (best == nullptr || l.spec.priority < best->spec.priority) {
        best = &l;
      }
    }
    if (best == nullptr) {
      return std::nullopt;
    }
    return best->spec.id;
  }

  // Run selection then the CPU interface filter; updates the signaled id.
  SignalDecision filter(unsigned core) {
    auto& cpu = cpus_.at(checked_core(core));
    const auto candidate = select(core);
    if (candidate &&
        passes_filter(spec(*candidate).priority, cpu.priority_mask, cpu.running_priority)) {
      cpu.signaled = candidate;
      return {candidate};
    }
    cpu.signaled.reset();
    return SignalDecision::quiet();
  }

  // Read of the acknowledge register. A signal that went stale because another
  // core took the interrupt first returns the spurious id.
  InterruptId acknowledge(unsigned core, Nanos /*time*/) {
    auto& cpu = cpus_.at(checked_core(core));
    const auto signaled = cpu.signaled;
    cpu.signaled.reset();
    if (!signaled || cpu.active) {
      return kSpuriousId;
    }
    Line& l = line(*signaled);
    if (l.state.lifecycle != Lifecycle::pending) {
      return kSpuriousId;
    }
    const bool still_asserted = l.spec.trigger == Trigger::level && l.state.line_level;
    l.state.lifecycle = still_asserted ? Lifecycle::active_and_pending : Lifecycle::active;
    l.state.pend_count = 0;
    cpu.active = *signaled;
    cpu.running_priority = l.spec.priority;
    return *signaled;
  }

  void end_of_interrupt(unsigned core, InterruptId id, Nanos /*time*/) {
    auto& cpu = cpus_.at(checked_core(core));
    if (!contains(id)) {
      throw StateError("end of interrupt for unknown id " + std::to_string(id));
    }
    if (cpu.active != id) {
      throw StateError("end of interrupt for id " + std::to_string(id) +
                       " which is not active on core " + std::to_string(core));
    }
    Line& l = line(id);
    if (l.spec.trigger == Trigger::level) {
      l.state.lifecycle = l.state.line_level ? Lifecycle::pending : Lifecycle::inactive;
    } else {
      l.state.lifecycle = l.state.lifecycle == Lifecycle::active_and_pending
                              ? Lifecycle::pending
                              : Lifecycle::inactive;
    }
    l.state.pend_count = 0;
    cpu.active.reset();
    cpu.running_priority = levels_;
  }

private:
  struct Line {
    InterruptSpec spec;
    InterruptState state;
    Nanos last_time = 0;
    bool awaiting = false;
    Nanos rise_time = 0;
  };

  Distributor() = default;

  unsigned checked_core(unsigned core) const {
    if (core >= cores_) {
      throw StateError("core " + std::to_string(core) + " not configured");
    }
    return core;
  }

  Line& line(InterruptId id) {
    if (!contains(id)) {
      throw StateError("unknown interrupt id " + std::to_string(id));
    }
    return lines_[static_cast<std::size_t>(index_[id])];
  }
  const Line& line(InterruptId id) const {
    if (!contains(id)) {
      throw StateError("unknown interrupt id " + std::to_string(id));
    }
    return lines_[static_cast<std::size_t>(index_[id])];
  }

  static Recognition raise_level(Line& l) {
    switch (l.state.lifecycle) {
      case Lifecycle::inactive:
        l.state.lifecycle = Lifecycle::pending;
        return Recognition::recognized;
      case Lifecycle::active:
        l.state.lifecycle = Lifecycle::active_and_pending;
        return Recognition::recognized;
      default:
        return Recognition::ignored;
    }
  }

  static void apply_edge(Line& l) {
    switch (l.state.lifecycle) {
      case Lifecycle::inactive:
        l.state.lifecycle = Lifecycle::pending;
        break;
      case Lifecycle::active:
        l.state.lifecycle = Lifecycle::active_and_pending;
        ++l.state.pend_count;
        break;
      case Lifecycle::pending:
      case Lifecycle::active_and_pending:
        ++l.state.pend_count;
        break;
    }
  }

  unsigned cores_ = 1;
  Priority levels_ = kDefaultPriorityLevels;
  std::vector<Line> lines_;
  std::array<int, kMaxInterruptId + 1> index_{};
  std::array<CpuInterfaceState, kMaxCores> cpus_{};
};

}  // namespace irqbench::gic
