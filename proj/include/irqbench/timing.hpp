#pragma once

// Per-step delays of the interrupt path (stimulus arrival to ISR entry), the
// software-stack dispatch profiles, and the contention/memory penalty models.
//
// Config file format: one `key = value` per line, '#' starts a comment,
// values are integer nanoseconds (or counts). Unknown keys are rejected.
// See README for the key list; to_config()/parse_config() round-trip.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "irqbench/error.hpp"
#include "irqbench/rng.hpp"

namespace irqbench::timing {

using Nanos = std::int64_t;

enum class CacheMode : std::uint8_t { disabled, enabled, invalidated };

inline const char* to_string(CacheMode m) {
  switch (m) {
    case CacheMode::disabled: return "disabled";
    case CacheMode::enabled: return "enabled";
    case CacheMode::invalidated: return "invalidated";
  }
  return "?";
}

inline CacheMode parse_cache_mode(const std::string& s) {
  if (s == "disabled") return CacheMode::disabled;
  if (s == "enabled") return CacheMode::enabled;
  if (s == "invalidated") return CacheMode::invalidated;
  throw ConfigError("unknown cache mode '" + s + "'");
}

enum class StackKind : std::uint8_t { bare_metal, rtos };

inline const char* to_string(StackKind k) { return k == StackKind::bare_metal ? "bare-metal" : "rtos"; }

inline StackKind parse_stack(const std::string& s) {
  if (s == "bare-metal") return StackKind::bare_metal;
  if (s == "rtos") return StackKind::rtos;
  throw ConfigError("unknown stack profile '" + s + "' (expected bare-metal or rtos)");
}

struct StackProfile {
  StackKind kind = StackKind::bare_metal;
  Nanos dispatch_base = 0;
  Nanos dispatch_jitter = 0;
  std::string description;

  friend bool operator==(const StackProfile&, const StackProfile&) = default;
};

// Uniform per-unit delay range [min, max].
struct DelayRange {
  Nanos min = 0;
  Nanos max = 0;

  friend bool operator==(const DelayRange&, const DelayRange&) = default;
};

struct TimingModel {
  // Steps 2-8 of the interrupt path.
  Nanos recognize = 40;
  Nanos select = 12;
  Nanos select_per_interrupt = 1;  // per additional enabled interrupt on the core
  Nanos forward = 8;
  Nanos signal = 8;
  Nanos ack = 20;
  Nanos vector = 16;
  // Upper bound of the uniform [0, jitter] added to each of the steps above.
  Nanos jitter = 4;

  Nanos uncached_penalty = 380;      // dispatch with caches disabled
  Nanos cache_refill_penalty = 520;  // dispatch after the ISR invalidated caches

  Nanos isr_body = 24;
  Nanos eoi = 20;

  // Added per GIC transaction (select, acknowledge, end-of-interrupt), one
  // uniform draw per contending core beyond the first.
  DelayRange contention{8, 24};
  // Added per ISR-path memory access while the memory stressor runs, one
  // uniform draw per stressing core.
  DelayRange memory_contention{2, 10};
  std::int64_t memory_accesses = 6;

  StackProfile bare_metal{StackKind::bare_metal, 106, 24,
                          "unoptimized bare-metal dispatcher, no scheduler or tick"};
  StackProfile rtos{StackKind::rtos, 114, 8, "RTOS dispatcher with narrower variation"};

  const StackProfile& profile(StackKind k) const { return k == StackKind::bare_metal ? bare_metal : rtos; }
  StackProfile& profile(StackKind k) { return k == StackKind::bare_metal ? bare_metal : rtos; }

  // Sum of the base step durations for the given stack with warm caches.
  Nanos minimum_path(StackKind k) const {
    return recognize + select + forward + signal + ack + vector + profile(k).dispatch_base;
  }

  friend bool operator==(const TimingModel&, const TimingModel&) = default;
};

inline void validate(const TimingModel& t) {
  const std::pair<const char*, Nanos> steps[] = {
      {"recognize_ns", t.recognize}, {"select_ns", t.select}, {"forward_ns", t.forward},
      {"signal_ns", t.signal},       {"ack_ns", t.ack},       {"vector_ns", t.vector}};
  if (t.jitter < 0) {
    throw ConfigError("jitter_ns must be non-negative");
  }
  for (const auto& [name, v] : steps) {
    if (v < 0) {
      throw ConfigError(std::string(name) + " must be non-negative");
    }
    if (t.jitter > 0 && t.jitter >= v) {
      throw ConfigError(std::string("jitter_ns must be below ") + name);
    }
  }
  const std::pair<const char*, Nanos> others[] = {
      {"select_per_interrupt_ns", t.select_per_interrupt},
      {"uncached_penalty_ns", t.uncached_penalty},
      {"cache_refill_penalty_ns", t.cache_refill_penalty},
      {"isr_body_ns", t.isr_body},
      {"eoi_ns", t.eoi},
      {"memory_accesses", t.memory_accesses}};
  for (const auto& [name, v] : others) {
    if (v < 0) {
      throw ConfigError(std::string(name) + " must be non-negative");
    }
  }
  for (const auto* r : {&t.contention, &t.memory_contention}) {
    if (r->min < 0 || r->max < r->min) {
      throw ConfigError("delay range must satisfy 0 <= min <= max");
    }
  }
  for (const auto* p : {&t.bare_metal, &t.rtos}) {
    if (p->dispatch_base <= 0) {
      throw ConfigError(std::string(to_string(p->kind)) + " dispatch base must be positive");
    }
    if (p->dispatch_jitter < 0) {
      throw ConfigError(std::string(to_string(p->kind)) + " dispatch jitter must be non-negative");
    }
  }
}

// Timing influence of the random-access memory stressor. It never touches
// simulated memory; it only lengthens ISR-path memory accesses.
struct MemoryStressor {
  std::vector<unsigned> cores;
  std::uint64_t array_bytes = 0;
};

inline MemoryStressor run_memory_stressor(std::vector<unsigned> cores, std::uint64_t array_bytes) {
  if (cores.empty()) {
    throw ConfigError("memory stressor needs at least one core");
  }
  if (array_bytes == 0) {
    throw ConfigError("memory stressor array size must be positive");
  }
  return {std::move(cores), array_bytes};
}

// What the path depends on besides the timing model itself.
struct PathContext {
  CacheMode cache = CacheMode::enabled;
  StackKind stack = StackKind::bare_metal;
  unsigned contending_cores = 1;
  std::size_t enabled_interrupts = 1;
  std::optional<MemoryStressor> stressor;
};

// Independent streams so that, for a fixed seed, enabling a penalty never
// shifts the jitter draws of the unpenalized path.
struct PathRng {
  CounterRng jitter;
  CounterRng contention;
  CounterRng memory;
  CounterRng dispatch;

  static PathRng for_core(std::uint64_t seed, unsigned core) {
    return {CounterRng(seed, streams::core(core, streams::kJitter)),
            CounterRng(seed, streams::core(core, streams::kContention)),
            CounterRng(seed, streams::core(core, streams::kMemory)),
            CounterRng(seed, streams::core(core, streams::kDispatch))};
  }
};

inline Nanos step(Nanos base, Nanos jitter, CounterRng& rng) {
  return base + (jitter > 0 ? rng.uniform(0, jitter) : 0);
}

// One GIC transaction's wait behind the other contending cores.
inline Nanos contention_delay(const TimingModel& t, unsigned contending_cores, CounterRng& rng) {
  Nanos d = 0;
  for (unsigned k = 1; k < contending_cores; ++k) {
    d += rng.uniform(t.contention.min, t.contention.max);
  }
  return d;
}

inline Nanos memory_delay(const TimingModel& t, const PathContext& ctx, CounterRng& rng) {
  if (!ctx.stressor) {
    return 0;
  }
  Nanos d = 0;
  for (std::int64_t a = 0; a < t.memory_accesses; ++a) {
    for (std::size_t c = 0; c < ctx.stressor->cores.size(); ++c) {
      d += rng.uniform(t.memory_contention.min, t.memory_contention.max);
    }
  }
  return d;
}

inline Nanos sample_recognize(const TimingModel& t, CounterRng& jitter) {
  return step(t.recognize, t.jitter, jitter);
}

// Steps 3-5: selection, forwarding, signaling.
inline Nanos sample_signal_path(const TimingModel& t, const PathContext& ctx, PathRng& rng) {
  const auto extra = ctx.enabled_interrupts > 1 ? static_cast<Nanos>(ctx.enabled_interrupts - 1) : 0;
  return step(t.select + t.select_per_interrupt * extra, t.jitter, rng.jitter) +
         contention_delay(t, ctx.contending_cores, rng.contention) +
         step(t.forward, t.jitter, rng.jitter) + step(t.signal, t.jitter, rng.jitter);
}

// Steps 6-7.
inline Nanos sample_ack(const TimingModel& t, const PathContext& ctx, PathRng& rng) {
  return step(t.ack, t.jitter, rng.jitter) + contention_delay(t, ctx.contending_cores, rng.contention);
}

// Steps 8-9: vector, stack dispatch up to ISR entry, cache and memory penalties.
inline Nanos sample_dispatch(const TimingModel& t, const PathContext& ctx, PathRng& rng) {
  const auto& p = t.profile(ctx.stack);
  Nanos d = step(t.vector, t.jitter, rng.jitter) + step(p.dispatch_base, p.dispatch_jitter, rng.dispatch);
  if (ctx.cache == CacheMode::disabled) {
    d += t.uncached_penalty;
  } else if (ctx.cache == CacheMode::invalidated) {
    d += t.cache_refill_penalty;
  }
  return d + memory_delay(t, ctx, rng.memory);
}

// ISR body plus the end-of-interrupt write.
inline Nanos sample_completion(const TimingModel& t, const PathContext& ctx, PathRng& rng) {
  return t.isr_body + t.eoi + contention_delay(t, ctx.contending_cores, rng.contention);
}

// Total stimulus-to-ISR-entry delay for an uncontested delivery.
inline Nanos isr_path_delay(const TimingModel& t, const PathContext& ctx, PathRng& rng) {
  const Nanos rec = sample_recognize(t, rng.jitter);
  const Nanos sig = sample_signal_path(t, ctx, rng);
  const Nanos ack = sample_ack(t, ctx, rng);
  return rec + sig + ack + sample_dispatch(t, ctx, rng);
}

// ---- flat key/value configuration -----------------------------------------

namespace detail {

template <typename F>
void for_each_field(TimingModel& t, F&& f) {
  f("recognize_ns", t.recognize);
  f("select_ns", t.select);
  f("select_per_interrupt_ns", t.select_per_interrupt);
  f("forward_ns", t.forward);
  f("signal_ns", t.signal);
  f("ack_ns", t.ack);
  f("vector_ns", t.vector);
  f("jitter_ns", t.jitter);
  f("uncached_penalty_ns", t.uncached_penalty);
  f("cache_refill_penalty_ns", t.cache_refill_penalty);
  f("isr_body_ns", t.isr_body);
  f("eoi_ns", t.eoi);
  f("contention_min_ns", t.contention.min);
  f("contention_max_ns", t.contention.max);
  f("memory_contention_min_ns", t.memory_contention.min);
  f("memory_contention_max_ns", t.memory_contention.max);
  f("memory_accesses", t.memory_accesses);
  f("bare_metal.dispatch_base_ns", t.bare_metal.dispatch_base);
  f("bare_metal.dispatch_jitter_ns", t.bare_metal.dispatch_jitter);
  f("rtos.dispatch_base_ns", t.rtos.dispatch_base);
  f("rtos.dispatch_jitter_ns", t.rtos.dispatch_jitter);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::map<std::string, Nanos> to_map(const TimingModel& model) {
  auto copy = model;
  std::map<std::string, Nanos> out;
  detail::for_each_field(copy, [&](const char* key, Nanos& v) { out[key] = v; });
  return out;
}

inline std::string to_config(const TimingModel& model) {
  auto copy = model;
  std::ostringstream os;
  os << "# interrupt path timing model, values in ns\n";
  detail::for_each_field(copy, [&](const char* key, Nanos& v) { os << key << " = " << v << '\n'; });
  return os.str();
}

// Keys not present keep their defaults. The result is validated.
inline TimingModel parse_config(const std::string& text, TimingModel base = {}) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const auto line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("timing config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    bool found = false;
    detail::for_each_field(base, [&](const char* k, Nanos& v) {
      if (key != k) return;
      found = true;
      std::size_t used = 0;
      try {
        v = std::stoll(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size()) {
        throw ConfigError("timing config line " + std::to_string(lineno) + ": '" + value +
                          "' is not an integer");
      }
    });
    if (!found) {
      throw ConfigError("timing config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  validate(base);
  return base;
}

}  // namespace irqbench::timing
