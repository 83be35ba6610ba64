#pragma once

// Registry of the test-cases T1-T7 and the benchmark compositions built from
// them. Names are stable CLI identifiers: "T1", "T4-36", "T6-2", "B-Lmax".

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irqbench/error.hpp"
#include "irqbench/gic.hpp"
#include "irqbench/stimulus.hpp"
#include "irqbench/timing.hpp"

namespace irqbench::scenarios {

using stimulus::Mode;
using timing::CacheMode;
using timing::StackKind;

// Id of the stimulated line.
inline constexpr gic::InterruptId kMeasuredId = 121;
inline constexpr gic::Priority kMeasuredPriority = 0;
inline constexpr std::uint64_t kT7ArrayBytes = 96ull * 1024 * 1024;

inline const std::vector<unsigned> kT4Variants{1, 36, 72, 108, 144, 180};
inline const std::vector<unsigned> kT6Variants{2, 3, 4};
inline constexpr unsigned kDefaultT4Variant = 180;
inline constexpr unsigned kDefaultT6Variant = 4;

struct ScenarioConfig {
  std::string name;
  std::set<Mode> modes;
  // id -> priority level, measured interrupt included.
  std::map<gic::InterruptId, gic::Priority> priorities;
  CacheMode cache = CacheMode::disabled;
  unsigned enabled_cores = 1;
  bool parallel_handling = false;
  bool memory_stressor = false;
  std::uint64_t memory_array_bytes = 0;
  StackKind stack = StackKind::bare_metal;
  gic::Priority priority_levels = gic::kDefaultPriorityLevels;

  std::size_t enabled_interrupt_count() const { return priorities.size(); }
  bool supports(Mode m) const { return modes.count(m) != 0; }

  // Interrupts other than the measured one.
  std::map<gic::InterruptId, gic::Priority> stressors() const {
    auto s = priorities;
    s.erase(kMeasuredId);
    return s;
  }

  // Cores racing for the measured interrupt.
  unsigned contending_cores() const { return parallel_handling ? enabled_cores : 1; }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline void validate(const ScenarioConfig& s) {
  if (s.name.empty()) {
    throw ConfigError("scenario needs a name");
  }
  if (s.modes.empty()) {
    throw ConfigError(s.name + ": no measurement mode");
  }
  if (s.enabled_cores < 1 || s.enabled_cores > gic::kMaxCores) {
    throw ConfigError(s.name + ": enabled cores must be in 1..4");
  }
  if (s.cache == CacheMode::invalidated && s.supports(Mode::throughput)) {
    throw ConfigError(s.name + ": cache invalidation is only feasible for latency measurements");
  }
  if (s.parallel_handling && s.enabled_cores < 2) {
    throw ConfigError(s.name + ": parallel handling needs at least 2 enabled cores");
  }
  auto measured = s.priorities.find(kMeasuredId);
  if (measured == s.priorities.end() || measured->second != kMeasuredPriority) {
    throw ConfigError(s.name + ": measured interrupt must be enabled at priority 0");
  }
  for (const auto& [id, prio] : s.priorities) {
    if (prio >= s.priority_levels) {
      throw ConfigError(s.name + ": priority of interrupt " + std::to_string(id) + " out of range");
    }
  }
  if (s.memory_stressor && s.memory_array_bytes == 0) {
    throw ConfigError(s.name + ": memory stressor without array size");
  }
}

// Interrupt ids for stressors: consecutive SPIs from 32, skipping the measured line.
inline std::vector<gic::InterruptId> stressor_ids(unsigned count) {
  std::vector<gic::InterruptId> ids;
  for (gic::InterruptId id = 32; ids.size() < count; ++id) {
    if (id != kMeasuredId) ids.push_back(id);
  }
  return ids;
}

// Distributor programming for a scenario. The measured interrupt is
// edge-triggered for latency runs and level-sensitive for throughput runs;
// with parallel handling it is level-sensitive in both and targets every
// enabled core. Stressors target core 0 only.
inline std::vector<gic::InterruptSpec> interrupt_specs(const ScenarioConfig& s, Mode mode) {
  std::vector<gic::InterruptSpec> specs;
  specs.reserve(s.priorities.size());
  for (const auto& [id, prio] : s.priorities) {
    gic::InterruptSpec spec;
    spec.id = id;
    spec.priority = prio;
    if (id == kMeasuredId) {
      const bool level = mode == Mode::throughput || s.parallel_handling;
      spec.trigger = level ? gic::Trigger::level : gic::Trigger::edge;
      spec.targets = s.parallel_handling ? gic::CoreMask::first(s.enabled_cores) : gic::CoreMask::only(0);
    } else {
      spec.trigger = gic::Trigger::level;
      spec.targets = gic::CoreMask::only(0);
    }
    specs.push_back(spec);
  }
  return specs;
}

namespace detail {

inline ScenarioConfig base(std::string name, std::set<Mode> modes, CacheMode cache, unsigned cores) {
  ScenarioConfig s;
  s.name = std::move(name);
  s.modes = std::move(modes);
  s.priorities[kMeasuredId] = kMeasuredPriority;
  s.cache = cache;
  s.enabled_cores = cores;
  return s;
}

inline bool contains(const std::vector<unsigned>& v, unsigned x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

inline std::string list(const std::vector<unsigned>& v) {
  std::string out;
  for (auto x : v) out += (out.empty() ? "" : ", ") + std::to_string(x);
  return out;
}

}  // namespace detail

inline ScenarioConfig test_case(unsigned id, std::optional<unsigned> variant = std::nullopt) {
  const std::set<Mode> both{Mode::latency, Mode::throughput};
  const std::set<Mode> latency{Mode::latency};
  if ((id < 1 || id > 7)) {
    throw ConfigError("unknown test-case T" + std::to_string(id) + " (valid: T1..T7)");
  }
  if (variant && id != 4 && id != 6) {
    throw ConfigError("test-case T" + std::to_string(id) + " has no variants");
  }
  switch (id) {
    case 1: return detail::base("T1", both, CacheMode::disabled, 1);
    case 2: return detail::base("T2", both, CacheMode::enabled, 1);
    case 3: return detail::base("T3", latency, CacheMode::invalidated, 1);
    case 4: {
      const unsigned n = variant.value_or(kDefaultT4Variant);
      if (!detail::contains(kT4Variants, n)) {
        throw ConfigError("invalid T4 variant " + std::to_string(n) + " (valid: " + detail::list(kT4Variants) + ")");
      }
      auto s = detail::base("T4-" + std::to_string(n), latency, CacheMode::disabled, 2);
      for (auto sid : stressor_ids(n)) s.priorities[sid] = s.priority_levels - 1;
      return s;
    }
    case 5: {
      auto s = detail::base("T5", latency, CacheMode::disabled, 2);
      const auto ids = stressor_ids(14);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        s.priorities[ids[i]] = static_cast<gic::Priority>(14 - i);
      }
      return s;
    }
    case 6: {
      const unsigned k = variant.value_or(kDefaultT6Variant);
      if (!detail::contains(kT6Variants, k)) {
        throw ConfigError("invalid T6 variant " + std::to_string(k) + " (valid: " + detail::list(kT6Variants) + ")");
      }
      auto s = detail::base("T6-" + std::to_string(k), both, CacheMode::disabled, k);
      s.parallel_handling = true;
      return s;
    }
    default: {
      auto s = detail::base("T7", latency, CacheMode::disabled, 4);
      s.memory_stressor = true;
      s.memory_array_bytes = kT7ArrayBytes;
      return s;
    }
  }
}

// Union of stressors. Cache modes combine as disabled < enabled/invalidated;
// enabled and invalidated together are a conflict. Shared stressor ids take
// the higher priority (smaller value). Modes are those both sides allow.
inline ScenarioConfig merge(const ScenarioConfig& a, const ScenarioConfig& b) {
  if (a == b) {
    return a;
  }
  if ((a.cache == CacheMode::enabled && b.cache == CacheMode::invalidated) ||
      (a.cache == CacheMode::invalidated && b.cache == CacheMode::enabled)) {
    throw ConfigError("cannot merge " + a.name + " and " + b.name + ": cache modes enabled and invalidated conflict");
  }
  if (a.stack != b.stack) {
    throw ConfigError("cannot merge " + a.name + " and " + b.name + ": different stack profiles");
  }
  if (a.priority_levels != b.priority_levels) {
    throw ConfigError("cannot merge " + a.name + " and " + b.name + ": different priority ranges");
  }
  ScenarioConfig m;
  std::set<std::string> parts;
  for (const auto* s : {&a, &b}) {
    std::string name = s->name;
    std::size_t pos = 0;
    while (true) {
      const auto plus = name.find('+', pos);
      parts.insert(name.substr(pos, plus - pos));
      if (plus == std::string::npos) break;
      pos = plus + 1;
    }
  }
  for (const auto& p : parts) m.name += (m.name.empty() ? "" : "+") + p;
  std::set_intersection(a.modes.begin(), a.modes.end(), b.modes.begin(), b.modes.end(),
                        std::inserter(m.modes, m.modes.begin()));
  if (m.modes.empty()) {
    throw ConfigError("cannot merge " + a.name + " and " + b.name + ": no common measurement mode");
  }
  m.priorities = a.priorities;
  for (const auto& [id, prio] : b.priorities) {
    auto [it, inserted] = m.priorities.emplace(id, prio);
    if (!inserted) it->second = std::min(it->second, prio);
  }
  m.cache = a.cache == CacheMode::disabled ? b.cache : a.cache;
  m.enabled_cores = std::max(a.enabled_cores, b.enabled_cores);
  m.parallel_handling = a.parallel_handling || b.parallel_handling;
  m.memory_stressor = a.memory_stressor || b.memory_stressor;
  m.memory_array_bytes = std::max(a.memory_array_bytes, b.memory_array_bytes);
  m.stack = a.stack;
  m.priority_levels = a.priority_levels;
  validate(m);
  return m;
}

struct BenchmarkDef {
  std::string name;
  std::vector<std::string> constituents;
  Mode mode = Mode::latency;
  ScenarioConfig config;
};

inline const std::vector<std::string> kBenchmarkNames{"B-Lmin", "B-Lmax", "B-Tmax"};

inline BenchmarkDef benchmark(const std::string& name, unsigned lmax_t6_cores = kDefaultT6Variant) {
  if (name == "B-Lmin") {
    auto cfg = test_case(2);
    return {name, {"T2"}, Mode::latency, cfg};
  }
  if (name == "B-Lmax") {
    auto t4 = test_case(4, 36);
    auto t6 = test_case(6, lmax_t6_cores);
    return {name, {t4.name, t6.name}, Mode::latency, merge(t4, t6)};
  }
  if (name == "B-Tmax") {
    auto t6 = test_case(6, 2);
    auto t2 = test_case(2);
    return {name, {t6.name, t2.name}, Mode::throughput, merge(t6, t2)};
  }
  throw ConfigError("unknown benchmark '" + name + "' (valid: B-Lmin, B-Lmax, B-Tmax)");
}

inline std::vector<std::string> valid_names() {
  std::vector<std::string> names{"T1", "T2", "T3"};
  for (auto v : kT4Variants) names.push_back("T4-" + std::to_string(v));
  names.push_back("T5");
  for (auto v : kT6Variants) names.push_back("T6-" + std::to_string(v));
  names.push_back("T7");
  for (const auto& b : kBenchmarkNames) names.push_back(b);
  return names;
}

struct Resolved {
  ScenarioConfig config;
  // Set for benchmark names: the mode the benchmark is defined for.
  std::optional<Mode> mode;
};

// Resolve a CLI identifier: "T1".."T7", "T4-<n>", "T6-<k>", a benchmark name,
// or several of those joined by '+' (merged).
inline Resolved resolve(const std::string& name, unsigned lmax_t6_cores = kDefaultT6Variant) {
  auto fail = [&] {
    std::string valid;
    for (const auto& n : valid_names()) valid += (valid.empty() ? "" : ", ") + n;
    return ConfigError("unknown scenario '" + name + "'; valid ids: " + valid);
  };
  if (name.find('+') != std::string::npos) {
    std::optional<ScenarioConfig> acc;
    std::size_t pos = 0;
    while (pos <= name.size()) {
      const auto plus = name.find('+', pos);
      const auto part = name.substr(pos, plus == std::string::npos ? std::string::npos : plus - pos);
      auto r = resolve(part, lmax_t6_cores);
      acc = acc ? merge(*acc, r.config) : r.config;
      if (plus == std::string::npos) break;
      pos = plus + 1;
    }
    return {*acc, std::nullopt};
  }
  if (name.rfind("B-", 0) == 0) {
    try {
      auto b = benchmark(name, lmax_t6_cores);
      b.config.name = b.name;
      return {b.config, b.mode};
    } catch (const ConfigError&) {
      throw fail();
    }
  }
  if (name.size() < 2 || name[0] != 'T' || name[1] < '1' || name[1] > '7') {
    throw fail();
  }
  const unsigned id = static_cast<unsigned>(name[1] - '0');
  std::optional<unsigned> variant;
  if (name.size() > 2) {
    if (name[2] != '-' || name.size() == 3) throw fail();
    const auto digits = name.substr(3);
    if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 4) throw fail();
    variant = static_cast<unsigned>(std::stoul(digits));
  }
  try {
    return {test_case(id, variant), std::nullopt};
  } catch (const ConfigError&) {
    throw fail();
  }
}

inline nlohmann::json to_json(const ScenarioConfig& s) {
  nlohmann::json modes = nlohmann::json::array();
  for (auto m : s.modes) modes.push_back(stimulus::to_string(m));
  nlohmann::json prios = nlohmann::json::object();
  for (const auto& [id, p] : s.priorities) prios[std::to_string(id)] = p;
  return {{"name", s.name},
          {"modes", modes},
          {"enabled_interrupts", s.enabled_interrupt_count()},
          {"priorities", prios},
          {"cache_mode", timing::to_string(s.cache)},
          {"enabled_cores", s.enabled_cores},
          {"parallel_handling", s.parallel_handling},
          {"memory_stressor", s.memory_stressor},
          {"memory_array_bytes", s.memory_array_bytes},
          {"stack_profile", timing::to_string(s.stack)},
          {"priority_levels", s.priority_levels},
          {"measured_interrupt", kMeasuredId}};
}

}  // namespace irqbench::scenarios
