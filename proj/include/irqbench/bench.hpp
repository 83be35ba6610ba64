#pragma once

// Benchmark orchestration: run a benchmark's configuration across seeds and
// stack profiles and pool the per-seed samples.

#include <algorithm>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "irqbench/analysis.hpp"
#include "irqbench/platform.hpp"
#include "irqbench/scenarios.hpp"
#include "irqbench/timing.hpp"

namespace irqbench::bench {

struct SeedRun {
  std::uint64_t seed = 0;
  analysis::SummaryReport report;
};

struct Aggregate {
  std::string benchmark;
  timing::StackKind stack = timing::StackKind::bare_metal;
  std::vector<SeedRun> runs;
  analysis::SummaryReport pooled;
};

struct Options {
  // Capture length before desk scaling; 0 picks the procedure default.
  std::int64_t duration = 0;
  std::uint64_t time_scale = stimulus::kDefaultTimeScale;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline analysis::SummaryReport run_one(const scenarios::ScenarioConfig& config, stimulus::Mode mode,
                                       const timing::TimingModel& timing, std::uint64_t seed,
                                       const Options& opt) {
  platform::RunOptions ro;
  ro.mode = mode;
  ro.time_scale = opt.time_scale;
  const auto full = opt.duration > 0 ? opt.duration : stimulus::capture_length(mode);
  const auto duration = full / static_cast<std::int64_t>(opt.time_scale);
  const auto capture = platform::run(config, timing, seed, duration, ro);
  return analysis::analyze(capture, mode);
}

inline Aggregate run(const scenarios::BenchmarkDef& def, timing::StackKind stack, const timing::TimingModel& timing,
                     const std::vector<std::uint64_t>& seeds, const Options& opt = {}) {
  auto config = def.config;
  config.name = def.name;
  config.stack = stack;

  Aggregate agg;
  agg.benchmark = def.name;
  agg.stack = stack;
  agg.runs.resize(seeds.size());

  // Each run owns its simulator; results land in seed order.
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::max(1u, opt.threads ? opt.threads : hw);
  for (std::size_t begin = 0; begin < seeds.size(); begin += workers) {
    std::vector<std::future<analysis::SummaryReport>> batch;
    const auto end = std::min(seeds.size(), begin + workers);
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                 [&, i] { return run_one(config, def.mode, timing, seeds[i], opt); }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      agg.runs[i] = {seeds[i], batch[i - begin].get()};
    }
  }

  std::vector<double> pooled;
  std::uint64_t misses = 0;
  std::vector<std::string> warnings;
  for (const auto& r : agg.runs) {
    pooled.insert(pooled.end(), r.report.samples.begin(), r.report.samples.end());
    misses += r.report.misses;
    for (const auto& w : r.report.warnings) warnings.push_back("seed " + std::to_string(r.seed) + ": " + w);
  }
  nlohmann::json meta = {{"benchmark", def.name},
                         {"constituents", def.constituents},
                         {"stack_profile", timing::to_string(stack)},
                         {"seeds", seeds},
                         {"time_scale", opt.time_scale},
                         {"config", scenarios::to_json(config)},
                         {"timing", timing::to_map(timing)}};
  agg.pooled = analysis::make_report(def.name, def.mode, std::move(pooled), misses, std::move(meta),
                                     std::move(warnings));
  return agg;
}

}  // namespace irqbench::bench
