#pragma once

// Measurement extraction from a capture.
//
// Latency: for phase i with rising edge A_i, B_i is the first sw-event on the
// measured core's channel in [A_i, A_{i+1}) (the last phase is open-ended);
// the sample is (B_i - A_i) * tick_ns. Phases without such an event are
// misses.
//
// Throughput: for phase i, count sw-events on the ISR channels in
// [A_i, A_{i+1}) and divide by the high-phase length. The last phase counts
// only if the capture covers a full period after its edge (period taken from
// the previous phase); with fewer than two edges there are no samples.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irqbench/error.hpp"
#include "irqbench/stimulus.hpp"
#include "irqbench/trace.hpp"

namespace irqbench::analysis {

using trace::EventKind;
using trace::Tick;
using trace::TraceCapture;

inline constexpr int kReportSchemaVersion = 1;

struct LatencySample {
  std::uint64_t phase = 0;
  Tick a = 0;
  Tick b = 0;
  std::uint64_t latency_ns = 0;

  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

struct ThroughputSample {
  std::uint64_t phase = 0;
  std::uint64_t isr_count = 0;
  std::uint64_t high_duration_ns = 0;
  double throughput_hz = 0.0;

  friend bool operator==(const ThroughputSample&, const ThroughputSample&) = default;
};

struct LatencySet {
  std::vector<LatencySample> samples;
  std::uint64_t misses = 0;
};

struct ThroughputSet {
  std::vector<ThroughputSample> samples;
  std::vector<std::string> warnings;
};

inline std::vector<Tick> segment_phases(const TraceCapture& capture, std::uint16_t channel) {
  std::vector<Tick> edges;
  for (const auto& e : capture.events) {
    if (e.kind == EventKind::hw_rising && e.channel == channel) {
      edges.push_back(e.tick);
    }
  }
  // Captures are sorted; sort anyway so unsorted in-memory input is harmless.
  std::sort(edges.begin(), edges.end());
  return edges;
}

namespace detail {

inline std::vector<Tick> sw_ticks(const TraceCapture& capture, const std::set<std::uint16_t>& channels) {
  std::vector<Tick> ticks;
  for (const auto& e : capture.events) {
    if (e.kind == EventKind::sw_event && channels.count(e.channel)) {
      ticks.push_back(e.tick);
    }
  }
  std::sort(ticks.begin(), ticks.end());
  return ticks;
}

inline std::optional<Tick> capture_end(const TraceCapture& c) {
  if (c.metadata.is_object() && c.metadata.contains(trace::meta::kDurationNs)) {
    const auto ns = c.metadata.at(trace::meta::kDurationNs).get<std::int64_t>();
    if (ns >= 0) return trace::quantize(static_cast<std::uint64_t>(ns), c.tick_ns);
  }
  return std::nullopt;
}

inline std::optional<std::uint64_t> pattern_high_ns(const TraceCapture& c) {
  if (c.metadata.is_object() && c.metadata.contains("pattern") &&
      c.metadata.at("pattern").contains("high_ns")) {
    return c.metadata.at("pattern").at("high_ns").get<std::uint64_t>();
  }
  return std::nullopt;
}

}  // namespace detail

inline LatencySet latencies(const TraceCapture& capture, std::uint16_t stim_channel,
                            std::uint16_t isr_channel) {
  const auto edges = segment_phases(capture, stim_channel);
  const auto isr = detail::sw_ticks(capture, {isr_channel});
  LatencySet out;
  auto it = isr.begin();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Tick a = edges[i];
    it = std::lower_bound(it, isr.end(), a);
    const bool last = i + 1 == edges.size();
    if (it != isr.end() && (last || *it < edges[i + 1])) {
      out.samples.push_back({i, a, *it, (*it - a) * capture.tick_ns});
    } else {
      ++out.misses;
    }
  }
  return out;
}

inline ThroughputSet throughputs(const TraceCapture& capture, std::uint16_t stim_channel,
                                 const std::set<std::uint16_t>& isr_channels) {
  const auto edges = segment_phases(capture, stim_channel);
  ThroughputSet out;
  if (edges.size() < 2) {
    out.warnings.push_back("fewer than 2 rising edges on channel " + std::to_string(stim_channel) +
                           "; no throughput samples");
    return out;
  }
  const auto isr = detail::sw_ticks(capture, isr_channels);

  // High length per phase from the falling edge following each rising edge.
  std::vector<Tick> falls;
  for (const auto& e : capture.events) {
    if (e.kind == EventKind::hw_falling && e.channel == stim_channel) falls.push_back(e.tick);
  }
  std::sort(falls.begin(), falls.end());
  const auto fallback_high = detail::pattern_high_ns(capture);

  const auto end = detail::capture_end(capture);
  std::size_t phases = edges.size() - 1;
  Tick last_close = 0;
  if (end) {
    const Tick period = edges.back() - edges[edges.size() - 2];
    last_close = edges.back() + period;
    if (last_close <= *end) phases = edges.size();
  }

  for (std::size_t i = 0; i < phases; ++i) {
    const Tick a = edges[i];
    const Tick close = i + 1 < edges.size() ? edges[i + 1] : last_close;
    std::uint64_t high_ns = 0;
    auto f = std::upper_bound(falls.begin(), falls.end(), a);
    if (f != falls.end() && *f <= close) {
      high_ns = (*f - a) * capture.tick_ns;
    } else if (fallback_high) {
      high_ns = *fallback_high;
    }
    if (high_ns == 0) {
      out.warnings.push_back("phase " + std::to_string(i) + " has no measurable high phase; skipped");
      continue;
    }
    const auto lo = std::lower_bound(isr.begin(), isr.end(), a);
    const auto hi = std::lower_bound(lo, isr.end(), close);
    const auto count = static_cast<std::uint64_t>(hi - lo);
    out.samples.push_back({i, count, high_ns, static_cast<double>(count) / (static_cast<double>(high_ns) * 1e-9)});
  }
  return out;
}

struct Summary {
  std::size_t count = 0;
  double min = 0, median = 0, max = 0, p95 = 0, p99 = 0;
};

// Nearest-rank percentile on sorted data.
inline double percentile(std::span<const double> sorted, double p) {
  const auto n = sorted.size();
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

// Median of an even-length set is the arithmetic midpoint of the two middle values.
inline Summary summarize(std::vector<double> values) {
  if (values.empty()) {
    throw ConfigError("cannot summarize an empty sample set");
  }
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  Summary s;
  s.count = n;
  s.min = values.front();
  s.max = values.back();
  s.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
  s.p95 = percentile(values, 0.95);
  s.p99 = percentile(values, 0.99);
  return s;
}

inline std::vector<double> values(const LatencySet& set) {
  std::vector<double> v;
  v.reserve(set.samples.size());
  for (const auto& s : set.samples) v.push_back(static_cast<double>(s.latency_ns));
  return v;
}

inline std::vector<double> values(const ThroughputSet& set) {
  std::vector<double> v;
  v.reserve(set.samples.size());
  for (const auto& s : set.samples) v.push_back(s.throughput_hz);
  return v;
}

struct SummaryReport {
  std::string scenario;
  stimulus::Mode mode = stimulus::Mode::latency;
  std::string unit;
  std::uint64_t misses = 0;
  std::vector<double> samples;
  std::optional<Summary> stats;  // empty when there are no samples
  std::vector<std::string> warnings;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t count() const { return samples.size(); }
};

inline SummaryReport make_report(std::string scenario, stimulus::Mode mode, std::vector<double> samples,
                                 std::uint64_t misses = 0, nlohmann::json metadata = nlohmann::json::object(),
                                 std::vector<std::string> warnings = {}) {
  SummaryReport r;
  r.scenario = std::move(scenario);
  r.mode = mode;
  r.unit = mode == stimulus::Mode::latency ? "ns" : "Hz";
  r.misses = misses;
  if (!samples.empty()) r.stats = summarize(samples);
  r.samples = std::move(samples);
  r.warnings = std::move(warnings);
  r.metadata = std::move(metadata);
  return r;
}

inline nlohmann::json to_json(const SummaryReport& r) {
  auto stat = [&](double Summary::*field) -> nlohmann::json {
    return r.stats ? nlohmann::json((*r.stats).*field) : nlohmann::json(nullptr);
  };
  return {{"schema_version", kReportSchemaVersion},
          {"scenario", r.scenario},
          {"mode", stimulus::to_string(r.mode)},
          {"unit", r.unit},
          {"count", r.count()},
          {"misses", r.misses},
          {"min", stat(&Summary::min)},
          {"median", stat(&Summary::median)},
          {"max", stat(&Summary::max)},
          {"p95", stat(&Summary::p95)},
          {"p99", stat(&Summary::p99)},
          {"samples", r.samples},
          {"warnings", r.warnings},
          {"metadata", r.metadata}};
}

inline SummaryReport report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
    throw ConfigError("unsupported report schema version");
  }
  auto r = make_report(j.at("scenario").get<std::string>(), stimulus::parse_mode(j.at("mode").get<std::string>()),
                       j.at("samples").get<std::vector<double>>(), j.at("misses").get<std::uint64_t>(),
                       j.value("metadata", nlohmann::json::object()),
                       j.value("warnings", std::vector<std::string>{}));
  return r;
}

// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// One row per sample; summary columns repeat on every row so the file can be
// grouped or filtered without a second table. A report without samples still
// writes one row with an empty phase/sample.
inline void write_csv(const SummaryReport& r, std::ostream& os) {
  os << "schema_version,scenario,mode,unit,count,misses,min,median,max,p95,p99,index,sample\n";
  auto prefix = [&] {
    os << kReportSchemaVersion << ',' << r.scenario << ',' << stimulus::to_string(r.mode) << ',' << r.unit << ','
       << r.count() << ',' << r.misses << ',';
    if (r.stats) {
      for (double v : {r.stats->min, r.stats->median, r.stats->max, r.stats->p95, r.stats->p99}) {
        os << format_number(v) << ',';
      }
    } else {
      os << ",,,,,";
    }
  };
  if (r.samples.empty()) {
    prefix();
    os << ",\n";
    return;
  }
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    prefix();
    os << i << ',' << format_number(r.samples[i]) << '\n';
  }
}

// Extract and summarize the measurement a capture was recorded for. Channel
// roles come from the capture metadata (stim_channel, measured_core,
// isr_channels) unless overridden.
struct AnalyzeOptions {
  std::optional<std::uint16_t> stim_channel;
  std::optional<std::uint16_t> isr_channel;               // latency
  std::optional<std::set<std::uint16_t>> isr_channels;    // throughput
};

inline SummaryReport analyze(const TraceCapture& capture, stimulus::Mode mode, const AnalyzeOptions& opt = {}) {
  const auto& m = capture.metadata;
  if (m.is_object() && m.contains(trace::meta::kMode)) {
    const auto recorded = stimulus::parse_mode(m.at(trace::meta::kMode).get<std::string>());
    if (recorded != mode) {
      throw ConfigError(std::string("capture was recorded in ") + stimulus::to_string(recorded) +
                        " mode, not " + stimulus::to_string(mode));
    }
  }
  const auto stim = opt.stim_channel.value_or(m.value("stim_channel", std::uint16_t{0}));
  const auto scenario = m.value(trace::meta::kScenario, std::string("unknown"));
  if (mode == stimulus::Mode::latency) {
    const auto isr = opt.isr_channel.value_or(m.value("measured_core", std::uint16_t{0}));
    const auto set = latencies(capture, stim, isr);
    return make_report(scenario, mode, values(set), set.misses, m);
  }
  std::set<std::uint16_t> channels;
  if (opt.isr_channels) {
    channels = *opt.isr_channels;
  } else {
    const auto n = m.value("isr_channels", std::uint16_t{1});
    for (std::uint16_t c = 0; c < n; ++c) channels.insert(c);
  }
  auto set = throughputs(capture, stim, channels);
  return make_report(scenario, mode, values(set), 0, m, std::move(set.warnings));
}

}  // namespace irqbench::analysis
