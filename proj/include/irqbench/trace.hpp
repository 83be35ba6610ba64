#pragma once

// Timestamped event capture on a common 4 ns timeline, plus the binary
// container format ("ITRC") and CSV export.
//
// Binary layout, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "ITRC"
//   4       2     version (u16) = 1
//   6       4     tick resolution in ns (u32) = 4
//   10      4     metadata length N (u32)
//   14      N     metadata, UTF-8 JSON object
//   14+N    15*k  records: tick u64, kind u8, channel u16, payload u32
//
// Records must be sorted by tick. kind: 0 hw-rising, 1 hw-falling, 2 sw-event.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "irqbench/error.hpp"

namespace irqbench::trace {

using Tick = std::uint64_t;

inline constexpr std::uint32_t kTickNs = 4;
inline constexpr std::array<char, 4> kMagic{'I', 'T', 'R', 'C'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderFixedSize = 14;
inline constexpr std::size_t kRecordSize = 15;

// Last tick at or before the given time.
constexpr Tick quantize(std::uint64_t time_ns, std::uint32_t tick_ns = kTickNs) {
  return time_ns / tick_ns;
}

enum class EventKind : std::uint8_t { hw_rising = 0, hw_falling = 1, sw_event = 2 };

inline const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::hw_rising: return "hw-rising";
    case EventKind::hw_falling: return "hw-falling";
    case EventKind::sw_event: return "sw-event";
  }
  return "?";
}

struct TraceEvent {
  Tick tick = 0;
  EventKind kind = EventKind::sw_event;
  std::uint16_t channel = 0;
  std::uint32_t payload = 0;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Metadata keys the writer expects. Anything else in the object is carried
// through untouched.
namespace meta {
inline constexpr const char* kScenario = "scenario";
inline constexpr const char* kSeed = "seed";
inline constexpr const char* kDurationNs = "duration_ns";
inline constexpr const char* kTimeScale = "time_scale";
inline constexpr const char* kMode = "mode";
inline constexpr const char* kChannels = "channels";
}  // namespace meta

struct TraceCapture {
  std::uint32_t tick_ns = kTickNs;
  std::vector<TraceEvent> events;
  nlohmann::json metadata = nlohmann::json::object();

  bool sorted() const {
    return std::is_sorted(events.begin(), events.end(),
                          [](const TraceEvent& a, const TraceEvent& b) { return a.tick < b.tick; });
  }

  // Channel bound from metadata; 65536 when absent.
  std::uint32_t channel_count() const {
    if (metadata.is_object() && metadata.contains(meta::kChannels)) {
      return metadata.at(meta::kChannels).get<std::uint32_t>();
    }
    return 1u << 16;
  }

  friend bool operator==(const TraceCapture&, const TraceCapture&) = default;
};

// Checks capture invariants; throws ConfigError on violation.
inline void validate(const TraceCapture& c) {
  if (c.tick_ns == 0) {
    throw ConfigError("tick resolution must be positive");
  }
  if (!c.metadata.is_object()) {
    throw ConfigError("capture metadata must be a JSON object");
  }
  if (!c.sorted()) {
    throw ConfigError("capture events are not sorted by tick");
  }
  const auto channels = c.channel_count();
  for (const auto& e : c.events) {
    if (e.channel >= channels) {
      throw ConfigError("event channel " + std::to_string(e.channel) + " >= channel count " +
                        std::to_string(channels));
    }
    if (e.kind != EventKind::sw_event && e.payload != 0) {
      throw ConfigError("hardware events carry no payload");
    }
  }
}

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(in[offset + i]) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace detail

inline std::string encode(const TraceCapture& capture) {
  validate(capture);
  const std::string meta = capture.metadata.dump();
  std::string out;
  out.reserve(kHeaderFixedSize + meta.size() + kRecordSize * capture.events.size());
  out.append(kMagic.data(), kMagic.size());
  detail::put_le<std::uint16_t>(out, kVersion);
  detail::put_le<std::uint32_t>(out, capture.tick_ns);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(meta.size()));
  out.append(meta);
  for (const auto& e : capture.events) {
    detail::put_le<std::uint64_t>(out, e.tick);
    detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(e.kind));
    detail::put_le<std::uint16_t>(out, e.channel);
    detail::put_le<std::uint32_t>(out, e.payload);
  }
  return out;
}

inline TraceCapture decode(std::span<const std::uint8_t> in) {
  if (in.size() < kMagic.size() || std::memcmp(in.data(), kMagic.data(), kMagic.size()) != 0) {
    throw TraceFormatError("bad magic, expected \"ITRC\"", 0);
  }
  if (in.size() < kHeaderFixedSize) {
    throw TraceFormatError("truncated header", in.size());
  }
  const auto version = detail::get_le<std::uint16_t>(in, 4);
  if (version != kVersion) {
    throw TraceFormatError("unsupported version " + std::to_string(version), 4);
  }
  TraceCapture c;
  c.tick_ns = detail::get_le<std::uint32_t>(in, 6);
  if (c.tick_ns == 0) {
    throw TraceFormatError("zero tick resolution", 6);
  }
  const auto meta_len = detail::get_le<std::uint32_t>(in, 10);
  if (in.size() - kHeaderFixedSize < meta_len) {
    throw TraceFormatError("truncated metadata", in.size());
  }
  const auto* meta_begin = reinterpret_cast<const char*>(in.data() + kHeaderFixedSize);
  try {
    c.metadata = nlohmann::json::parse(meta_begin, meta_begin + meta_len);
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceFormatError(std::string("metadata is not valid JSON: ") + e.what(),
                           kHeaderFixedSize);
  }
  if (!c.metadata.is_object()) {
    throw TraceFormatError("metadata is not a JSON object", kHeaderFixedSize);
  }

  std::size_t off = kHeaderFixedSize + meta_len;
  const std::size_t body = in.size() - off;
  c.events.reserve(body / kRecordSize);
  const auto channels = c.channel_count();
  Tick last = 0;
  while (off < in.size()) {
    if (in.size() - off < kRecordSize) {
      throw TraceFormatError("truncated record", off);
    }
    TraceEvent e;
    e.tick = detail::get_le<std::uint64_t>(in, off);
    const auto kind = detail::get_le<std::uint8_t>(in, off + 8);
    if (kind > 2) {
      throw TraceFormatError("unknown event kind " + std::to_string(kind), off + 8);
    }
    e.kind = static_cast<EventKind>(kind);
    e.channel = detail::get_le<std::uint16_t>(in, off + 9);
    e.payload = detail::get_le<std::uint32_t>(in, off + 11);
    if (!c.events.empty() && e.tick < last) {
      throw TraceFormatError("unsorted ticks", off);
    }
    if (e.channel >= channels) {
      throw TraceFormatError("channel out of range", off + 9);
    }
    last = e.tick;
    c.events.push_back(e);
    off += kRecordSize;
  }
  return c;
}

inline void write(const TraceCapture& capture, std::ostream& sink) {
  const auto bytes = encode(capture);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!sink) {
    throw Error("failed writing trace stream");
  }
}

inline TraceCapture read(std::istream& source) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source),
                                  std::istreambuf_iterator<char>()};
  return decode(bytes);
}

// Plot-friendly export: tick,kind,channel,payload with numeric kind.
inline void write_csv(const TraceCapture& capture, std::ostream& sink) {
  sink << "tick,kind,channel,payload\n";
  for (const auto& e : capture.events) {
    sink << e.tick << ',' << static_cast<unsigned>(e.kind) << ',' << e.channel << ','
         << e.payload << '\n';
  }
}

}  // namespace irqbench::trace
