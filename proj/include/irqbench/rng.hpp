#pragma once

#include <cstdint>

namespace irqbench {

// Counter-based generator: SplitMix64 finalizer applied to
//
//   x = seed + (counter + 1) * 0x9E3779B97F4A7C15 + stream * 0xD1B54A32D192ED03
//
// Every (seed, stream, counter) triple maps to one output, so a stream can be
// reproduced in any language without replaying the others. The simulator
// draws each random quantity from its own stream; see stream ids below.
class CounterRng {
public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter) noexcept {
    return mix(seed + (counter + 1) * 0x9E3779B97F4A7C15ULL +
               stream * 0xD1B54A32D192ED03ULL);
  }

  constexpr std::uint64_t next() noexcept {
    return at(seed_, stream_, counter_++);
  }

  // Uniform integer in [lo, hi] by 128-bit multiply-high. lo > hi yields lo.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) noexcept {
    if (hi <= lo) {
      return lo;
    }
    auto span = static_cast<unsigned __int128>(hi - lo) + 1;
    auto r = static_cast<unsigned __int128>(next());
    return lo + static_cast<std::int64_t>((r * span) >> 64);
  }

  // Uniform double in [0, 1).
  double unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream() const noexcept { return stream_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Stream ids used by the platform simulator. Per-core streams are offset by
// 16 * core so that adding a core never perturbs another core's draws.
namespace streams {
inline constexpr std::uint64_t kJitter = 0;
inline constexpr std::uint64_t kContention = 1;
inline constexpr std::uint64_t kMemory = 2;
inline constexpr std::uint64_t kDispatch = 3;
inline constexpr std::uint64_t kPerCore = 16;
inline constexpr std::uint64_t kLineBase = 0x1000;

constexpr std::uint64_t core(unsigned core, std::uint64_t purpose) noexcept {
  return kPerCore * core + purpose;
}
constexpr std::uint64_t line(unsigned line) noexcept { return kLineBase + line; }
}  // namespace streams

}  // namespace irqbench
