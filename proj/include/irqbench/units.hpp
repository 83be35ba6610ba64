#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irqbench/error.hpp"

namespace irqbench {

// "30s", "250ms", "40us", "1000ns" or a bare integer (ns). Fractions such as
// "9.75s" are accepted when the result is a whole number of nanoseconds.
inline std::int64_t parse_duration(const std::string& text) {
  struct Unit {
    const char* suffix;
    std::int64_t ns;
  };
  static constexpr Unit units[] = {{"ns", 1}, {"us", 1'000}, {"ms", 1'000'000}, {"s", 1'000'000'000}};
  std::string number = text;
  std::int64_t scale = 1;
  for (const auto& u : units) {
    const std::string suf = u.suffix;
    if (text.size() > suf.size() && text.compare(text.size() - suf.size(), suf.size(), suf) == 0) {
      number = text.substr(0, text.size() - suf.size());
      scale = u.ns;
      break;
    }
  }
  const auto bad = [&] { return ConfigError("invalid duration '" + text + "' (use e.g. 30s, 250ms, 40us, 1000ns)"); };
  if (number.empty() || number.find_first_not_of("0123456789.") != std::string::npos ||
      number.find('.') != number.rfind('.')) {
    throw bad();
  }
  const auto dot = number.find('.');
  std::string whole = number.substr(0, dot);
  std::string frac = dot == std::string::npos ? "" : number.substr(dot + 1);
  if (whole.empty()) whole = "0";
  if (whole.size() > 12) throw bad();
  std::int64_t ns = std::stoll(whole) * scale;
  std::int64_t place = scale;
  for (char c : frac) {
    if (place % 10 != 0) {
      if (c != '0') throw bad();
      continue;
    }
    place /= 10;
    ns += (c - '0') * place;
  }
  return ns;
}

// "1..10" or "1,2,5" or "7".
inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  const auto bad = [&] { return ConfigError("invalid seed list '" + text + "' (use e.g. 1..10 or 1,2,3)"); };
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  try {
    if (range != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, range));
      const auto hi = std::stoull(text.substr(range + 2));
      if (hi < lo || hi - lo > 100000) throw bad();
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      return seeds;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto part = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      std::size_t used = 0;
      seeds.push_back(std::stoull(part, &used));
      if (used != part.size()) throw bad();
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } catch (const std::logic_error&) {
    throw bad();
  }
  return seeds;
}

}  // namespace irqbench
