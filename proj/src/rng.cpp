#include "privmdp/rng.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace privmdp {

namespace {

std::mt19937_64 keyed_engine(std::uint64_t seed, const StreamId& id) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::array<std::uint32_t, 9> words{lo(seed),     hi(seed),     id.domain,     lo(id.trial), hi(id.trial),
                                     lo(id.state), hi(id.state), lo(id.action), hi(id.action)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id) : seed_(seed), id_(id), engine_(keyed_engine(seed, id)) {}

double RngStream::uniform() {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double RngStream::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace privmdp
