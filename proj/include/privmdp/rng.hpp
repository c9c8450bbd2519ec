#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace privmdp {

/// Identifies one independent substream under a master seed.
struct StreamId {
  std::uint64_t trial = 0;
  std::uint64_t state = 0;
  std::uint64_t action = 0;
  /// Separates unrelated consumers (privatization, model generation, tests).
  std::uint32_t domain = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

namespace domain {
inline constexpr std::uint32_t kPrivatize = 0;
inline constexpr std::uint32_t kModel = 1;
inline constexpr std::uint32_t kAdjacency = 2;
inline constexpr std::uint32_t kTest = 3;
}  // namespace domain

/// Deterministic random stream: std::mt19937_64 keyed by std::seed_seq over
/// (seed, id). Both are fully specified by the standard, so a given
/// (seed, id) yields the same draws on every platform. Value type; copies
/// continue independently from the same position.
class RngStream {
 public:
  static constexpr std::string_view kGenerator = "mt19937_64+seed_seq";

  explicit RngStream(std::uint64_t seed, StreamId id = {});

  std::uint64_t seed() const { return seed_; }
  const StreamId& id() const { return id_; }
  /// Fresh stream with the same seed and a different id.
  RngStream substream(StreamId id) const { return RngStream(seed_, id); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller, one value per call).
  double normal();

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::mt19937_64 engine_;
};

}  // namespace privmdp
