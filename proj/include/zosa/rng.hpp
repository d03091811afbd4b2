#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "zosa/vector.hpp"

namespace zosa {

/// Counter-based random stream (Philox4x32-10).
///
/// Output block k of a stream is a pure function of (seed, stream_id, k), so
/// any draw can be replayed, skipped to, or produced out of order. Child
/// streams obtained with split() occupy disjoint counter spaces of the same
/// key and are deterministic functions of the parent identity and child id.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  // Index of the next block to be drawn.
  std::uint64_t position() const noexcept { return position_; }
  void seek(std::uint64_t position) noexcept { position_ = position; }

  RngStream split(std::uint64_t child_id) const noexcept;

  // Block at the current position; advances by one.
  std::array<std::uint32_t, 4> next_block() noexcept;
  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double next_uniform() noexcept;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
};

// Raw Philox4x32-10 bijection, exposed for known-answer testing.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

// Entries exactly +1 or -1, one random bit each (64 coordinates per draw).
Vector sample_rademacher(std::size_t d, RngStream& rng);

// Independent standard normals via Box-Muller, two per block.
Vector sample_gaussian(std::size_t d, RngStream& rng);

}  // namespace zosa
