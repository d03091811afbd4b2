#include "zosa/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "zosa/errors.hpp"

namespace zosa {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require_dimension(std::size_t d) {
  if (d == 0) throw ConfigError("d", "sample dimension must be at least 1");
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream RngStream::split(std::uint64_t child_id) const noexcept {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(child_id + 0x632BE59BD9B4E019ULL)));
}

std::array<std::uint32_t, 4> RngStream::next_block() noexcept {
  const std::uint64_t k = position_++;
  return philox4x32_10({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
                        static_cast<std::uint32_t>(stream_id_),
                        static_cast<std::uint32_t>(stream_id_ >> 32)},
                       {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

std::uint64_t RngStream::next_u64() noexcept {
  const auto b = next_block();
  return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

double RngStream::next_uniform() noexcept {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

Vector sample_rademacher(std::size_t d, RngStream& rng) {
  require_dimension(d);
  std::vector<double> u(d);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i % 64 == 0) bits = rng.next_u64();
    u[i] = (bits & 1u) ? 1.0 : -1.0;
    bits >>= 1;
  }
  return Vector(std::move(u));
}

Vector sample_gaussian(std::size_t d, RngStream& rng) {
  require_dimension(d);
  std::vector<double> z(d);
  for (std::size_t i = 0; i < d; i += 2) {
    const auto b = rng.next_block();
    const std::uint64_t a = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
    const std::uint64_t c = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    const double u1 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(c >> 11) + 0.5) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    z[i] = r * std::cos(phi);
    if (i + 1 < d) z[i + 1] = r * std::sin(phi);
  }
  return Vector(std::move(z));
}

}  // namespace zosa
