#include "syndatum/random.hpp"

#include <cmath>
#include <numbers>

namespace syndatum {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::derive(std::uint64_t tag) const noexcept {
  const std::uint64_t child = splitmix64(splitmix64(stream_id ^ 0xA5A5A5A5DEADBEEFULL) + tag * 0xD1B54A32D192ED03ULL);
  return SeedSpec{master_seed, child};
}

Rng::Rng(const SeedSpec& seed) noexcept
    : key_(splitmix64(splitmix64(seed.master_seed) ^ (seed.stream_id * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t Rng::next_u64() noexcept {
  // Two rounds of mixing on (key, counter) give a stateless counter-based stream.
  return splitmix64(key_ ^ splitmix64(counter_++));
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  if (n <= 1) return 0;
  // Lemire-style rejection keeps the draw unbiased.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
  }
}

}  // namespace syndatum
