#pragma once

#include <cstdint>

namespace syndatum {

/// Seed for one reproducible random stream. Streams are derived by hashing,
/// never by advancing a shared generator, so replications can run in any order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream keyed by `tag`; distinct tags give statistically independent streams.
  SeedSpec derive(std::uint64_t tag) const noexcept;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based generator: the i-th 64-bit draw is a pure function of (key, i).
class Rng {
 public:
  explicit Rng(const SeedSpec& seed) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace syndatum
