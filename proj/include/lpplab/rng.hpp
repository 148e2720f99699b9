#pragma once

#include <cmath>
#include <cstdint>

namespace lpplab {

// splitmix64 finalizer; statistically strong enough to key independent draws.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the draw at a given (seed, replica, cell) key is a
// pure function of the key, so replicas can run on any thread schedule and a
// grid extended to a larger box keeps its existing cell values.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed, std::uint64_t replica = 0)
      : seed_(seed), replica_(replica) {}

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

  RngStream with_replica(std::uint64_t r) const { return RngStream(seed_, r); }

  // Independent substream family, e.g. one per experiment.
  RngStream fork(std::uint64_t tag) const {
    return RngStream(mix64(seed_ ^ mix64(tag ^ 0xa076'1d64'78bd'642fULL)),
                     replica_);
  }

  std::uint64_t bits(std::uint64_t cell) const {
    return mix64(cell + mix64(replica_ + mix64(seed_)));
  }

  // Uniform on (0, 1]; open at 0 so -log(u) stays finite.
  double uniform(std::uint64_t cell) const {
    return ((bits(cell) >> 11) + 1) * 0x1.0p-53;
  }

  double exponential(double rate, std::uint64_t cell) const {
    return -std::log(uniform(cell)) / rate;
  }

  static std::uint64_t cell_key(int col, int row) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(col)) << 32) |
           static_cast<std::uint32_t>(row);
  }

 private:
  std::uint64_t seed_{0};
  std::uint64_t replica_{0};
};

}  // namespace lpplab
