#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace storenet {

/// Random stream keyed by (seed, replica). Streams for different replica
/// indices are independent of the order in which they are created, so a
/// replica set can be regenerated in any order or in parallel.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t replica) {
    std::seed_seq seq = make_seq(seed, replica);
    engine_.seed(seq);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exponential variable with the given rate (rate > 0).
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  std::uint64_t bits() { return engine_(); }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::seed_seq make_seq(std::uint64_t seed, std::uint64_t replica) {
    const std::uint64_t a = splitmix(seed);
    const std::uint64_t b = splitmix(a ^ splitmix(replica + 0x632be59bd9b4e019ULL));
    return std::seed_seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                         static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  }

  std::mt19937_64 engine_;
};

}  // namespace storenet
