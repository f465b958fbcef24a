#pragma once

#include <cmath>
#include <cstdint>

namespace abp {

// Deterministic splittable random stream. A stream is fully determined by
// (seed, stream_id); Monte Carlo uses stream_id = trial index so results do not
// depend on how trials are distributed over workers. Core is splitmix64, whose
// output is well mixed enough for simulation use and is exactly reproducible
// everywhere (no standard-library distribution adapters involved).
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id) {
    // Feed seed then stream id through the mixer to decorrelate streams.
    state_ = mix(seed + 0x9e3779b97f4a7c15ULL);
    state_ = mix(state_ ^ (stream_id + 0xbf58476d1ce4e5b9ULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass through log().
  double next_double_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Inverse-CDF exponential draw with the given rate.
  double exponential(double rate) { return -std::log(next_double_pos()) / rate; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace abp
