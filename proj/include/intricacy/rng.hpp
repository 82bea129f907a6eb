#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace intricacy::rng {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/**
 * Counter-based stream: stream k of a seed yields the same draws no matter
 * how samples are partitioned across workers, so estimates are reproducible
 * independent of scheduling.
 */
class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
               mix64(stream + 0xd1b54a32d192ed03ULL)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /** Uniform draw in [0,1) with 53-bit resolution. */
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/** Flat Dirichlet draw (uniform on the simplex) via normalized exponentials. */
inline std::vector<double> dirichlet_flat(Stream& g, std::size_t m) {
  std::vector<double> v(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = -std::log(1.0 - g.next_unit());
    sum += v[i];
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace intricacy::rng
