#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, purpose, time step, index), so results do not depend on worker
// count or evaluation order and any stream can be replayed in isolation.

#include <cmath>
#include <cstdint>

namespace detpf {

enum class Stream : std::uint64_t {
  Prior = 0x9e3779b97f4a7c15ull,
  Dynamics = 0xbf58476d1ce4e5b9ull,
  MeasNoise = 0x94d049bb133111ebull,
  Epsilon = 0xd6e8feb86659fd93ull,
  Scenario = 0xa5a3564d1ca4f4adull,
  InitState = 0xc2b2ae3d27d4eb4full,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline std::uint64_t stream_bits(std::uint64_t seed, Stream purpose,
                                 std::uint64_t step, std::uint64_t index) {
  std::uint64_t z = detail::mix64(seed ^ static_cast<std::uint64_t>(purpose));
  z = detail::mix64(z ^ step);
  return detail::mix64(z ^ index);
}

// Uniform on (0, 1]; never returns 0 so log() is safe.
inline double stream_u01(std::uint64_t seed, Stream purpose, std::uint64_t step,
                         std::uint64_t index) {
  const std::uint64_t b = stream_bits(seed, purpose, step, index);
  return static_cast<double>((b >> 11) + 1) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes two sub-draws of the stream.
inline double stream_gauss(std::uint64_t seed, Stream purpose,
                           std::uint64_t step, std::uint64_t index) {
  const double u1 = stream_u01(seed, purpose, step, 2 * index);
  const double u2 = stream_u01(seed, purpose, step, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace detpf
