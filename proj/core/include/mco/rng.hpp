#pragma once

#include <cstdint>

namespace mco {

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, t, lane, draw). Nothing is stateful, so a parallel map
// over agents produces the same values for any worker count and any
// execution order.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
inline std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Streams keep independent uses of the same run seed decorrelated.
enum class Stream : std::uint64_t {
  kInit = 1,
  kCoeffs = 2,
  kPso = 3,
  kTopology = 4,
  kSchedule = 5,
  kTest = 6,
};

inline std::uint64_t bits(std::uint64_t seed, Stream stream, std::uint64_t t,
                          std::uint64_t lane, std::uint64_t draw) {
  std::uint64_t z = mix(seed ^ (static_cast<std::uint64_t>(stream) * 0xd6e8feb86659fd93ULL));
  z = mix(z ^ t * 0xa0761d6478bd642fULL);
  z = mix(z ^ lane * 0xe7037ed1a0b428dbULL);
  z = mix(z ^ draw * 0x8ebc6af09c88c6e3ULL);
  return z;
}

// uniform double in [0, 1)
inline double uniform(std::uint64_t seed, Stream stream, std::uint64_t t,
                      std::uint64_t lane, std::uint64_t draw) {
  return static_cast<double>(bits(seed, stream, t, lane, draw) >> 11) * 0x1.0p-53;
}

inline double uniform_in(double lo, double hi, std::uint64_t seed, Stream stream,
                         std::uint64_t t, std::uint64_t lane, std::uint64_t draw) {
  return lo + (hi - lo) * uniform(seed, stream, t, lane, draw);
}

// integer in [0, m)
inline std::uint64_t below(std::uint64_t m, std::uint64_t seed, Stream stream,
                           std::uint64_t t, std::uint64_t lane, std::uint64_t draw) {
  return bits(seed, stream, t, lane, draw) % m;
}

}  // namespace rng
}  // namespace mco
