#ifndef HERMVAR_RNG_HPP
#define HERMVAR_RNG_HPP

#include <cstdint>
#include <random>

namespace hermvar {

/// Reproducible seed: a user-visible value plus a stream id that separates
/// independent tasks (one path, one sweep point, ...).
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream_id = 0;

  [[nodiscard]] Seed with_stream(std::uint64_t stream) const noexcept { return {value, stream}; }

  friend bool operator==(const Seed&, const Seed&) = default;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive a fresh seed value for a sub-task (e.g. one n of a sweep).
inline constexpr Seed derive(Seed base, std::uint64_t tag) noexcept {
  return {splitmix64(base.value ^ splitmix64(tag + 0x632be59bd9b4e019ULL)), base.stream_id};
}

using Engine = std::mt19937_64;

inline Engine make_engine(Seed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.value), static_cast<std::uint32_t>(seed.value >> 32),
                    static_cast<std::uint32_t>(seed.stream_id),
                    static_cast<std::uint32_t>(seed.stream_id >> 32), 0x68766172u};
  return Engine(seq);
}

}  // namespace hermvar

#endif  // HERMVAR_RNG_HPP
