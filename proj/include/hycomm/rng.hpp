#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace hycomm {

using Rng = std::mt19937_64;

/// splitmix64 step: advances `state` and returns the mixed output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a child seed from a base seed, a short stream tag, and up to two
/// integer coordinates. Folding order is significant: derive(s, "a", 1) and
/// derive(s, "a", 0, 1) are distinct streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = base;
  splitmix64(s);
  for (unsigned char c : tag) {
    s ^= c;
    splitmix64(s);
  }
  s ^= a;
  splitmix64(s);
  s ^= b;
  return splitmix64(s);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Uniform draw in [0, 1) bounded away from zero, safe to pass through log().
inline double uniform01_positive(Rng& rng) {
  double u = uniform01(rng);
  return u > 0.0 ? u : std::numeric_limits<double>::min();
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Zero-mean Gaussian draw; sigma == 0 returns exactly 0 without consuming
/// the stream.
inline double gaussian(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

inline long poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<long>(mean)(rng);
}

/// Named sub-stream seeds. World seeds depend only on (master, trial) so that
/// every strategy and budget evaluated on a trial sees the same world; run
/// seeds exist per (strategy, budget, trial) for strategy-private draws.
namespace streams {

inline std::uint64_t world(std::uint64_t master_seed, std::uint64_t trial) {
  return derive_seed(master_seed, "world", trial);
}
inline std::uint64_t run(std::uint64_t master_seed, std::uint64_t strategy,
                         std::uint64_t budget, std::uint64_t trial) {
  return derive_seed(derive_seed(master_seed, "run", strategy, budget), "trial", trial);
}
inline std::uint64_t generation(std::uint64_t scenario_seed) {
  return derive_seed(scenario_seed, "gen");
}
inline std::uint64_t lidar(std::uint64_t scenario_seed, std::uint64_t agent_index) {
  return derive_seed(scenario_seed, "lidar", agent_index);
}
inline std::uint64_t detect(std::uint64_t run_seed, std::uint64_t agent_index) {
  return derive_seed(run_seed, "detect", agent_index);
}
inline std::uint64_t pose(std::uint64_t run_seed, std::uint64_t agent_index) {
  return derive_seed(run_seed, "pose", agent_index);
}
inline std::uint64_t pack(std::uint64_t run_seed, std::uint64_t agent_index) {
  return derive_seed(run_seed, "pack", agent_index);
}

}  // namespace streams

}  // namespace hycomm
