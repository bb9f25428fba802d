#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

// Counter-based pseudo randomness. Streams are stateless functions of
// (key, counter), and keys are derived by hashing an id path, so every
// (run, step, task, purpose) combination gets an independent reproducible
// stream no matter how runs are scheduled.
namespace mrl::rng {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = mix64(seed);
  for (std::uint64_t p : path) k = mix64(k ^ mix64(p));
  return k;
}

// Purpose tags for stream derivation; shared by every engine so that
// reductions between engines (e.g. one-level MDP vs bandit) can replay the
// exact same draws.
enum Tag : std::uint64_t {
  kTagEnv = 1,
  kTagContext = 2,
  kTagNoise = 3,
  kTagTransition = 4,
  kTagExplore = 5,
  kTagDiag = 6,
};

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix64(key_ ^ (ctr_++ * kGolden)); }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Integer in [0, n), n >= 1. Multiply-shift keeps it unbiased enough for
  // simulation use.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double gauss() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mrl::rng
