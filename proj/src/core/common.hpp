#pragma once
// Shared plumbing: error taxonomy, deterministic RNG, sampling helpers.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace snntopo {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

enum class errc {
  invalid_argument,
  parse_error,
  io_error,
  shape_mismatch,
  state_error,
  numeric_error,
  unsupported,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

inline u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic across platforms: raw mt19937_64 output only, no
// std::*_distribution (their algorithms are implementation-defined).
class Rng {
public:
  explicit Rng(u64 seed) : seed_(seed), gen_(seed) {}

  u64 seed() const { return seed_; }
  u64 next() { return gen_(); }

  // Unbiased integer in [0, n).
  u64 below(u64 n) {
    if (n == 0) fail(errc::invalid_argument, "Rng::below: n must be positive");
    u64 reject = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      u64 r = next();
      if (r >= reject) return r % n;
    }
  }

  // [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; second value cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream; stable under reordering of other draws.
  Rng fork(u64 tag) const { return Rng(splitmix64(seed_ ^ splitmix64(tag))); }

private:
  u64 seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// k distinct values from [0, n), sorted. Floyd's algorithm; complement
// sampling when k is past the halfway point keeps the set small.
std::vector<u64> sample_distinct(u64 n, u64 k, Rng& rng);

// shortest decimal form that parses back to the same double
std::string double_repr(double v);

inline u64 fnv1a64(const void* data, size_t len, u64 h = 0xcbf29ce484222325ULL) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline u64 fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace snntopo
