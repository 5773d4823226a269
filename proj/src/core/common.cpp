#include "common.hpp"

#include <algorithm>
#include <charconv>

namespace snntopo {

static std::vector<u64> floyd_sample(u64 n, u64 k, Rng& rng) {
  std::unordered_set<u64> chosen;
  chosen.reserve(static_cast<size_t>(k) * 2);
  for (u64 j = n - k; j < n; ++j) {
    u64 t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<u64> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> sample_distinct(u64 n, u64 k, Rng& rng) {
  require(k <= n, errc::invalid_argument, "sample_distinct: k exceeds population");
  if (k == 0) return {};
  if (k == n) {
    std::vector<u64> out(n);
    for (u64 i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  if (k <= n / 2) return floyd_sample(n, k, rng);
  std::vector<u64> drop = floyd_sample(n, n - k, rng);
  std::vector<u64> out;
  out.reserve(k);
  size_t d = 0;
  for (u64 i = 0; i < n; ++i) {
    if (d < drop.size() && drop[d] == i) {
      ++d;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::string double_repr(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace snntopo
