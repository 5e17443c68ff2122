#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's own algorithms.

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::array<std::array<long long, 2>, 2>;

inline Mat mul(const Mat& a, const Mat& b) {
  Mat r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

/// Counts x in [0,1)^2 with (A^n - I) x in Z^2 by scanning all integer
/// vectors k in the bounding box of B [0,1)^2 and solving B x = k.
inline std::size_t brute_force_fixed_points(const Mat& a, int n) {
  Mat b{{{1, 0}, {0, 1}}};
  for (int i = 0; i < n; ++i) b = mul(b, a);
  b[0][0] -= 1;
  b[1][1] -= 1;
  const long long det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  long long lo[2], hi[2];
  for (int r = 0; r < 2; ++r) {
    long long c[4] = {0, b[r][0], b[r][1], b[r][0] + b[r][1]};
    lo[r] = c[0];
    hi[r] = c[0];
    for (long long v : c) {
      lo[r] = std::min(lo[r], v);
      hi[r] = std::max(hi[r], v);
    }
  }
  std::set<std::pair<long long, long long>> found;
  for (long long k0 = lo[0]; k0 <= hi[0]; ++k0)
    for (long long k1 = lo[1]; k1 <= hi[1]; ++k1) {
      // x = adj(B) k / det, kept as exact numerators over |det|.
      long long p = b[1][1] * k0 - b[0][1] * k1;
      long long q = -b[1][0] * k0 + b[0][0] * k1;
      if (det < 0) {
        p = -p;
        q = -q;
      }
      const long long d = std::llabs(det);
      if (p >= 0 && p < d && q >= 0 && q < d) found.insert({p, q});
    }
  return found.size();
}

/// lambda^n + lambda^-n - 2 for the golden-mean cat map.
inline double golden_periodic_count(int n) {
  const double l = (3 + std::sqrt(5.0)) / 2;
  return std::pow(l, n) + std::pow(l, -n) - 2;
}

}  // namespace oracle
