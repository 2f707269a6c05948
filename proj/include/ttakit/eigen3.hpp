// Copyright 2026 The ttakit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace ttakit {

/// Row-major 3x3, `m[row][col]`.
using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

struct SymmetricEigen3 {
  Vec3 values{};  // descending
  Mat3 vectors{};  // column k pairs with values[k]
  int sweeps = 0;
};

inline double off_diagonal_norm(const Mat3& a) noexcept {
  return std::sqrt(2.0 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
}

/// Cyclic Jacobi eigendecomposition of a symmetric 3x3 matrix.
///
/// Sweeps over the pairs (0,1), (0,2), (1,2) until the Frobenius norm of the
/// off-diagonal part drops below `tolerance`. Eigenvalues come back sorted
/// descending; each eigenvector is signed so that its largest-magnitude
/// component is positive.
inline SymmetricEigen3 jacobi_eigen3(Mat3 a, double tolerance = 1e-10, int max_sweeps = 64) {
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  int sweep = 0;
  for (; sweep < max_sweeps && off_diagonal_norm(a) >= tolerance; ++sweep) {
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a[p][p] -= t * apq;
        a[q][q] += t * apq;
        a[p][q] = a[q][p] = 0.0;
        const int r = 3 - p - q;
        const double arp = a[r][p];
        const double arq = a[r][q];
        a[r][p] = a[p][r] = arp - s * (arq + tau * arp);
        a[r][q] = a[q][r] = arq + s * (arp - tau * arq);
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = vkp - s * (vkq + tau * vkp);
          v[k][q] = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a[i][i] > a[j][j]; });
  SymmetricEigen3 out;
  out.sweeps = sweep;
  for (int k = 0; k < 3; ++k) {
    const int src = order[static_cast<std::size_t>(k)];
    out.values[k] = a[src][src];
    int lead = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v[i][src]) > std::abs(v[lead][src])) lead = i;
    }
    const double sign = v[lead][src] < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < 3; ++i) out.vectors[i][k] = sign * v[i][src];
  }
  return out;
}

}  // namespace ttakit
