#pragma once

#include <vector>

#include "aninorm/lti.hpp"

namespace fixtures {

using aninorm::Matrix;
using aninorm::StateSpaceModel;

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  Matrix M(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) M(i, j++) = v;
    ++i;
  }
  return M;
}

// x+ = 0.5x + w, z = x: ‖F‖₂ = sqrt(4/3), ‖F‖∞ = 2.
inline StateSpaceModel scalar_lag() { return StateSpaceModel(mat({{0.5}}), mat({{1}}), mat({{1}}), mat({{0}})); }

inline StateSpaceModel static_diag_one_zero() { return StateSpaceModel::static_gain(mat({{1, 0}, {0, 0}})); }

// G(z) = z/(z - r) realized as x+ = r x + w, y = r x + w.
inline StateSpaceModel one_pole(double r) { return StateSpaceModel(mat({{r}}), mat({{1}}), mat({{r}}), mat({{1}})); }

// Seeded corpus member k: n in 1..6, m in {2,3,4}, p = 2, spectral radius cap 0.95.
inline StateSpaceModel corpus_member(int k) {
  const int n = 1 + k % 6;
  const int m = 2 + (k / 6) % 3;
  return aninorm::random_stable(n, m, 2, 1000 + static_cast<std::uint64_t>(k), 0.95);
}

inline std::vector<StateSpaceModel> corpus(int count) {
  std::vector<StateSpaceModel> out;
  for (int k = 0; k < count; ++k) out.push_back(corpus_member(k));
  return out;
}

}  // namespace fixtures
