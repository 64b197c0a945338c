/*
 * Copyright 2026 The rulehound Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RULEHOUND_STATS_HPP_
#define RULEHOUND_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rulehound/dataset.hpp"
#include "rulehound/error.hpp"

namespace rulehound {

// Per-state correlation with the target column, aligned with the rule
// schema's condition states.
struct CorrVector {
  std::vector<double> entries;

  std::size_t size() const { return entries.size(); }
  double operator[](std::size_t i) const { return entries[i]; }
};

// Pearson product-moment correlation. A zero-variance argument gives 0.
inline double ppmcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ContractError("ppmcc: length mismatch (" + std::to_string(x.size()) +
                        " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) throw ContractError("ppmcc: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  const double r = sxy / std::sqrt(sxx * syy);
  if (!std::isfinite(r)) return 0.0;
  return std::clamp(r, -1.0, 1.0);
}

// Column-major view used by correlation-weighted inference: `rows[0]` is the
// sample, `rows[1..]` are candidate rule means, all of equal width matching
// `weights`. Each column is scaled by its weight and every candidate row is
// correlated with the scaled sample row.
inline std::vector<double> weighted_rule_correlations(
    std::span<const double> weights,
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ContractError("weighted_rule_correlations: no rows");
  const std::size_t width = weights.size();
  for (const auto& r : rows) {
    if (r.size() != width) {
      throw ContractError("weighted_rule_correlations: ragged matrix");
    }
  }
  std::vector<double> out(rows.size() - 1, 0.0);
  if (width < 2) return out;  // a single column has no variance

  std::vector<double> sample(width), candidate(width);
  for (std::size_t j = 0; j < width; ++j) sample[j] = rows[0][j] * weights[j];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      candidate[j] = rows[i][j] * weights[j];
    }
    out[i - 1] = ppmcc(sample, candidate);
  }
  return out;
}

// ppmcc of every input state against the (composite) target code.
inline CorrVector states_targets_corr(const Dataset& data) {
  if (data.empty()) throw ContractError("states_targets_corr: empty dataset");
  const std::vector<double> target = data.target_codes();
  CorrVector out;
  const std::size_t n = data.schema.num_inputs();
  out.entries.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (data.size() < 2) {
      out.entries.push_back(0.0);
      continue;
    }
    out.entries.push_back(ppmcc(data.state_column(j), target));
  }
  return out;
}

}  // namespace rulehound

#endif  // RULEHOUND_STATS_HPP_
