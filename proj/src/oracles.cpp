#include "lanetopo/oracles.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lanetopo::oracle {

double oracle_frechet(std::span<const Point3> a, std::span<const Point3> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("oracle_frechet: empty polyline");
  if (a.size() > kMaxOraclePoints || b.size() > kMaxOraclePoints) {
    throw std::length_error("oracle_frechet: instance too large");
  }
  auto dist = [&](std::size_t i, std::size_t j) {
    const double dx = a[i].x - b[j].x;
    const double dy = a[i].y - b[j].y;
    const double dz = a[i].z - b[j].z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  };

  constexpr double unset = -1.0;
  std::array<std::array<double, kMaxOraclePoints>, kMaxOraclePoints> memo;
  for (auto& r : memo) r.fill(unset);

  std::function<double(std::size_t, std::size_t)> coupling = [&](std::size_t i, std::size_t j) {
    if (memo[i][j] != unset) return memo[i][j];
    double v;
    if (i == 0 && j == 0) {
      v = dist(0, 0);
    } else if (i == 0) {
      v = std::max(coupling(0, j - 1), dist(0, j));
    } else if (j == 0) {
      v = std::max(coupling(i - 1, 0), dist(i, 0));
    } else {
      v = std::max(std::min({coupling(i - 1, j), coupling(i - 1, j - 1), coupling(i, j - 1)}),
                   dist(i, j));
    }
    memo[i][j] = v;
    return v;
  };
  return coupling(a.size() - 1, b.size() - 1);
}

double oracle_ap(const MatchResult& match) {
  const auto& preds = match.predictions;
  if (preds.size() > kMaxOraclePredictions) throw std::length_error("oracle_ap: instance too large");
  if (match.num_gt == 0) return preds.empty() ? 1.0 : 0.0;

  // Rank of each prediction: how many outrank it (higher confidence, or equal
  // confidence and earlier position).
  const std::size_t n = preds.size();
  std::array<std::size_t, kMaxOraclePredictions> ranked{};
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t rank = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (preds[q].confidence > preds[p].confidence ||
          (preds[q].confidence == preds[p].confidence && q < p)) {
        ++rank;
      }
    }
    ranked[rank] = p;
  }

  std::array<double, kMaxOraclePredictions> precision_at{};
  std::array<std::size_t, kMaxOraclePredictions> tp_at{};
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (preds[ranked[k]].gt) ++tp;
    tp_at[k] = tp;
    precision_at[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }

  double area = 0.0;
  for (std::size_t level = 1; level <= match.num_gt; ++level) {
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (tp_at[k] >= level) best = std::max(best, precision_at[k]);
    }
    area += best;
  }
  return area / static_cast<double>(match.num_gt);
}

}  // namespace lanetopo::oracle
