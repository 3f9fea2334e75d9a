#pragma once

#include <span>

#include "lanetopo/geometry.hpp"
#include "lanetopo/metrics.hpp"

// Small-scale reference implementations, kept apart from the production
// kernels they are used to check.
namespace lanetopo::oracle {

inline constexpr std::size_t kMaxOraclePoints = 8;
inline constexpr std::size_t kMaxOraclePredictions = 8;

/// Memoized recursion over couplings. Throws std::length_error above
/// kMaxOraclePoints points per side.
double oracle_frechet(std::span<const Point3> a, std::span<const Point3> b);

/// Interpolated precision at each recall level, found by scanning every
/// cutoff. Throws std::length_error above kMaxOraclePredictions.
double oracle_ap(const MatchResult& match);

}  // namespace lanetopo::oracle
