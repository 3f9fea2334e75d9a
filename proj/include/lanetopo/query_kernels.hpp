#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lanetopo/geometry.hpp"

namespace lanetopo {

/// Row-major real matrix holding one embedding per row.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim, double fill = 0.0);
  /// Throws std::invalid_argument when values.size() != rows * dim.
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

struct QueryConfig {
  std::size_t n_points = kLanePoints;
  std::size_t n_instances = 0;
  std::size_t dim = 0;
};

/// Column-wise sum over the point queries.
std::vector<double> point_pooling(const EmbeddingMatrix& point_queries);

/// Adds the pooled point feature to every instance query.
EmbeddingMatrix assemble_lc_queries(const EmbeddingMatrix& instance_queries,
                                    std::span<const double> pooled);

/// [query | start.xyz | end.xyz]
std::vector<double> augment_with_endpoints(std::span<const double> query, const Point3& start,
                                           const Point3& end);

}  // namespace lanetopo
