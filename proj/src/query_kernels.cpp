#include "lanetopo/query_kernels.hpp"

#include <stdexcept>
#include <string>

namespace lanetopo {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, double fill)
    : rows_(rows), dim_(dim), values_(rows * dim, fill) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (values_.size() != rows_ * dim_) {
    throw std::invalid_argument("embedding matrix expects " + std::to_string(rows_ * dim_) +
                                " values, got " + std::to_string(values_.size()));
  }
}

std::vector<double> point_pooling(const EmbeddingMatrix& point_queries) {
  if (point_queries.rows() == 0 || point_queries.dim() == 0) {
    throw std::invalid_argument("point_pooling: empty point query matrix");
  }
  std::vector<double> pooled(point_queries.dim(), 0.0);
  for (std::size_t i = 0; i < point_queries.rows(); ++i) {
    const auto r = point_queries.row(i);
    for (std::size_t d = 0; d < pooled.size(); ++d) pooled[d] += r[d];
  }
  return pooled;
}

EmbeddingMatrix assemble_lc_queries(const EmbeddingMatrix& instance_queries,
                                    std::span<const double> pooled) {
  if (instance_queries.dim() != pooled.size()) {
    throw std::invalid_argument("assemble_lc_queries: instance dim " +
                                std::to_string(instance_queries.dim()) + " != pooled dim " +
                                std::to_string(pooled.size()));
  }
  EmbeddingMatrix out = instance_queries;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t d = 0; d < r.size(); ++d) r[d] += pooled[d];
  }
  return out;
}

std::vector<double> augment_with_endpoints(std::span<const double> query, const Point3& start,
                                           const Point3& end) {
  std::vector<double> out(query.begin(), query.end());
  out.reserve(query.size() + 6);
  out.insert(out.end(), {start.x, start.y, start.z, end.x, end.y, end.z});
  return out;
}

}  // namespace lanetopo
