#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypertree/graph.hpp"

namespace hypertree {

/// Node-indexed points in the d-dimensional Poincare ball, stored row-major.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t num_nodes, std::size_t dim)
      : dim_(dim), data_(num_nodes * dim, 0.0) {}

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }

  std::span<double> row(NodeId n) { return {data_.data() + n * dim_, dim_}; }
  std::span<const double> row(NodeId n) const { return {data_.data() + n * dim_, dim_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

}  // namespace hypertree
