#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vcmc {

/// One block of a disjoint K-way split of the data rows.
struct DataPartition {
  int index = 0;
  std::vector<int> row_indices;

  int size() const { return static_cast<int>(row_indices.size()); }
  std::span<const int> rows() const { return row_indices; }
};

struct PartitionSet {
  std::vector<DataPartition> partitions;

  int K() const { return static_cast<int>(partitions.size()); }
  const DataPartition& operator[](int k) const { return partitions.at(k); }
};

/// Seeded uniform shuffle of [0, N) followed by round-robin assignment.
/// Blocks are disjoint, cover all rows, and differ in size by at most one.
PartitionSet partition_data(int n, int k, std::uint64_t seed);

}  // namespace vcmc
