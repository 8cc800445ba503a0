#pragma once
// Set partitions of {1..L}.
//
// A partition is stored as its restricted growth string (RGS): a[0] = 0 and
// a[i] <= 1 + max(a[0..i-1]). Cluster k holds every i with a[i] == k, so
// clusters come out ordered by their smallest member. Clusters are also kept
// as bitmasks over 0-based source indices, which is what the factorized
// posterior path keys its cache on.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace upool {

inline constexpr int kMaxSources = 16;
inline constexpr int kDefaultMaxSources = 12;

using ClusterMask = std::uint32_t;

class Partition {
 public:
  // Builds a partition from a restricted growth string; throws DomainError if
  // the string is empty, longer than kMaxSources, or not a valid RGS.
  static Partition from_assignment(const std::vector<int>& assignment);

  // Builds a partition from clusters of 0-based indices covering 0..L-1.
  static Partition from_clusters(const std::vector<std::vector<int>>& clusters);

  int size() const noexcept { return n_; }
  int cluster_count() const noexcept { return d_; }

  int cluster_of(int i) const { return assignment_[static_cast<std::size_t>(i)]; }
  ClusterMask cluster_mask(int k) const { return masks_[static_cast<std::size_t>(k)]; }
  std::vector<int> members(int k) const;

  std::vector<int> assignment() const;
  std::vector<std::vector<int>> clusters() const;

  // Cluster-set notation with 1-based labels, e.g. "{1,3}|{2}".
  std::string to_string() const;

  friend bool operator==(const Partition& a, const Partition& b) noexcept {
    return a.n_ == b.n_ && a.assignment_ == b.assignment_;
  }

 private:
  Partition() = default;

  std::array<std::uint8_t, kMaxSources> assignment_{};
  std::array<ClusterMask, kMaxSources> masks_{};
  std::uint8_t n_ = 0;
  std::uint8_t d_ = 0;
};

// Parses cluster-set notation ("{1,3}|{2}") back into a partition.
Partition parse_partition(const std::string& text);

class PartitionSpace {
 public:
  int sources() const noexcept { return n_; }
  std::size_t size() const noexcept { return partitions_.size(); }
  const Partition& operator[](std::size_t g) const { return partitions_[g]; }
  const std::vector<Partition>& partitions() const noexcept { return partitions_; }

  auto begin() const noexcept { return partitions_.begin(); }
  auto end() const noexcept { return partitions_.end(); }

  // Index of the given partition, or size() if it is not in the space.
  std::size_t index_of(const Partition& p) const;

  // A space holding only the listed partitions (all over the same L); used to
  // restrict the posterior, e.g. to the single all-in-one cluster.
  static PartitionSpace restricted(int sources, std::vector<Partition> partitions);

 private:
  friend PartitionSpace enumerate_partitions(int, int);
  int n_ = 0;
  std::vector<Partition> partitions_;
};

// All Bell(L) partitions in lexicographic RGS order. Throws DomainError when L
// is outside [1, max_sources] or max_sources exceeds kMaxSources.
PartitionSpace enumerate_partitions(int sources, int max_sources = kDefaultMaxSources);

// Bell number via the Bell triangle; throws DomainError on L < 1 or when the
// value does not fit in 64 bits (L > 25).
std::uint64_t bell_number(int sources);

// Display label 1..5 for partitions of three sources:
// {1,2,3} -> 1, {1,3}|{2} -> 2, {1,2}|{3} -> 3, {1}|{2,3} -> 4, {1}|{2}|{3} -> 5.
int l3_label(const Partition& p);

}  // namespace upool
