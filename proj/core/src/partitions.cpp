#include "upool/partitions.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

#include "upool/errors.hpp"

namespace upool {

Partition Partition::from_assignment(const std::vector<int>& assignment) {
  if (assignment.empty() || assignment.size() > static_cast<std::size_t>(kMaxSources)) {
    throw DomainError("partition: assignment length must be in [1, " +
                      std::to_string(kMaxSources) + "]");
  }
  Partition p;
  p.n_ = static_cast<std::uint8_t>(assignment.size());
  int max_label = -1;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int a = assignment[i];
    if (a < 0 || a > max_label + 1) {
      throw DomainError("partition: not a restricted growth string at position " +
                        std::to_string(i + 1));
    }
    max_label = std::max(max_label, a);
    p.assignment_[i] = static_cast<std::uint8_t>(a);
    p.masks_[static_cast<std::size_t>(a)] |= ClusterMask{1} << i;
  }
  p.d_ = static_cast<std::uint8_t>(max_label + 1);
  return p;
}

Partition Partition::from_clusters(const std::vector<std::vector<int>>& clusters) {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.size();
  if (n == 0 || n > static_cast<std::size_t>(kMaxSources)) {
    throw DomainError("partition: total size must be in [1, " + std::to_string(kMaxSources) + "]");
  }
  std::vector<int> owner(n, -1);
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (clusters[k].empty()) throw DomainError("partition: empty cluster");
    for (int i : clusters[k]) {
      if (i < 0 || static_cast<std::size_t>(i) >= n || owner[static_cast<std::size_t>(i)] != -1) {
        throw DomainError("partition: clusters must cover 0..L-1 exactly once");
      }
      owner[static_cast<std::size_t>(i)] = static_cast<int>(k);
    }
  }
  // Relabel in order of first appearance to get the canonical RGS.
  std::vector<int> relabel(clusters.size(), -1);
  std::vector<int> assignment(n);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    int& r = relabel[static_cast<std::size_t>(owner[i])];
    if (r < 0) r = next++;
    assignment[i] = r;
  }
  return from_assignment(assignment);
}

std::vector<int> Partition::members(int k) const {
  std::vector<int> out;
  const ClusterMask m = masks_[static_cast<std::size_t>(k)];
  for (int i = 0; i < n_; ++i) {
    if (m & (ClusterMask{1} << i)) out.push_back(i);
  }
  return out;
}

std::vector<int> Partition::assignment() const {
  return {assignment_.begin(), assignment_.begin() + n_};
}

std::vector<std::vector<int>> Partition::clusters() const {
  std::vector<std::vector<int>> out(d_);
  for (int i = 0; i < n_; ++i) out[assignment_[static_cast<std::size_t>(i)]].push_back(i);
  return out;
}

std::string Partition::to_string() const {
  std::string s;
  for (int k = 0; k < d_; ++k) {
    if (k) s += '|';
    s += '{';
    bool first = true;
    for (int i : members(k)) {
      if (!first) s += ',';
      s += std::to_string(i + 1);
      first = false;
    }
    s += '}';
  }
  return s;
}

Partition parse_partition(const std::string& text) {
  std::vector<std::vector<int>> clusters;
  std::size_t pos = 0;
  auto fail = [&] { throw DomainError("partition: cannot parse '" + text + "'"); };
  while (pos < text.size()) {
    if (text[pos] != '{') fail();
    const auto close = text.find('}', pos);
    if (close == std::string::npos) fail();
    std::vector<int> cluster;
    std::stringstream ss(text.substr(pos + 1, close - pos - 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty() || !std::all_of(item.begin(), item.end(),
                                       [](unsigned char c) { return std::isdigit(c); })) {
        fail();
      }
      cluster.push_back(std::stoi(item) - 1);
    }
    clusters.push_back(std::move(cluster));
    pos = close + 1;
    if (pos < text.size()) {
      if (text[pos] != '|') fail();
      ++pos;
      if (pos == text.size()) fail();
    }
  }
  if (clusters.empty()) fail();
  return Partition::from_clusters(clusters);
}

std::size_t PartitionSpace::index_of(const Partition& p) const {
  const auto it = std::find(partitions_.begin(), partitions_.end(), p);
  return static_cast<std::size_t>(it - partitions_.begin());
}

PartitionSpace PartitionSpace::restricted(int sources, std::vector<Partition> partitions) {
  if (partitions.empty()) throw DomainError("partition space: no partitions");
  for (const auto& p : partitions) {
    if (p.size() != sources) throw DomainError("partition space: partition size mismatch");
  }
  PartitionSpace s;
  s.n_ = sources;
  s.partitions_ = std::move(partitions);
  return s;
}

std::uint64_t bell_number(int sources) {
  if (sources < 1) throw DomainError("bell_number: L must be >= 1");
  // Bell triangle: each row starts with the last entry of the previous row.
  std::vector<std::uint64_t> row{1};
  for (int n = 1; n < sources; ++n) {
    std::vector<std::uint64_t> next{row.back()};
    next.reserve(row.size() + 1);
    for (std::uint64_t v : row) {
      std::uint64_t sum = 0;
      if (__builtin_add_overflow(next.back(), v, &sum)) {
        throw DomainError("bell_number: Bell(" + std::to_string(sources) +
                          ") overflows a 64-bit integer");
      }
      next.push_back(sum);
    }
    row = std::move(next);
  }
  return row.back();
}

PartitionSpace enumerate_partitions(int sources, int max_sources) {
  if (max_sources < 1 || max_sources > kMaxSources) {
    throw DomainError("enumerate_partitions: maximum L must be in [1, " +
                      std::to_string(kMaxSources) + "]");
  }
  if (sources < 1 || sources > max_sources) {
    throw DomainError("enumerate_partitions: L = " + std::to_string(sources) +
                      " outside [1, " + std::to_string(max_sources) +
                      "]; enumeration is bounded by Bell(" + std::to_string(max_sources) +
                      ") = " + std::to_string(bell_number(max_sources)) + " partitions");
  }
  PartitionSpace space;
  space.n_ = sources;
  space.partitions_.reserve(static_cast<std::size_t>(bell_number(sources)));

  // Iterate restricted growth strings in lexicographic order. prefix_max[i]
  // is max(a[0..i]).
  const auto n = static_cast<std::size_t>(sources);
  std::vector<int> a(n, 0);
  std::vector<int> prefix_max(n, 0);
  while (true) {
    space.partitions_.push_back(Partition::from_assignment(a));
    std::size_t i = n - 1;
    while (i > 0 && a[i] > prefix_max[i - 1]) --i;
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return space;
}

int l3_label(const Partition& p) {
  if (p.size() != 3) throw DomainError("l3_label: defined only for L = 3");
  const auto a = p.assignment();
  // RGS for L = 3: 000, 001, 010, 011, 012.
  const int code = a[1] * 3 + a[2];
  switch (code) {
    case 0: return 1;  // {1,2,3}
    case 3: return 2;  // {1,3}|{2}     (0,1,0)
    case 1: return 3;  // {1,2}|{3}     (0,0,1)
    case 4: return 4;  // {1}|{2,3}     (0,1,1)
    case 5: return 5;  // {1}|{2}|{3}   (0,1,2)
    default: break;
  }
  throw DomainError("l3_label: invalid partition");
}

}  // namespace upool
