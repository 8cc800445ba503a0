#include <doctest.h>

#include <set>

#include "upool/errors.hpp"
#include "upool/partitions.hpp"

using namespace upool;

TEST_CASE("bell numbers") {
  const std::uint64_t expected[] = {1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975};
  for (int l = 1; l <= 10; ++l) CHECK(bell_number(l) == expected[l - 1]);
  CHECK(bell_number(25) == 4638590332229999353ULL);
  CHECK_THROWS_AS(bell_number(26), DomainError);
  CHECK_THROWS_AS(bell_number(0), DomainError);
}

TEST_CASE("enumeration count matches bell numbers") {
  for (int l = 1; l <= 10; ++l) {
    const auto space = enumerate_partitions(l);
    CHECK(space.size() == bell_number(l));
    CHECK(space.sources() == l);
  }
}

TEST_CASE("three sources in lexicographic order") {
  const auto space = enumerate_partitions(3);
  REQUIRE(space.size() == 5);
  const char* notation[] = {"{1,2,3}", "{1,2}|{3}", "{1,3}|{2}", "{1}|{2,3}", "{1}|{2}|{3}"};
  const int labels[] = {1, 3, 2, 4, 5};
  for (std::size_t g = 0; g < 5; ++g) {
    CHECK(space[g].to_string() == notation[g]);
    CHECK(l3_label(space[g]) == labels[g]);
  }
}

TEST_CASE("assignments round-trip and partitions are distinct") {
  for (int l = 1; l <= 8; ++l) {
    const auto space = enumerate_partitions(l);
    std::set<std::vector<int>> seen;
    for (const auto& p : space) {
      const auto a = p.assignment();
      CHECK(seen.insert(a).second);
      CHECK(Partition::from_assignment(a) == p);
      CHECK(Partition::from_clusters(p.clusters()) == p);
      CHECK(parse_partition(p.to_string()) == p);
      ClusterMask all = 0;
      for (int k = 0; k < p.cluster_count(); ++k) {
        CHECK((all & p.cluster_mask(k)) == 0u);
        all |= p.cluster_mask(k);
        for (int i : p.members(k)) CHECK(p.cluster_of(i) == k);
      }
      CHECK(all == (ClusterMask{1} << l) - 1);
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  const auto a = enumerate_partitions(6);
  const auto b = enumerate_partitions(6);
  REQUIRE(a.size() == b.size());
  for (std::size_t g = 0; g < a.size(); ++g) CHECK(a[g] == b[g]);
}

TEST_CASE("enumeration bounds") {
  CHECK_THROWS_AS(enumerate_partitions(0), DomainError);
  CHECK_THROWS_AS(enumerate_partitions(13), DomainError);
  CHECK_NOTHROW(enumerate_partitions(13, 13));
  CHECK_THROWS_AS(enumerate_partitions(3, kMaxSources + 1), DomainError);
}

TEST_CASE("single source") {
  const auto space = enumerate_partitions(1);
  REQUIRE(space.size() == 1);
  CHECK(space[0].to_string() == "{1}");
  CHECK_THROWS_AS(l3_label(space[0]), DomainError);
}

TEST_CASE("invalid restricted growth strings") {
  CHECK_THROWS_AS(Partition::from_assignment({}), DomainError);
  CHECK_THROWS_AS(Partition::from_assignment({1, 0}), DomainError);
  CHECK_THROWS_AS(Partition::from_assignment({0, 2}), DomainError);
  CHECK_THROWS_AS(Partition::from_clusters({{0}, {0, 1}}), DomainError);
  CHECK_THROWS_AS(Partition::from_clusters({{0}, {2}}), DomainError);
}

TEST_CASE("clusters are relabelled canonically") {
  const auto p = Partition::from_clusters({{1}, {2, 0}});
  CHECK(p.to_string() == "{1,3}|{2}");
  CHECK(p.assignment() == std::vector<int>{0, 1, 0});
}

TEST_CASE("index_of and restricted spaces") {
  const auto space = enumerate_partitions(4);
  for (std::size_t g = 0; g < space.size(); ++g) CHECK(space.index_of(space[g]) == g);
  const auto one = PartitionSpace::restricted(4, {Partition::from_assignment({0, 0, 0, 0})});
  CHECK(one.size() == 1);
  CHECK(one.index_of(space[1]) == one.size());
  CHECK_THROWS_AS(PartitionSpace::restricted(3, {space[0]}), DomainError);
}

TEST_CASE("parse_partition rejects malformed text") {
  CHECK_THROWS(parse_partition(""));
  CHECK_THROWS(parse_partition("{1,2"));
  CHECK_THROWS(parse_partition("{1}|{3}"));
  CHECK_THROWS(parse_partition("{1,1}|{2}"));
}
