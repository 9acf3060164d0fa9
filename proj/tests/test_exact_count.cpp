#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "assemblies/exact.hpp"
#include "oracles.hpp"

using namespace assemblies;

TEST_CASE("p(n,k) for set partitions equals Stirling numbers of the second kind") {
  auto spec = AssemblySpec::set_partitions();
  CountTable table(spec, 12);
  for (int n = 0; n <= 12; ++n)
    for (int k = 0; k <= n; ++k) CHECK(table.pnk(n, k) == oracles::stirling2(n, k));
}

TEST_CASE("p(n,k) for permutations equals unsigned Stirling numbers of the first kind") {
  auto spec = AssemblySpec::permutations();
  CountTable table(spec, 12);
  for (int n = 1; n <= 12; ++n) {
    for (int k = 1; k <= n; ++k) CHECK(table.pnk(n, k) == oracles::stirling1(n, k));
  }
  BigInt fact = 1;
  for (int n = 1; n <= 12; ++n) {
    fact *= n;
    CHECK(table.p(n) == fact);
  }
}

TEST_CASE("p(n) for mappings is n^n and for graphs is 2^C(n,2)") {
  auto mp = AssemblySpec::mappings();
  for (std::size_t n = 1; n <= 8; ++n) {
    BigInt expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), static_cast<unsigned long>(n),
                  static_cast<unsigned long>(n));
    CHECK(count_p(mp, n) == expect);
  }
  auto gr = AssemblySpec::simple_graphs();
  for (std::size_t n = 1; n <= 8; ++n) {
    BigInt expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 2, static_cast<unsigned long>(n * (n - 1) / 2));
    CHECK(count_p(gr, n) == expect);
  }
}

TEST_CASE("count_N matches brute-force type counts for set partitions") {
  auto spec = AssemblySpec::set_partitions();
  for (int n = 1; n <= 9; ++n) {
    std::map<std::vector<int>, std::uint64_t> freq;
    oracles::for_each_set_partition(n, [&](std::vector<int> sizes) { freq[sizes] += 1; });
    for (const auto& [sizes, count] : freq) {
      std::vector<std::uint64_t> a(static_cast<std::size_t>(sizes.front()), 0);
      for (int s : sizes) a[s - 1] += 1;
      auto type = PartitionType::from_counts(a);
      CHECK(count_N(spec, type) == BigInt(static_cast<unsigned long>(count)));
    }
  }
}

TEST_CASE("count_N matches brute-force cycle-type counts for permutations") {
  auto spec = AssemblySpec::permutations();
  for (int n = 1; n <= 8; ++n) {
    std::map<std::vector<int>, std::uint64_t> freq;
    oracles::for_each_permutation(n, [&](std::vector<int> cyc) { freq[cyc] += 1; });
    for (const auto& [sizes, count] : freq) {
      std::vector<std::uint64_t> a(static_cast<std::size_t>(sizes.front()), 0);
      for (int s : sizes) a[s - 1] += 1;
      auto type = PartitionType::from_counts(a);
      CHECK(count_N(spec, type) == BigInt(static_cast<unsigned long>(count)));
    }
  }
}

TEST_CASE("types with k components sum to p(n,k)") {
  for (auto spec : {AssemblySpec::set_partitions(), AssemblySpec::permutations(),
                    AssemblySpec::mappings()}) {
    CountTable table(spec, 14);
    for (std::size_t n = 1; n <= 14; ++n) {
      for (std::size_t k = 1; k <= n; ++k) {
        BigInt total = 0;
        enumerate_types(n, k, [&](const PartitionType& t) { total += count_N(spec, t); });
        CHECK(total == table.pnk(n, k));
      }
    }
  }
}

TEST_CASE("copartition bijection round trips") {
  enumerate_types(11, 6, [&](const PartitionType& t) {
    Copartition c = copartition(t);
    CHECK(c.sum() == 5);
    PartitionType back = inverse_copartition(c, 11);
    CHECK(back.a == t.a);
    CHECK(back.k == 6);
  });
}

TEST_CASE("enumerate_partitions is ascending, complete, duplicate-free") {
  // p(8) = 22
  std::vector<Copartition> seen;
  enumerate_partitions(8, 8, [&](const Copartition& c) {
    CHECK(c.sum() == 8);
    if (!seen.empty()) CHECK(seen.back() < c);
    seen.push_back(c);
  });
  CHECK(seen.size() == 22);
  // part-count cap
  std::size_t capped = 0;
  enumerate_partitions(8, 2, [&](const Copartition&) { ++capped; });
  CHECK(capped == 5);  // 8, 7+1, 6+2, 5+3, 4+4
}

TEST_CASE("log_count_N agrees with count_N") {
  auto spec = AssemblySpec::mappings();
  enumerate_types(12, 7, [&](const PartitionType& t) {
    double expect = log_bigint(count_N(spec, t));
    CHECK(log_count_N(spec, 12, copartition(t)) == doctest::Approx(expect).epsilon(1e-12));
  });
}

TEST_CASE("exact law for set partitions at n=6, k=4") {
  auto law = exact_component_law(AssemblySpec::set_partitions(), 6, 4);
  REQUIRE(law.support.size() == 2);
  CHECK(law.support[0].str() == "1 1");
  CHECK(law.support[1].str() == "2");
  CHECK(law.prob[0] == BigRat(9, 13));
  CHECK(law.prob[1] == BigRat(4, 13));
  CHECK(law.prob_L1_eq(2) == doctest::Approx(9.0 / 13.0));
  CHECK(law.prob_L1_eq(3) == doctest::Approx(4.0 / 13.0));
  CHECK(law.prob_L1_ge(3) == doctest::Approx(4.0 / 13.0));
  CHECK(law.prob_Di_eq(2, 2) == doctest::Approx(9.0 / 13.0));
  CHECK(law.prob_Di_eq(3, 1) == doctest::Approx(4.0 / 13.0));
  CHECK(law.prob_Di_eq(1, 2) == doctest::Approx(9.0 / 13.0));
}

TEST_CASE("exact law marginals are probability vectors") {
  auto law = exact_component_law(AssemblySpec::permutations(), 10, 6);
  double s = 0.0;
  for (double v : law.l1_pmf) s += v;
  CHECK(s == doctest::Approx(1.0));
  s = 0.0;
  for (double v : law.parts_pmf) s += v;
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("low_rank_law log mode agrees with exact mode") {
  for (auto spec : {AssemblySpec::set_partitions(), AssemblySpec::permutations(),
                    AssemblySpec::mappings()}) {
    auto exact = low_rank_law(spec, 30, 8, NumericMode::exact);
    auto logm = low_rank_law(spec, 30, 8, NumericMode::log_space);
    REQUIRE(logm.has_support);
    REQUIRE(logm.support.size() == exact.support.size());
    for (std::size_t i = 0; i < exact.support.size(); ++i) {
      CHECK(logm.support[i] == exact.support[i]);
      CHECK(std::exp(logm.log_prob[i]) ==
            doctest::Approx(to_double(exact.prob[i])).epsilon(1e-9));
    }
    for (std::size_t s = 0; s < exact.l1_pmf.size(); ++s) {
      CHECK(logm.l1_pmf[s] == doctest::Approx(exact.l1_pmf[s]).epsilon(1e-9));
    }
  }
}

TEST_CASE("low_rank_law streams marginals without support when asked") {
  auto law = low_rank_law(AssemblySpec::set_partitions(), 200, 12, NumericMode::log_space, 0);
  CHECK_FALSE(law.has_support);
  CHECK(law.support.empty());
  double s = 0.0;
  for (double v : law.l1_pmf) s += v;
  CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("largest-part table against direct enumeration") {
  LargestPartTable t(8);
  CHECK(t.total() == 22);
  // partitions of 8 with largest part <= 2: 8=2a+b, five of them
  CHECK(t.count_le(1) == 1);
  CHECK(t.count_le(2) == 5);
  CHECK(t.count_le(8) == 22);
  double mean = 0.0;
  std::map<std::uint32_t, int> freq;
  enumerate_partitions(8, 8, [&](const Copartition& c) { freq[c.largest()] += 1; });
  for (auto& [v, f] : freq) {
    BigRat expect(f, 22);
    expect.canonicalize();
    CHECK(t.prob_eq(v) == expect);
    mean += static_cast<double>(v) * f / 22.0;
  }
  CHECK(t.mean() == doctest::Approx(mean));
  CHECK(t.quantile(0.0001) == 1);
  CHECK(t.quantile(1.0) == 8);
}
