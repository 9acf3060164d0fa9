#ifndef ASSEMBLIES_EXACT_HPP
#define ASSEMBLIES_EXACT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "assemblies/common.hpp"
#include "assemblies/spec.hpp"

namespace assemblies {

// A component-structure type: a_i components of size i, sum i*a_i = n.
struct PartitionType {
  std::vector<std::uint64_t> a;  // a[i-1] = a_i, trailing zeros trimmed
  std::size_t n = 0;
  std::size_t k = 0;

  std::size_t rank() const { return n - k; }
  std::uint64_t count(std::size_t i) const { return i >= 1 && i <= a.size() ? a[i - 1] : 0; }
  // Size of the largest component (0 for n = 0).
  std::size_t largest() const;

  // Validates sum i*a_i = n, sum a_i = k.
  static PartitionType from_counts(std::vector<std::uint64_t> a);
};

// Copartition: delete size-1 parts and decrement the rest; a partition
// of the rank r, stored weakly decreasing.
struct Copartition {
  std::vector<std::uint32_t> parts;

  std::uint64_t sum() const;
  std::uint32_t largest() const { return parts.empty() ? 0 : parts.front(); }
  std::uint64_t count_equal(std::uint32_t v) const;
  bool operator==(const Copartition&) const = default;
  bool operator<(const Copartition& o) const { return parts < o.parts; }
  std::string str() const;  // space-separated parts, "-" when empty
};

Copartition copartition(const PartitionType& type);
// Requires n - r >= number of parts (so the singleton count a_1 >= 0).
PartitionType inverse_copartition(const Copartition& c, std::size_t n);

// N(n, a) = n! prod m_i^{a_i} / (a_i! (i!)^{a_i}), exact.
BigInt count_N(const AssemblySpec& spec, const PartitionType& type);
// Same value in log space, indexed by the copartition so size-n count
// vectors are never materialized.
double log_count_N(const AssemblySpec& spec, std::size_t n, const Copartition& c);

// p(n) and p(n,k) by the remove-the-component-containing-n recurrence.
BigInt count_p(const AssemblySpec& spec, std::size_t n);
BigInt count_pnk(const AssemblySpec& spec, std::size_t n, std::size_t k);

// Builds the p(n,k) triangle once; rows readable concurrently afterwards.
class CountTable {
 public:
  CountTable(const AssemblySpec& spec, std::size_t n_max);

  const BigInt& pnk(std::size_t n, std::size_t k) const;
  BigInt p(std::size_t n) const;
  std::size_t n_max() const { return rows_.size() - 1; }

 private:
  std::vector<std::vector<BigInt>> rows_;  // rows_[n][k]
};

// Streams every type with sum i*a_i = n, sum a_i = k exactly once, in
// ascending lexicographic order of the copartition.
void enumerate_types(std::size_t n, std::size_t k,
                     const std::function<void(const PartitionType&)>& yield);

// Partitions of r into at most max_parts parts, same order.
void enumerate_partitions(std::uint64_t r, std::uint64_t max_parts,
                          const std::function<void(const Copartition&)>& yield);

// Exact law of the component structure D(n,k), indexed by copartitions
// of r = n-k.  Exact mode carries big rationals; log mode streams the
// enumeration and keeps marginals only when the support is too large.
struct ExactLaw {
  std::size_t n = 0, k = 0, r = 0;
  NumericMode mode = NumericMode::exact;

  bool has_support = true;
  std::vector<Copartition> support;
  std::vector<BigRat> prob;         // exact mode
  std::vector<double> log_prob;     // log mode

  // marginals (always present, as doubles)
  std::vector<double> l1_pmf;       // l1_pmf[s] = P(L1 = s), s = 0..r+1
  std::vector<double> parts_pmf;    // P(#copartition parts = j), j = 0..r
  // di_pmf[i][m] = P(D_i = m) for component sizes i = 2..max tracked
  std::vector<std::vector<double>> di_pmf;

  double prob_L1_eq(std::size_t size) const;
  double prob_L1_ge(std::size_t size) const;
  // P(D_i = m); D_1 is derived from parts_pmf, sizes 2.. from di_pmf.
  double prob_Di_eq(std::size_t i, std::uint64_t m) const;
};

// Law over types with k components (support always kept; exact mode).
ExactLaw exact_component_law(const AssemblySpec& spec, std::size_t n, std::size_t k);

// Same law indexed by rank; log_space mode handles n far beyond big-
// rational comfort.  keep_support forces/suppresses the support list
// (default: kept when the partition count of r is modest).
ExactLaw low_rank_law(const AssemblySpec& spec, std::size_t n, std::uint64_t r,
                      NumericMode mode = NumericMode::exact, int keep_support = -1);

// Exact distribution of the largest part of a uniform partition of r,
// via the bounded-largest-part DP in arbitrary precision.
class LargestPartTable {
 public:
  explicit LargestPartTable(std::uint64_t r);

  std::uint64_t r() const { return r_; }
  const BigInt& total() const { return cum_.back(); }          // p_r
  const BigInt& count_le(std::uint64_t j) const;               // #partitions, largest <= j
  BigRat prob_eq(std::uint64_t j) const;
  double mean() const;
  std::uint64_t quantile(double q) const;

 private:
  std::uint64_t r_;
  std::vector<BigInt> cum_;  // cum_[j] = count_le(j), j = 0..r
};

}  // namespace assemblies

#endif
