#include "assemblies/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "assemblies/stats.hpp"

namespace assemblies {

std::size_t PartitionType::largest() const {
  for (std::size_t i = a.size(); i >= 1; --i) {
    if (a[i - 1] > 0) return i;
  }
  return 0;
}

PartitionType PartitionType::from_counts(std::vector<std::uint64_t> a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  PartitionType t;
  t.n = 0;
  t.k = 0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    t.n += i * a[i - 1];
    t.k += a[i - 1];
  }
  t.a = std::move(a);
  return t;
}

std::uint64_t Copartition::sum() const {
  std::uint64_t s = 0;
  for (auto v : parts) s += v;
  return s;
}

std::uint64_t Copartition::count_equal(std::uint32_t v) const {
  return static_cast<std::uint64_t>(std::count(parts.begin(), parts.end(), v));
}

std::string Copartition::str() const {
  if (parts.empty()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ' ';
    os << parts[i];
  }
  return os.str();
}

Copartition copartition(const PartitionType& type) {
  Copartition c;
  for (std::size_t i = type.a.size(); i >= 2; --i) {
    for (std::uint64_t j = 0; j < type.a[i - 1]; ++j) {
      c.parts.push_back(static_cast<std::uint32_t>(i - 1));
    }
  }
  return c;
}

PartitionType inverse_copartition(const Copartition& c, std::size_t n) {
  std::uint64_t r = c.sum();
  std::size_t j = c.parts.size();
  if (r + j > n)
    throw std::invalid_argument("inverse_copartition: too many parts for n");
  std::size_t largest = c.largest();
  std::vector<std::uint64_t> a(std::max<std::size_t>(largest + 1, 1), 0);
  a[0] = n - r - j;  // singletons
  for (auto v : c.parts) a[v] += 1;
  return PartitionType::from_counts(std::move(a));
}

BigInt count_N(const AssemblySpec& spec, const PartitionType& type) {
  BigInt num;
  mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(type.n));
  BigInt den = 1;
  for (std::size_t i = 1; i <= type.a.size(); ++i) {
    std::uint64_t ai = type.a[i - 1];
    if (ai == 0) continue;
    BigInt mi_pow;
    mpz_pow_ui(mi_pow.get_mpz_t(), spec.m(i).get_mpz_t(), static_cast<unsigned long>(ai));
    num *= mi_pow;
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(ai));
    den *= f;
    BigInt ifac;
    mpz_fac_ui(ifac.get_mpz_t(), static_cast<unsigned long>(i));
    BigInt ifac_pow;
    mpz_pow_ui(ifac_pow.get_mpz_t(), ifac.get_mpz_t(), static_cast<unsigned long>(ai));
    den *= ifac_pow;
  }
  BigInt q, rem;
  mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (rem != 0) throw std::logic_error("count_N: non-integral count");
  return q;
}

double log_count_N(const AssemblySpec& spec, std::size_t n, const Copartition& c) {
  std::uint64_t r = c.sum();
  std::size_t j = c.parts.size();
  if (r + j > n) return -std::numeric_limits<double>::infinity();
  std::uint64_t a1 = n - r - j;
  double out = std::lgamma(static_cast<double>(n) + 1.0);
  out += static_cast<double>(a1) * spec.log_m(1) -
         std::lgamma(static_cast<double>(a1) + 1.0);
  std::size_t i0 = 0;
  while (i0 < c.parts.size()) {
    std::size_t i1 = i0;
    while (i1 < c.parts.size() && c.parts[i1] == c.parts[i0]) ++i1;
    std::size_t size = c.parts[i0] + 1;  // component size
    double mult = static_cast<double>(i1 - i0);
    out += mult * spec.log_m(size) - std::lgamma(mult + 1.0) -
           mult * std::lgamma(static_cast<double>(size) + 1.0);
    i0 = i1;
  }
  return out;
}

namespace {

// p(n,k) triangle rows 0..n_max by removing the component containing
// the last element
std::vector<std::vector<BigInt>> build_triangle(const AssemblySpec& spec, std::size_t n_max) {
  std::vector<std::vector<BigInt>> rows(n_max + 1);
  rows[0] = {BigInt(1)};
  for (std::size_t n = 1; n <= n_max; ++n) {
    rows[n].assign(n + 1, BigInt(0));
    for (std::size_t i = 1; i <= n; ++i) {
      BigInt mi = spec.m(i);
      if (mi == 0) continue;
      BigInt binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n - 1),
                   static_cast<unsigned long>(i - 1));
      BigInt w = mi * binom;
      const auto& prev = rows[n - i];
      for (std::size_t k = 1; k <= n - i + 1 && k <= n; ++k) {
        if (k - 1 < prev.size() && prev[k - 1] != 0) rows[n][k] += w * prev[k - 1];
      }
    }
  }
  return rows;
}

}  // namespace

BigInt count_p(const AssemblySpec& spec, std::size_t n) {
  std::vector<BigInt> p(n + 1);
  p[0] = 1;
  for (std::size_t m = 1; m <= n; ++m) {
    p[m] = 0;
    for (std::size_t i = 1; i <= m; ++i) {
      BigInt mi = spec.m(i);
      if (mi == 0) continue;
      BigInt binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(m - 1),
                   static_cast<unsigned long>(i - 1));
      p[m] += mi * binom * p[m - i];
    }
  }
  return p[n];
}

BigInt count_pnk(const AssemblySpec& spec, std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (n == 0) return 1;
  auto rows = build_triangle(spec, n);
  return rows[n][k];
}

CountTable::CountTable(const AssemblySpec& spec, std::size_t n_max)
    : rows_(build_triangle(spec, n_max)) {}

const BigInt& CountTable::pnk(std::size_t n, std::size_t k) const {
  static const BigInt zero = 0;
  if (n >= rows_.size() || k >= rows_[n].size()) return zero;
  return rows_[n][k];
}

BigInt CountTable::p(std::size_t n) const {
  BigInt total = 0;
  for (const auto& v : rows_[n]) total += v;
  return total;
}

void enumerate_partitions(std::uint64_t r, std::uint64_t max_parts,
                          const std::function<void(const Copartition&)>& yield) {
  Copartition work;
  // parts weakly decreasing; choosing the leading part in increasing
  // order makes the stream lexicographically ascending
  std::function<void(std::uint64_t, std::uint32_t, std::uint64_t)> rec =
      [&](std::uint64_t rem, std::uint32_t cap, std::uint64_t slots) {
        if (rem == 0) {
          yield(work);
          return;
        }
        if (slots == 0) return;
        // smallest feasible leading part: ceil(rem / slots)
        std::uint64_t lo = (rem + slots - 1) / slots;
        std::uint64_t hi = std::min<std::uint64_t>(cap, rem);
        for (std::uint64_t v = lo; v <= hi; ++v) {
          work.parts.push_back(static_cast<std::uint32_t>(v));
          rec(rem - v, static_cast<std::uint32_t>(v), slots - 1);
          work.parts.pop_back();
        }
      };
  std::uint32_t cap0 = static_cast<std::uint32_t>(std::min<std::uint64_t>(r, 0xffffffffULL));
  if (r == 0) {
    yield(work);
    return;
  }
  rec(r, cap0, max_parts);
}

void enumerate_types(std::size_t n, std::size_t k,
                     const std::function<void(const PartitionType&)>& yield) {
  if (k > n) return;
  std::uint64_t r = n - k;
  enumerate_partitions(r, k, [&](const Copartition& c) { yield(inverse_copartition(c, n)); });
}

double ExactLaw::prob_L1_eq(std::size_t size) const {
  return size < l1_pmf.size() ? l1_pmf[size] : 0.0;
}

double ExactLaw::prob_L1_ge(std::size_t size) const {
  double s = 0.0;
  for (std::size_t v = size; v < l1_pmf.size(); ++v) s += l1_pmf[v];
  return s;
}

double ExactLaw::prob_Di_eq(std::size_t i, std::uint64_t m) const {
  if (i == 0) return 0.0;
  if (i == 1) {
    // D_1 = k - (#copartition parts)
    if (m > k) return 0.0;
    std::uint64_t j = k - m;
    return j < parts_pmf.size() ? parts_pmf[j] : 0.0;
  }
  if (i < di_pmf.size() && m < di_pmf[i].size()) return di_pmf[i][m];
  return 0.0;
}

namespace {

std::uint64_t partition_count(std::uint64_t r, std::uint64_t max_parts) {
  // #partitions of r into at most max_parts parts; saturates instead of
  // overflowing
  std::vector<std::uint64_t> q(r + 1, 0);
  q[0] = 1;
  std::uint64_t cap_parts = std::min<std::uint64_t>(max_parts, r);
  // conjugate view: at most max_parts parts == largest part <= max_parts
  for (std::uint64_t j = 1; j <= cap_parts; ++j) {
    for (std::uint64_t s = j; s <= r; ++s) {
      if (q[s - j] > std::numeric_limits<std::uint64_t>::max() - q[s]) {
        return std::numeric_limits<std::uint64_t>::max();
      }
      q[s] += q[s - j];
    }
  }
  return q[r];
}

constexpr std::size_t kMaxTrackedSize = 6;
constexpr std::uint64_t kSupportDefaultCap = 200000;

}  // namespace

ExactLaw exact_component_law(const AssemblySpec& spec, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("exact_component_law: k > n");
  ExactLaw law;
  law.n = n;
  law.k = k;
  law.r = n - k;
  law.mode = NumericMode::exact;

  std::vector<BigInt> weights;
  BigInt total = 0;
  enumerate_types(n, k, [&](const PartitionType& t) {
    BigInt w = count_N(spec, t);
    law.support.push_back(copartition(t));
    weights.push_back(w);
    total += w;
  });
  if (total == 0) throw no_solution_error("exact_component_law: p(n,k) = 0");

  std::uint64_t r = law.r;
  law.l1_pmf.assign(r + 2, 0.0);
  law.parts_pmf.assign(r + 1, 0.0);
  law.di_pmf.assign(std::min<std::size_t>(kMaxTrackedSize, r + 1) + 1, {});
  for (std::size_t i = 2; i < law.di_pmf.size(); ++i) {
    law.di_pmf[i].assign(r / (i - 1) + 2, 0.0);
  }

  law.prob.reserve(weights.size());
  for (std::size_t idx = 0; idx < weights.size(); ++idx) {
    BigRat p(weights[idx], total);
    p.canonicalize();
    double pd = to_double(p);
    const Copartition& c = law.support[idx];
    std::size_t l1 = c.parts.empty() ? (n > 0 ? 1 : 0) : c.largest() + 1;
    law.l1_pmf[l1] += pd;
    law.parts_pmf[c.parts.size()] += pd;
    for (std::size_t i = 2; i < law.di_pmf.size(); ++i) {
      std::uint64_t cnt = c.count_equal(static_cast<std::uint32_t>(i - 1));
      law.di_pmf[i][cnt] += pd;
    }
    law.prob.push_back(std::move(p));
  }
  return law;
}

ExactLaw low_rank_law(const AssemblySpec& spec, std::size_t n, std::uint64_t r,
                      NumericMode mode, int keep_support) {
  if (r > n) throw std::invalid_argument("low_rank_law: r > n");
  std::size_t k = n - r;
  if (mode == NumericMode::exact) {
    ExactLaw law = exact_component_law(spec, n, k);
    if (keep_support == 0) {
      law.has_support = false;
      law.support.clear();
      law.prob.clear();
    }
    return law;
  }

  ExactLaw law;
  law.n = n;
  law.k = k;
  law.r = r;
  law.mode = NumericMode::log_space;

  std::uint64_t psize = partition_count(r, k);
  bool keep = keep_support >= 0 ? keep_support > 0 : psize <= kSupportDefaultCap;
  law.has_support = keep;

  // fast lookup tables; spec.log_m takes a lock per call and the stream
  // below can run tens of millions of partitions
  std::size_t max_size = static_cast<std::size_t>(r) + 1;
  std::vector<double> logm(max_size + 1, 0.0);
  for (std::size_t i = 1; i <= max_size; ++i) logm[i] = spec.log_m(i);
  std::vector<double> lg = lgamma_table(std::max<std::size_t>(n + 2, max_size + 2));
  auto lgam = [&](std::uint64_t v) { return lg[static_cast<std::size_t>(v) + 1]; };  // lgamma(v+1)

  std::size_t tracked = std::min<std::size_t>(kMaxTrackedSize, static_cast<std::size_t>(r) + 1);
  std::vector<LogSumAccumulator> l1_acc(r + 2), parts_acc(r + 1);
  std::vector<std::vector<LogSumAccumulator>> di_acc(tracked + 1);
  for (std::size_t i = 2; i <= tracked; ++i) di_acc[i].resize(r / (i - 1) + 2);
  LogSumAccumulator total_acc;

  double base = lgam(n);
  std::vector<double> log_weights;
  if (keep) log_weights.reserve(static_cast<std::size_t>(psize));

  enumerate_partitions(r, std::min<std::uint64_t>(r, k), [&](const Copartition& c) {
    std::size_t j = c.parts.size();
    std::uint64_t a1 = n - r - j;
    double lw = base + static_cast<double>(a1) * logm[1] - lgam(a1);
    std::size_t i0 = 0;
    while (i0 < j) {
      std::size_t i1 = i0;
      while (i1 < j && c.parts[i1] == c.parts[i0]) ++i1;
      std::size_t size = c.parts[i0] + 1;
      double mult = static_cast<double>(i1 - i0);
      lw += mult * logm[size] - lg[i1 - i0 + 1] - mult * lg[size + 1];
      i0 = i1;
    }
    total_acc.add(lw);
    std::size_t l1 = j == 0 ? (n > 0 ? 1 : 0) : c.largest() + 1;
    l1_acc[l1].add(lw);
    parts_acc[j].add(lw);
    for (std::size_t i = 2; i <= tracked; ++i) {
      di_acc[i][c.count_equal(static_cast<std::uint32_t>(i - 1))].add(lw);
    }
    if (keep) {
      law.support.push_back(c);
      log_weights.push_back(lw);
    }
  });

  double log_total = total_acc.log_sum();
  if (log_total == -std::numeric_limits<double>::infinity()) {
    throw no_solution_error("low_rank_law: total weight vanished");
  }

  law.l1_pmf.assign(r + 2, 0.0);
  for (std::size_t s = 0; s < l1_acc.size(); ++s) {
    law.l1_pmf[s] = l1_acc[s].empty() ? 0.0 : std::exp(l1_acc[s].log_sum() - log_total);
  }
  law.parts_pmf.assign(r + 1, 0.0);
  for (std::size_t s = 0; s < parts_acc.size(); ++s) {
    law.parts_pmf[s] = parts_acc[s].empty() ? 0.0 : std::exp(parts_acc[s].log_sum() - log_total);
  }
  law.di_pmf.assign(tracked + 1, {});
  for (std::size_t i = 2; i <= tracked; ++i) {
    law.di_pmf[i].assign(di_acc[i].size(), 0.0);
    for (std::size_t m = 0; m < di_acc[i].size(); ++m) {
      law.di_pmf[i][m] =
          di_acc[i][m].empty() ? 0.0 : std::exp(di_acc[i][m].log_sum() - log_total);
    }
  }
  if (keep) {
    law.log_prob.resize(log_weights.size());
    for (std::size_t idx = 0; idx < log_weights.size(); ++idx) {
      law.log_prob[idx] = log_weights[idx] - log_total;
    }
  }
  return law;
}

LargestPartTable::LargestPartTable(std::uint64_t r) : r_(r), cum_(r + 1) {
  std::vector<BigInt> q(r + 1);
  q[0] = 1;
  cum_[0] = (r == 0) ? 1 : 0;
  for (std::uint64_t j = 1; j <= r; ++j) {
    for (std::uint64_t s = j; s <= r; ++s) q[s] += q[s - j];
    cum_[j] = q[r];
  }
  if (r == 0) cum_ = {BigInt(1)};
}

const BigInt& LargestPartTable::count_le(std::uint64_t j) const {
  if (j >= cum_.size()) return cum_.back();
  return cum_[j];
}

BigRat LargestPartTable::prob_eq(std::uint64_t j) const {
  if (j == 0 || j > r_) return BigRat(r_ == 0 && j == 0 ? 1 : 0);
  BigRat p(count_le(j) - count_le(j - 1), total());
  p.canonicalize();
  return p;
}

double LargestPartTable::mean() const {
  if (r_ == 0) return 0.0;
  double total_d = to_double(BigRat(total()));
  double acc = 0.0;
  for (std::uint64_t j = 1; j <= r_; ++j) {
    BigInt diff = count_le(j) - count_le(j - 1);
    if (diff == 0) continue;
    acc += static_cast<double>(j) * to_double(BigRat(diff)) / total_d;
  }
  return acc;
}

std::uint64_t LargestPartTable::quantile(double q) const {
  if (q <= 0.0) return 0;
  BigRat target(q);
  for (std::uint64_t j = 0; j <= r_; ++j) {
    BigRat cdf(count_le(j), total());
    cdf.canonicalize();
    if (cdf >= target) return j;
  }
  return r_;
}

}  // namespace assemblies
