#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "assemblies/bounds.hpp"
#include "assemblies/exact.hpp"
#include "assemblies/rng.hpp"
#include "assemblies/stats.hpp"
#include "assemblies/tilted.hpp"
#include "json.hpp"

using namespace assemblies;

namespace {

// exact log p(n, n-r): complete sum of type counts over the rank-r
// copartitions, independent of the p(n,k) recurrence
double log_pnk_stream(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  LogSumAccumulator acc;
  enumerate_partitions(r, std::min<std::uint64_t>(r, n - r), [&](const Copartition& c) {
    acc.add(log_count_N(spec, n, c));
  });
  return acc.log_sum();
}

double log_binomial_pm(std::uint64_t k, std::uint64_t n, double p) {
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

}  // namespace

TEST_CASE("limit means") {
  auto sp = AssemblySpec::set_partitions();
  auto pm = AssemblySpec::permutations();
  CHECK(lambda_limit(sp, 1.0) == doctest::Approx(2.0 / 3.0));
  CHECK(lambda_limit(pm, 1.0) == doctest::Approx(4.0 / 3.0));
  CHECK(lambda_limit(sp, 0.0) == 0.0);
  CHECK(lambda_limit_ell(sp, 1.0, 2) == doctest::Approx(1.0 / 3.0));
  CHECK(lambda_limit_ell(pm, 2.0, 2) == doctest::Approx(16.0));
  for (double t : {0.2, 0.7, 1.0, 2.5}) {
    CHECK(lambda_limit_ell(sp, t, 1) == doctest::Approx(lambda_limit(sp, t)).epsilon(1e-14));
    CHECK(lambda_limit_ell(pm, t, 1) == doctest::Approx(lambda_limit(pm, t)).epsilon(1e-14));
  }
}

TEST_CASE("asymptotic p(n,k): degenerate rank and moderate-n accuracy") {
  auto sp = AssemblySpec::set_partitions();
  CHECK(asymptotic_log_pnk(sp, 50, 0) == doctest::Approx(0.0));  // m1 = 1
  auto pm = AssemblySpec::permutations();
  CHECK(asymptotic_log_pnk(pm, 50, 0) == doctest::Approx(0.0));
  double exact = log_pnk_stream(sp, 2500, 50);
  double approx = asymptotic_log_pnk(sp, 2500, 50);
  CHECK(std::fabs(std::expm1(approx - exact)) < 0.25);
}

TEST_CASE("asymptotic p(n,k): relative error decreases along the t=1 family") {
  auto sp = AssemblySpec::set_partitions();
  double prev = 1e18;
  for (auto [n, r] : std::vector<std::pair<std::size_t, std::uint64_t>>{
           {400, 20}, {1600, 40}, {6400, 80}}) {
    double err = std::fabs(std::expm1(asymptotic_log_pnk(sp, n, r) - log_pnk_stream(sp, n, r)));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("size-3 bound: worked example and containment") {
  auto sp = AssemblySpec::set_partitions();
  auto b = lemma23_bound(sp, 6, 2);
  CHECK(b.y == doctest::Approx(4.0 / 3.0));
  CHECK(b.bound == doctest::Approx(2.7937).epsilon(1e-4));
  auto law = exact_component_law(sp, 6, 4);
  CHECK(law.prob_L1_eq(3) <= b.bound);
  // no size-3 components possible
  auto no3 = AssemblySpec::custom("no3", {BigInt(1), BigInt(1)});
  auto z = lemma23_bound(no3, 20, 4);
  CHECK(z.y == 0.0);
  CHECK(z.bound == 0.0);
  CHECK_THROWS_AS(lemma23_bound(sp, 6, 3), std::invalid_argument);
}

TEST_CASE("size>=4 bound: hypotheses, example values, failure surface") {
  auto sp = AssemblySpec::set_partitions();
  auto b = lemma24_bound(sp, 10000, 10);
  CHECK(b.x == doctest::Approx(2.0 * 10.0 / 9980.0));
  CHECK(b.rho == doctest::Approx(std::cbrt(1.0 / 6.0)));
  CHECK(b.hyp_24);
  CHECK(b.hyp_needed);
  REQUIRE(b.u4.has_value());
  REQUIRE(b.xsum_lower.has_value());
  CHECK(*b.xsum_lower == doctest::Approx(1.0 / (2.0 * kC0 * std::sqrt(20.0 * M_PI))));

  auto bad = lemma24_bound(sp, 100, 45);
  CHECK(bad.x == doctest::Approx(9.0));
  CHECK_FALSE(bad.hyp_24);
  CHECK_FALSE(bad.u4.has_value());

  CHECK_THROWS_AS(lemma24_bound(AssemblySpec::simple_graphs(), 100, 5), unsupported_error);
}

TEST_CASE("containment grid: exact marginals under the closed-form bounds") {
  for (auto spec : {AssemblySpec::set_partitions(), AssemblySpec::permutations(),
                    AssemblySpec::mappings()}) {
    for (std::size_t n : {200, 800, 3200}) {
      for (std::uint64_t r : {2, 5, 9}) {
        auto l23 = lemma23_bound(spec, n, r);
        auto l24 = lemma24_bound(spec, n, r);
        if (!l24.hyp_24 || !l24.hyp_needed) continue;
        auto law = low_rank_law(spec, n, r, NumericMode::log_space);
        CHECK(law.prob_L1_eq(3) <= l23.bound * (1.0 + 1e-9));
        CHECK(law.prob_L1_ge(4) <= *l24.u4 * (1.0 + 1e-9));
        double lo = std::exp(xsum_log_point(spec, l24.x, n - r, r));
        CHECK(lo >= *l24.xsum_lower * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("two-sided p(n,k) estimate: lower term is the exact pure-pairs count") {
  auto sp = AssemblySpec::permutations();
  auto s = thm15_sandwich(sp, 10000, 10);
  REQUIRE(s.effective);
  std::vector<std::uint64_t> a(2, 0);
  a[0] = 9980;
  a[1] = 10;
  double direct = log_bigint(count_N(sp, PartitionType::from_counts(a)));
  CHECK(*s.log_lower == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("two-sided p(n,k) estimate contains the exact value at n=10^4, r=10") {
  for (auto spec : {AssemblySpec::set_partitions(), AssemblySpec::permutations()}) {
    auto s = thm15_sandwich(spec, 10000, 10);
    REQUIRE(s.effective);
    double exact = log_pnk_stream(spec, 10000, 10);
    CHECK(*s.log_lower <= exact + 1e-9);
    CHECK(exact <= *s.log_upper + 1e-9);
  }
}

TEST_CASE("poisson sandwich for the binomial point mass") {
  auto fb = feller_bounds(1, 10, 0.1);
  double b = std::exp(log_binomial_pm(1, 10, 0.1));
  CHECK(b == doctest::Approx(0.387420).epsilon(1e-5));
  CHECK(fb.lower == doctest::Approx(std::exp(-1.0) * std::exp(-1.0 / 9.0 - 1.0 / 9.0)));
  CHECK(fb.upper == doctest::Approx(std::exp(-1.0) * std::exp(0.1)));
  CHECK(fb.lower < b);
  CHECK(b < fb.upper);

  auto f0 = feller_bounds(0, 20, 0.3);
  double b0 = std::exp(log_binomial_pm(0, 20, 0.3));
  CHECK(f0.lower < b0);
  CHECK(b0 < f0.upper);

  auto fn = feller_bounds(10, 10, 0.4);
  CHECK(fn.lower_degenerate);
  CHECK(fn.lower == 0.0);

  Rng rng(31);
  for (int it = 0; it < 10000; ++it) {
    std::uint64_t n = 2 + rng.next_u64() % 999;
    double p = 0.001 + 0.998 * rng.uniform();
    std::uint64_t k = rng.next_u64() % n;  // keep k < n so the lower exponent exists
    double log_mass = log_binomial_pm(k, n, p);
    if (log_mass < -600.0) {  // both sides underflow doubles out in the far tail
      --it;
      continue;
    }
    auto s = feller_bounds(k, n, p);
    double mass = std::exp(log_mass);
    CHECK(s.lower < mass);
    CHECK(mass < s.upper);
  }
}

TEST_CASE("stirling point sandwich for the scaled binomial mass") {
  // worked case away from the mean
  {
    auto s = binomial_point_bounds(25, 100, 0.2);
    REQUIRE(s.valid);
    double scaled = std::sqrt(2.0 * M_PI * 0.2 * 0.8 * 100.0) *
                    std::exp(log_binomial_pm(25, 100, 0.2));
    CHECK(s.lower < scaled);
    CHECK(scaled < s.upper);
  }
  // at the mean the core exponent vanishes
  {
    auto s = binomial_point_bounds(20, 100, 0.2);
    CHECK(s.h == 0.0);
    CHECK(s.g == 0.0);
    CHECK(s.f == doctest::Approx(1.0 / 1200.0));
  }
  Rng rng(57);
  for (int it = 0; it < 10000; ++it) {
    std::uint64_t n = 4 + rng.next_u64() % 997;
    double p = 0.001 + 0.998 * rng.uniform();
    if (p * static_cast<double>(n) < 1.0) {
      --it;
      continue;
    }
    std::uint64_t k = 1 + rng.next_u64() % (n - 1);
    auto s = binomial_point_bounds(k, n, p);
    REQUIRE(s.valid);
    double q = 1.0 - p;
    double scaled = 0.5 * std::log(2.0 * M_PI * p * q * static_cast<double>(n)) +
                    log_binomial_pm(k, n, p);
    // exponent-space comparison: far tails underflow exp()
    CHECK(-s.beta + s.g < scaled + 1e-9);
    CHECK(scaled < s.f + 1e-9);
  }
}

TEST_CASE("effectivity thresholds at the worked grid point") {
  auto sp = AssemblySpec::set_partitions();
  auto th = deviation_thresholds(sp, 10000, 9990);
  // tail condition: 1e4 * 1e3 / 9990^2 ~ 0.1002, well under both RHS forms
  CHECK(th.n3_lemma == doctest::Approx(10000.0));
  CHECK(th.n3_proof == doctest::Approx(10000.0));
  CHECK(th.n3_conservative == doctest::Approx(10000.0));
  CHECK(th.mu > 0.0);
  CHECK(th.log_n0 == doctest::Approx(th.mu * std::exp(2.0)));
  // degenerate k=n: x=0, both conditions trivially satisfied
  auto deg = deviation_thresholds(sp, 100, 100);
  CHECK(deg.n3_conservative == doctest::Approx(100.0));
}

TEST_CASE("interval report: diagnostics always, intervals only when effective") {
  auto sp = AssemblySpec::set_partitions();
  auto rep = sd_bounds(sp, 2500, 2450, 0);
  CHECK(rep.x == doctest::Approx(2.0 * 50.0 / 2450.0));
  CHECK(rep.lambda == doctest::Approx(rep.x * rep.x / 6.0));
  CHECK(rep.p == doctest::Approx(rep.b1 / (rep.b0 + rep.b1)));
  // the threshold exp(mu e^2) dwarfs any desk-scale n here
  CHECK(rep.log_n0 > std::log(2500.0));
  CHECK_FALSE(rep.effective);
  CHECK_FALSE(rep.log_d3_lower.has_value());
  CHECK(rep.poisson_index_warning);  // k = 2450 vs m = 0

  auto deg = sd_bounds(sp, 100, 100, 0);
  CHECK(deg.x == 0.0);
  CHECK(deg.lambda == 0.0);
  CHECK_FALSE(deg.effective);

  auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["effective"] == false);
  CHECK(j["log_d3_lower"].is_null());
  CHECK(j["poisson_index_warning"] == true);
}

TEST_CASE("reference type ratios") {
  auto sp = AssemblySpec::set_partitions();
  auto tr = type_ratios(sp, 100, 10);
  CHECK(tr.r1 == doctest::Approx(20.0 / 27.0));
  CHECK(tr.r1_proxy == doctest::Approx(2.0 / 3.0 * 100.0 / 100.0));
  // cross-check all three against exact count quotients
  for (auto spec : {AssemblySpec::set_partitions(), AssemblySpec::permutations(),
                    AssemblySpec::mappings()}) {
    std::size_t n = 40;
    std::uint64_t r = 8;
    auto ratios = type_ratios(spec, n, r);
    auto mk = [&](std::vector<std::uint64_t> a) {
      return count_N(spec, PartitionType::from_counts(std::move(a)));
    };
    BigInt base = mk({n - 2 * r, r});
    BigRat q1(mk({n - 2 * r + 1, r - 2, 1}), base);
    BigRat q2(mk({n - 2 * r + 2, r - 4, 2}), base);
    BigRat q3(mk({n - 2 * r + 2, r - 3, 0, 1}), base);
    q1.canonicalize();
    q2.canonicalize();
    q3.canonicalize();
    CHECK(ratios.r1 == doctest::Approx(to_double(q1)).epsilon(1e-12));
    CHECK(ratios.r2 == doctest::Approx(to_double(q2)).epsilon(1e-12));
    CHECK(ratios.r3 == doctest::Approx(to_double(q3)).epsilon(1e-12));
  }
  auto no3 = AssemblySpec::custom("no3", {BigInt(1), BigInt(1), BigInt(0), BigInt(5)});
  auto z = type_ratios(no3, 60, 10);
  CHECK(z.r1 == 0.0);
  CHECK(z.r2 == 0.0);
  CHECK(z.r3 > 0.0);
}

TEST_CASE("conjectural 1/r coefficient") {
  auto pm = AssemblySpec::permutations();
  CHECK(conjecture_C(pm, 0.0) == 0.0);
  CHECK(conjecture_C(pm, 1.0) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("regime classification") {
  auto sp = AssemblySpec::set_partitions();
  auto b1 = thm2_classify(sp, 10000, 100);  // r = sqrt(n)
  CHECK(b1.ell == 1);
  CHECK(b1.boundary);
  CHECK(b1.t == doctest::Approx(1.0));
  REQUIRE(b1.lambda.has_value());
  CHECK(*b1.lambda == doctest::Approx(2.0 / 3.0));
  CHECK(b1.l1_support == std::vector<std::size_t>{2, 3});

  auto mid = thm2_classify(sp, 10000, 251);  // alpha ~ 0.6
  CHECK(mid.ell == 1);
  CHECK_FALSE(mid.boundary);
  CHECK(mid.l1_support == std::vector<std::size_t>{3});

  auto small = thm2_classify(sp, 10000, 5);
  CHECK_FALSE(small.boundary);
  CHECK(small.l1_support == std::vector<std::size_t>{2});

  auto b2 = thm2_classify(sp, 10000, 464);  // r ~ n^{2/3}
  CHECK(b2.ell == 2);
  CHECK(b2.boundary);
  CHECK(b2.l1_support == std::vector<std::size_t>{3, 4});
  CHECK(b2.note == "asymptotic prediction");
}

TEST_CASE("bounds report serializes with mandatory flags") {
  BoundsReport rep;
  rep.assembly = "set-partitions";
  rep.n = 100;
  rep.k = 90;
  rep.r = 10;
  rep.hyp_24 = true;
  auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["assembly"] == "set-partitions");
  CHECK(j["hyp_24"] == true);
  CHECK(j["hyp_needed"] == false);
  CHECK(j["u4"].is_null());
  CHECK(j["c0"] == doctest::Approx(kC0));
}
