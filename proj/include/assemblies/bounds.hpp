#ifndef ASSEMBLIES_BOUNDS_HPP
#define ASSEMBLIES_BOUNDS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "assemblies/common.hpp"
#include "assemblies/spec.hpp"

namespace assemblies {

// c0 = e / sqrt(2 pi)
inline constexpr double kC0 = 1.0844375514192275;

// Every guarantee carries its hypothesis flags; when a flag is false the
// dependent interval/bound fields stay empty rather than holding
// unguarded numbers.
struct BoundsReport {
  std::string assembly;
  std::size_t n = 0, k = 0;
  std::uint64_t r = 0;

  double x = 0.0;    // saddle choice 2 m_1 r / (m_2 (n - 2r))
  double rho = 0.0;
  bool hyp_24 = false;      // x rho <= 1/2
  bool hyp_needed = false;  // 2 k rho^3 x^2 / m_1 <= 1/2
  double c0 = kC0;

  double y = 0.0;                          // size-3 exponent
  double l1_eq3_bound = 0.0;               // e^y - 1
  std::optional<double> u4;                // P(L1 >= 4) bound
  std::optional<double> xsum_lower;        // P(X_1+...+X_k = r) >= this
  std::optional<double> z;                 // (e^y - 1) + u4
  std::optional<double> log_pnk_lower;     // two-sided p(n,k) estimate, log space
  std::optional<double> log_pnk_upper;

  std::string to_json(int indent = 2) const;
};

// Poisson limit mean for size-3 components at rank r ~ t sqrt(n):
// 2 m_1 m_3 t^2 / (3 m_2^2).
double lambda_limit(const AssemblySpec& spec, double t);
// General ell: 2^{l+1} m_1^l m_{l+2} t^{l+1} / ((l+2)! m_2^{l+1}).
double lambda_limit_ell(const AssemblySpec& spec, double t, std::size_t ell);

// log of the closed-form large-n asymptotic for p(n, n-r).
double asymptotic_log_pnk(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

struct Lemma23Bound {
  double y;
  double bound;  // e^y - 1 >= P(L1 = 3)
};
Lemma23Bound lemma23_bound(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

struct Lemma24Bound {
  double x;
  double rho;
  bool hyp_24;
  bool hyp_needed;
  std::optional<double> u4;          // P(L1 >= 4) <= u4
  std::optional<double> xsum_lower;  // P(X-sum = r) >= 1/(2 c0 sqrt(2 pi r))
};
Lemma24Bound lemma24_bound(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

struct Thm15Sandwich {
  bool effective;  // hypotheses hold and z < 1
  double z;
  std::optional<double> log_lower;  // log N(n, (n-2r, r, 0...)) <= log p(n,k)
  std::optional<double> log_upper;  // log(lower * (1 + z/(1-z)))
};
Thm15Sandwich thm15_sandwich(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

// Feller's sandwich for the binomial point mass around its Poisson proxy.
struct FellerBounds {
  double lower;
  double upper;
  bool lower_degenerate;  // k = n: lower exponent singular, reported as 0
};
FellerBounds feller_bounds(std::uint64_t k, std::uint64_t n, double p);

// Stirling-exact point sandwich for sqrt(2 pi p q n) b(k; n, p):
//   exp(-beta + g) < sqrt(2 pi p q n) b < exp(f).
// f and g are closed forms in h = k - pn (see bounds.cpp for the exact
// expressions).
struct BinomialPointBounds {
  bool valid;
  double h;
  double beta;
  double f;  // upper exponent
  double g;  // lower exponent (before -beta)
  double lower;  // bound on sqrt(2 pi p q n) * b
  double upper;
};
BinomialPointBounds binomial_point_bounds(std::uint64_t k, std::uint64_t n, double p);
double binomial_f(double h, double n, double p);
double binomial_g(double h, double n, double p);

// Effectivity thresholds: n0 = exp(mu e^2) with mu the sup of
// k b_1/(b_0+b_1) over the declared (n,k) family, and n3 the smallest n
// making the tail inequality hold.  Reported in log space since they can
// be astronomically large.
struct DeviationThresholds {
  double mu;
  double log_n0;          // mu * e^2
  double n3_lemma;        // RHS with (2 m_1/m_2)^3
  double n3_proof;        // RHS with (m_2/(2 m_1))^3 (the reciprocal variant)
  double n3_conservative; // max of the two (smaller RHS wins)
};
DeviationThresholds deviation_thresholds(const AssemblySpec& spec,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& family);
DeviationThresholds deviation_thresholds(const AssemblySpec& spec, std::size_t n, std::size_t k);

// Completely effective interval bounds for P(D_3 = m) and P(L1 = 2).
// Uses the factor lambda^k/k!; a cross-check against lambda^m/m! is
// surfaced as a warning flag when the two differ materially.
struct SdReport {
  std::size_t n = 0, k = 0;
  std::uint64_t m = 0;
  double x = 0, b0 = 0, b1 = 0, b2 = 0;
  double lambda = 0, p = 0, beta = 0;
  double log_n0 = 0, n3 = 0;
  bool effective = false;  // n >= max(exp(mu e^2), n3)
  // log-space interval endpoints, present only when effective
  std::optional<double> log_d3_lower, log_d3_upper;
  std::optional<double> log_l1eq2_lower, log_l1eq2_upper;
  // diagnostics
  double log_poisson_factor_at_k = 0;  // log(lambda^k / k!) e^{-lambda}
  double log_poisson_factor_at_m = 0;        // log(lambda^m / m!) e^{-lambda}
  bool poisson_index_warning = false;        // the two differ materially

  std::string to_json(int indent = 2) const;
};
SdReport sd_bounds(const AssemblySpec& spec, std::size_t n, std::size_t k, std::uint64_t m);

// Exact closed-form ratios N(a')/N(a), N(a'')/N(a), N(a''')/N(a) of the
// four reference rank-r types, plus their large-n proxies.
struct TypeRatios {
  double r1, r2, r3;              // exact ratios (doubles)
  double r1_proxy;                // (2 m_1 m_3 / (3 m_2^2)) r^2 / n
};
TypeRatios type_ratios(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

// Conjectural 1/r correction coefficient C(t); diagnostic only, never
// used inside a guarantee.
double conjecture_C(const AssemblySpec& spec, double t);

// Regime classification for rank r vs n^{l/(l+1)} scales.
struct RegimeDescriptor {
  double alpha_hat;                  // log r / log n
  std::size_t ell;                   // bracketing l
  bool boundary;                     // r ~ t n^{l/(l+1)}
  double t;                          // r / n^{l/(l+1)}
  std::optional<double> lambda;      // boundary Poisson mean
  std::vector<std::size_t> l1_support;  // predicted high-probability L1 values
  std::vector<double> di_magnitude;  // predicted E D_i, i = 1..l+2
  std::string note = "asymptotic prediction";
};
RegimeDescriptor thm2_classify(const AssemblySpec& spec, std::size_t n, std::uint64_t r);

}  // namespace assemblies

#endif
