#ifndef ASSEMBLIES_TILTED_HPP
#define ASSEMBLIES_TILTED_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "assemblies/common.hpp"
#include "assemblies/spec.hpp"

namespace assemblies {

// Support of the single-draw component-size distribution Y.
enum class YSupport {
  finite,     // Y in {1..n}, P(Y=i) = lambda_i / (lambda_1+...+lambda_n)
  truncated,  // Y in N, P(Y=i) = lambda_i(x)/M(x), truncated with tail bound
};

struct YDistribution {
  YSupport mode = YSupport::finite;
  double x = 0.0;
  std::size_t n = 0;              // finite-mode cutoff
  std::vector<double> pmf;        // pmf[i-1] = P(Y = i)
  double total_mass = 0.0;        // lambda_1+...+lambda_n, or M(x)
  double tail_bound = 0.0;        // truncated mode: mass beyond the cutoff

  double p_y(std::size_t i) const { return i >= 1 && i <= pmf.size() ? pmf[i - 1] : 0.0; }
  // X = Y - 1.
  double p_x(std::size_t i) const { return p_y(i + 1); }
};

YDistribution y_pmf(const AssemblySpec& spec, double x, YSupport mode, std::size_t n,
                    double tail_tol = 1e-15);
// Finite mode, exact rationals; pmf[i-1] = P(Y = i).
std::vector<BigRat> y_pmf_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n);

// E_x X = x A'(x)/A(x) with A(z) = M(z)/z.
double mean_X(const AssemblySpec& spec, double x);

// P(T_n = s) for s = 0..n, T_n = Z_1 + 2 Z_2 + ... + n Z_n with
// independent Poisson(lambda_i) Z_i.
std::vector<double> tn_pmf(const AssemblySpec& spec, double x, std::size_t n);
// Exact scaled weights W(s) = e^{lambda_1+...+lambda_n} P(T_n = s); the
// scaling keeps everything rational.
std::vector<BigRat> tn_weights_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n);

// P(Y_1+...+Y_j = s) for j <= k, s <= n (row j of the table).
struct ConvolutionTable {
  std::size_t k = 0, n = 0;
  std::vector<std::vector<double>> rows;  // rows[j][s]

  double prob(std::size_t j, std::size_t s) const { return rows[j][s]; }
  double p_target() const { return rows[k][n]; }
};

ConvolutionTable ysum_pmf(const AssemblySpec& spec, double x, std::size_t k, std::size_t n,
                          YSupport mode);
// Exact scaled weights U_j(s) = S^j P(Y_1+...+Y_j = s), S = sum lambda_i.
std::vector<std::vector<BigRat>> ysum_weights_exact(const AssemblySpec& spec, const BigRat& x,
                                                    std::size_t k, std::size_t n);

// log P(X_1+...+X_k = r) by powering the truncated X-pgf; handles k in
// the tens of thousands where the full table would not.
double xsum_log_point(const AssemblySpec& spec, double x, std::size_t k, std::uint64_t r);

// Saddle solvers.
double solve_x_T(const AssemblySpec& spec, std::size_t n);  // E_x T_n = n

enum class XPolicy {
  p1_root,  // smallest positive root of k p_1(x) = r
  ratio,    // x = 2 m_1 r / (m_2 (n - 2r)) exactly
};
double solve_x_p1(const AssemblySpec& spec, std::size_t n, std::size_t k, XPolicy variant);

// Relative discrepancy of p(n) = (n!/x^n) e^{lambda_1+...+lambda_n} P_x(T_n=n).
double identity_check_pn(const AssemblySpec& spec, double x, std::size_t n);
BigRat identity_check_pn_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n);

// Relative discrepancy of p(n,k) = (n!/k!) S^k / x^n P_x(sum Y = n)
// (finite mode) or with M(x)^k (truncated mode).
double identity_check_pnk(const AssemblySpec& spec, double x, std::size_t n, std::size_t k,
                          YSupport mode);
BigRat identity_check_pnk_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n,
                                std::size_t k);

// Marginal law of Z_i under the (theta, x) tilt for the three structure
// classes.
enum class StructureClass { assembly, multiset, selection };

struct TiltedMarginal {
  enum class Kind { poisson, binomial, negative_binomial };
  Kind kind;
  double poisson_mean = 0.0;     // poisson
  BigInt trials = 0;             // binomial / negative_binomial: m_i
  double success = 0.0;          // binomial p, neg-binomial ratio theta x^i
  double mean = 0.0;
};

TiltedMarginal theta_x_marginal(StructureClass cls, const BigInt& m_i, double theta, double x,
                                std::size_t i);

// Solves E_{theta,x} K_n = k and E_{theta,x} T_n = n for the version-2
// sampler; returns (theta, x).
struct ThetaX {
  double theta = 1.0;
  double x = 0.0;
};
ThetaX solve_theta_x(const AssemblySpec& spec, std::size_t n, std::size_t k);

}  // namespace assemblies

#endif
