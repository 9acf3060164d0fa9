#include "assemblies/tilted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "assemblies/exact.hpp"
#include "assemblies/stats.hpp"

namespace assemblies {

namespace {

// sum of lambda_i over i = 1..n
double lambda_sum(const AssemblySpec& spec, double x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) s += lambda_i(spec, x, i);
  return s;
}

BigRat lambda_sum_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n) {
  BigRat s = 0;
  for (std::size_t i = 1; i <= n; ++i) s += lambda_i_exact(spec, x, i);
  s.canonicalize();
  return s;
}

}  // namespace

YDistribution y_pmf(const AssemblySpec& spec, double x, YSupport mode, std::size_t n,
                    double tail_tol) {
  if (!(x > 0.0)) throw std::invalid_argument("y_pmf: x > 0 required");
  YDistribution d;
  d.mode = mode;
  d.x = x;
  if (mode == YSupport::finite) {
    if (n == 0) throw std::invalid_argument("y_pmf: finite mode needs n >= 1");
    d.n = n;
    d.pmf.resize(n);
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      d.pmf[i - 1] = lambda_i(spec, x, i);
      s += d.pmf[i - 1];
    }
    if (s <= 0.0) throw no_solution_error("y_pmf: all lambda_i vanish");
    for (auto& p : d.pmf) p /= s;
    d.total_mass = s;
    d.tail_bound = 0.0;
    return d;
  }
  // truncated: P(Y=i) = lambda_i / M(x), cut when the geometric tail of
  // the lambda series drops below tail_tol of the mass
  double rho = spec.rho();
  if (rho > 0.0 && x * rho >= 1.0)
    throw divergence_error("y_pmf: x >= 1/rho");
  SeriesEval M = egf_M(spec, x);
  d.total_mass = M.value;
  double ratio = x * rho;
  std::size_t cutoff = 3;
  if (ratio > 0.0) {
    // (ratio)^{c+1}/(1-ratio) <= tail_tol * M
    double target = tail_tol * M.value * (1.0 - ratio);
    cutoff = 3;
    double t = ratio * ratio * ratio * ratio;
    while (t > target && cutoff < 100000) {
      t *= ratio;
      ++cutoff;
    }
  } else {
    cutoff = std::max<std::size_t>(n, 8);
  }
  cutoff = std::max<std::size_t>(cutoff, std::max<std::size_t>(n, 3));
  d.n = cutoff;
  d.pmf.resize(cutoff);
  for (std::size_t i = 1; i <= cutoff; ++i) d.pmf[i - 1] = lambda_i(spec, x, i) / M.value;
  d.tail_bound =
      ratio > 0.0 ? std::pow(ratio, static_cast<double>(cutoff) + 1.0) / ((1.0 - ratio) * M.value)
                  : 0.0;
  return d;
}

std::vector<BigRat> y_pmf_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n) {
  if (n == 0) throw std::invalid_argument("y_pmf_exact: n >= 1");
  BigRat s = lambda_sum_exact(spec, x, n);
  if (s == 0) throw no_solution_error("y_pmf_exact: all lambda_i vanish");
  std::vector<BigRat> pmf(n);
  for (std::size_t i = 1; i <= n; ++i) {
    pmf[i - 1] = lambda_i_exact(spec, x, i) / s;
    pmf[i - 1].canonicalize();
  }
  return pmf;
}

double mean_X(const AssemblySpec& spec, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("mean_X: x > 0 required");
  double rho = spec.rho();
  if (rho > 0.0 && x * rho >= 1.0) throw divergence_error("mean_X: x >= 1/rho");
  double num = 0.0, den = 0.0;
  double ratio = x * rho;
  for (std::size_t i = 1; i <= 200000; ++i) {
    double li = lambda_i(spec, x, i);
    num += static_cast<double>(i - 1) * li;
    den += li;
    if (i >= 3 && ratio > 0.0) {
      double tail = std::pow(ratio, static_cast<double>(i) + 1.0) / (1.0 - ratio);
      if (tail * (static_cast<double>(i) + 2.0) <= 1e-15 * std::max(den, 1e-300)) break;
    }
    if (ratio == 0.0 && i >= 4096) break;
  }
  if (den <= 0.0) throw no_solution_error("mean_X: all lambda_i vanish");
  return num / den;
}

std::vector<double> tn_pmf(const AssemblySpec& spec, double x, std::size_t n) {
  // compound-Poisson recursion: s P(s) = sum_i i lambda_i P(s-i)
  std::vector<double> lam(n + 1, 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    lam[i] = lambda_i(spec, x, i);
    total += lam[i];
  }
  std::vector<double> p(n + 1, 0.0);
  p[0] = std::exp(-total);
  for (std::size_t s = 1; s <= n; ++s) {
    double acc = 0.0;
    for (std::size_t i = 1; i <= s; ++i) acc += static_cast<double>(i) * lam[i] * p[s - i];
    p[s] = acc / static_cast<double>(s);
  }
  return p;
}

std::vector<BigRat> tn_weights_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n) {
  std::vector<BigRat> lam(n + 1);
  for (std::size_t i = 1; i <= n; ++i) lam[i] = lambda_i_exact(spec, x, i);
  std::vector<BigRat> w(n + 1);
  w[0] = 1;
  for (std::size_t s = 1; s <= n; ++s) {
    BigRat acc = 0;
    for (std::size_t i = 1; i <= s; ++i) {
      acc += BigRat(static_cast<unsigned long>(i)) * lam[i] * w[s - i];
    }
    w[s] = acc / BigRat(static_cast<unsigned long>(s));
    w[s].canonicalize();
  }
  return w;
}

ConvolutionTable ysum_pmf(const AssemblySpec& spec, double x, std::size_t k, std::size_t n,
                          YSupport mode) {
  YDistribution y = y_pmf(spec, x, mode, n);
  ConvolutionTable t;
  t.k = k;
  t.n = n;
  t.rows.assign(k + 1, std::vector<double>(n + 1, 0.0));
  t.rows[0][0] = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t s = j; s <= n; ++s) {
      double acc = 0.0;
      std::size_t imax = std::min<std::size_t>(s - (j - 1), y.pmf.size());
      for (std::size_t i = 1; i <= imax; ++i) acc += y.pmf[i - 1] * t.rows[j - 1][s - i];
      t.rows[j][s] = acc;
    }
  }
  return t;
}

std::vector<std::vector<BigRat>> ysum_weights_exact(const AssemblySpec& spec, const BigRat& x,
                                                    std::size_t k, std::size_t n) {
  std::vector<BigRat> lam(n + 1);
  for (std::size_t i = 1; i <= n; ++i) lam[i] = lambda_i_exact(spec, x, i);
  std::vector<std::vector<BigRat>> u(k + 1, std::vector<BigRat>(n + 1, BigRat(0)));
  u[0][0] = 1;
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t s = j; s <= n; ++s) {
      BigRat acc = 0;
      for (std::size_t i = 1; i + (j - 1) <= s; ++i) acc += lam[i] * u[j - 1][s - i];
      acc.canonicalize();
      u[j][s] = acc;
    }
  }
  return u;
}

double xsum_log_point(const AssemblySpec& spec, double x, std::size_t k, std::uint64_t r) {
  if (!(x > 0.0)) throw std::invalid_argument("xsum_log_point: x > 0 required");
  if (spec.m(1) == 0) throw unsupported_error("xsum_log_point: m_1 = 0");
  double rho = spec.rho();
  if (rho > 0.0 && x * rho >= 1.0) throw divergence_error("xsum_log_point: x >= 1/rho");
  SeriesEval M = egf_M(spec, x);
  // P(X = s) = lambda_{s+1}/M = x^s c_s; with the x^s factored out the
  // truncated pgf stays in double range even at k ~ 1e4
  std::size_t R = static_cast<std::size_t>(r);
  std::vector<double> c(R + 1, 0.0);
  for (std::size_t s = 0; s <= R; ++s) {
    double lm = spec.log_m(s + 1);
    if (lm == -std::numeric_limits<double>::infinity()) continue;
    c[s] = std::exp(lm + std::log(x) - std::lgamma(static_cast<double>(s) + 2.0)) / M.value;
  }
  double c0 = c[0];
  if (c0 <= 0.0) throw unsupported_error("xsum_log_point: P(X=0) = 0");
  // normalize so the constant term is 1; restore k log c0 at the end
  std::vector<double> base(R + 1);
  for (std::size_t s = 0; s <= R; ++s) base[s] = c[s] / c0;
  auto mul = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(R + 1, 0.0);
    for (std::size_t i = 0; i <= R; ++i) {
      if (a[i] == 0.0) continue;
      for (std::size_t j = 0; i + j <= R; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  };
  std::vector<double> result(R + 1, 0.0);
  result[0] = 1.0;
  std::vector<double> power = base;
  std::size_t e = k;
  while (e > 0) {
    if (e & 1) result = mul(result, power);
    e >>= 1;
    if (e > 0) power = mul(power, power);
  }
  if (result[R] <= 0.0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(k) * std::log(c0) + static_cast<double>(r) * std::log(x) +
         std::log(result[R]);
}

double solve_x_T(const AssemblySpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("solve_x_T: n >= 1");
  auto mean_T = [&](double x) {
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) s += static_cast<double>(i) * lambda_i(spec, x, i);
    return s;
  };
  double lo = 0.0, hi = 1e-9;
  double target = static_cast<double>(n);
  int guard = 0;
  while (mean_T(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw no_solution_error("solve_x_T: target unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (mean_T(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_x_p1(const AssemblySpec& spec, std::size_t n, std::size_t k, XPolicy variant) {
  if (k > n) throw std::invalid_argument("solve_x_p1: k > n");
  std::uint64_t r = n - k;
  double m1 = to_double(BigRat(spec.m(1)));
  double m2 = to_double(BigRat(spec.m(2)));
  if (variant == XPolicy::ratio) {
    if (m2 <= 0.0) throw unsupported_error("solve_x_p1: m_2 = 0");
    if (n <= 2 * r) throw no_solution_error("solve_x_p1: needs n > 2r");
    return 2.0 * m1 * static_cast<double>(r) / (m2 * static_cast<double>(n - 2 * r));
  }
  // smallest positive root of k P(Y = 2) = r
  if (m2 <= 0.0) throw unsupported_error("solve_x_p1: m_2 = 0");
  if (r == 0) return 0.0;
  auto g = [&](double x) {
    double s = lambda_sum(spec, x, n);
    return static_cast<double>(k) * lambda_i(spec, x, 2) / s - static_cast<double>(r);
  };
  double lo = 1e-12, hi = 1e-12;
  if (g(lo) >= 0.0) return lo;
  int guard = 0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 120) throw no_solution_error("solve_x_p1: k P(Y=2) never reaches r");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double identity_check_pn(const AssemblySpec& spec, double x, std::size_t n) {
  double log_lhs = log_bigint(count_p(spec, n));
  std::vector<double> p = tn_pmf(spec, x, n);
  if (p[n] <= 0.0) return std::numeric_limits<double>::infinity();
  double log_rhs = std::lgamma(static_cast<double>(n) + 1.0) -
                   static_cast<double>(n) * std::log(x) + lambda_sum(spec, x, n) +
                   std::log(p[n]);
  return std::fabs(std::expm1(log_lhs - log_rhs));
}

BigRat identity_check_pn_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n) {
  if (x == 0) throw std::invalid_argument("identity_check_pn_exact: x != 0");
  BigInt pn = count_p(spec, n);
  std::vector<BigRat> w = tn_weights_exact(spec, x, n);
  if (w[n] == 0) throw no_solution_error("identity_check_pn_exact: W(n) = 0");
  BigInt nf;
  mpz_fac_ui(nf.get_mpz_t(), static_cast<unsigned long>(n));
  BigRat xn = 1;
  for (std::size_t i = 0; i < n; ++i) xn *= x;
  // p(n) x^n / (n! W(n)) - 1, identically zero when the identity holds
  BigRat ratio = BigRat(pn) * xn / (BigRat(nf) * w[n]);
  ratio.canonicalize();
  ratio -= 1;
  ratio.canonicalize();
  return ratio;
}

double identity_check_pnk(const AssemblySpec& spec, double x, std::size_t n, std::size_t k,
                          YSupport mode) {
  double log_lhs = log_bigint(count_pnk(spec, n, k));
  ConvolutionTable t = ysum_pmf(spec, x, k, n, mode);
  if (t.p_target() <= 0.0) return std::numeric_limits<double>::infinity();
  double log_mass;
  if (mode == YSupport::finite) {
    log_mass = std::log(lambda_sum(spec, x, n));
  } else {
    log_mass = std::log(egf_M(spec, x).value);
  }
  double log_rhs = std::lgamma(static_cast<double>(n) + 1.0) -
                   std::lgamma(static_cast<double>(k) + 1.0) +
                   static_cast<double>(k) * log_mass - static_cast<double>(n) * std::log(x) +
                   std::log(t.p_target());
  return std::fabs(std::expm1(log_lhs - log_rhs));
}

BigRat identity_check_pnk_exact(const AssemblySpec& spec, const BigRat& x, std::size_t n,
                                std::size_t k) {
  if (x == 0) throw std::invalid_argument("identity_check_pnk_exact: x != 0");
  BigInt pnk = count_pnk(spec, n, k);
  auto u = ysum_weights_exact(spec, x, k, n);
  if (u[k][n] == 0) throw no_solution_error("identity_check_pnk_exact: U_k(n) = 0");
  BigInt nf, kf;
  mpz_fac_ui(nf.get_mpz_t(), static_cast<unsigned long>(n));
  mpz_fac_ui(kf.get_mpz_t(), static_cast<unsigned long>(k));
  BigRat xn = 1;
  for (std::size_t i = 0; i < n; ++i) xn *= x;
  BigRat ratio = BigRat(pnk) * BigRat(kf) * xn / (BigRat(nf) * u[k][n]);
  ratio.canonicalize();
  ratio -= 1;
  ratio.canonicalize();
  return ratio;
}

TiltedMarginal theta_x_marginal(StructureClass cls, const BigInt& m_i, double theta, double x,
                                std::size_t i) {
  if (!(theta > 0.0) || !(x > 0.0))
    throw std::invalid_argument("theta_x_marginal: theta, x > 0 required");
  TiltedMarginal out;
  double log_mi = log_bigint(m_i);
  double xi = static_cast<double>(i) * std::log(x);
  switch (cls) {
    case StructureClass::assembly: {
      out.kind = TiltedMarginal::Kind::poisson;
      out.poisson_mean =
          m_i == 0 ? 0.0
                   : theta * std::exp(log_mi + xi - std::lgamma(static_cast<double>(i) + 1.0));
      out.mean = out.poisson_mean;
      return out;
    }
    case StructureClass::multiset: {
      double q = theta * std::exp(xi);
      if (q >= 1.0) throw divergence_error("theta_x_marginal: theta x^i >= 1");
      out.kind = TiltedMarginal::Kind::negative_binomial;
      out.trials = m_i;
      out.success = q;
      out.mean = m_i == 0 ? 0.0 : std::exp(log_mi) * q / (1.0 - q);
      return out;
    }
    case StructureClass::selection: {
      double q = theta * std::exp(xi);
      double p = q / (1.0 + q);
      out.kind = TiltedMarginal::Kind::binomial;
      out.trials = m_i;
      out.success = p;
      out.mean = m_i == 0 ? 0.0 : std::exp(log_mi) * p;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

ThetaX solve_theta_x(const AssemblySpec& spec, std::size_t n, std::size_t k) {
  if (k == 0 || k > n) throw std::invalid_argument("solve_theta_x: 1 <= k <= n");
  if (k == n) throw no_solution_error("solve_theta_x: k = n needs x -> 0");
  // mean component size sum(i lambda_i)/sum(lambda_i) must equal n/k;
  // theta then scales the total mass to k
  double target = static_cast<double>(n) / static_cast<double>(k);
  auto mean_size = [&](double x) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      double li = lambda_i(spec, x, i);
      num += static_cast<double>(i) * li;
      den += li;
    }
    if (den <= 0.0) throw no_solution_error("solve_theta_x: all lambda_i vanish");
    return num / den;
  };
  double lo = 0.0, hi = 1e-9;
  int guard = 0;
  while (mean_size(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw no_solution_error("solve_theta_x: mean size target unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (mean_size(mid) < target ? lo : hi) = mid;
  }
  ThetaX out;
  out.x = 0.5 * (lo + hi);
  out.theta = static_cast<double>(k) / lambda_sum(spec, out.x, n);
  return out;
}

}  // namespace assemblies
