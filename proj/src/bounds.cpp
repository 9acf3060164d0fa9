#include "assemblies/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "assemblies/exact.hpp"
#include "json.hpp"

namespace assemblies {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double md(const AssemblySpec& spec, std::size_t i) { return to_double(BigRat(spec.m(i))); }

void require_m123(const AssemblySpec& spec) {
  if (spec.m(1) == 0 || spec.m(2) == 0 || spec.m(3) == 0)
    throw unsupported_error("requires m_1, m_2, m_3 > 0");
}

nlohmann::json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

double lambda_limit(const AssemblySpec& spec, double t) {
  require_m123(spec);
  double m1 = md(spec, 1), m2 = md(spec, 2), m3 = md(spec, 3);
  return 2.0 * m1 * m3 * t * t / (3.0 * m2 * m2);
}

double lambda_limit_ell(const AssemblySpec& spec, double t, std::size_t ell) {
  if (ell < 1) throw std::invalid_argument("lambda_limit_ell: ell >= 1");
  if (spec.m(1) == 0 || spec.m(2) == 0 || spec.m(ell + 2) == 0)
    throw unsupported_error("lambda_limit_ell: requires m_1, m_2, m_{ell+2} > 0");
  double m1 = md(spec, 1), m2 = md(spec, 2);
  double ml2 = to_double(BigRat(spec.m(ell + 2)));
  double le = static_cast<double>(ell);
  return std::exp((le + 1.0) * std::log(2.0) + le * std::log(m1) + std::log(ml2) +
                  (le + 1.0) * std::log(t) - std::lgamma(le + 3.0) -
                  (le + 1.0) * std::log(m2));
}

double asymptotic_log_pnk(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  require_m123(spec);
  double m1 = md(spec, 1), m2 = md(spec, 2), m3 = md(spec, 3);
  double rd = static_cast<double>(r), nd = static_cast<double>(n);
  double t2 = rd * rd / nd;
  double out = 2.0 * rd * std::log(nd) + (nd - 2.0 * rd) * std::log(m1) + rd * std::log(m2) -
               std::lgamma(rd + 1.0) - rd * std::log(2.0);
  out -= t2 * (2.0 - 2.0 * m1 * m3 / (3.0 * m2 * m2));
  return out;
}

Lemma23Bound lemma23_bound(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  if (spec.m(1) == 0 || spec.m(2) == 0)
    throw unsupported_error("lemma23_bound: requires m_1, m_2 > 0");
  if (r == 0 || 2 * r >= n) throw std::invalid_argument("lemma23_bound: needs 0 < r < n/2");
  double m1 = md(spec, 1), m2 = md(spec, 2), m3 = md(spec, 3);
  double rd = static_cast<double>(r);
  double y = 2.0 * m1 * m3 * rd * rd / (3.0 * m2 * m2 * static_cast<double>(n - 2 * r));
  return {y, std::expm1(y)};
}

Lemma24Bound lemma24_bound(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  if (spec.m(1) == 0 || spec.m(2) == 0)
    throw unsupported_error("lemma24_bound: requires m_1, m_2 > 0");
  if (!spec.radius_positive())
    throw unsupported_error("lemma24_bound: radius of convergence is zero");
  if (2 * r >= n) throw std::invalid_argument("lemma24_bound: needs n > 2r");
  Lemma24Bound out;
  double m1 = md(spec, 1), m2 = md(spec, 2);
  double rd = static_cast<double>(r);
  double kd = static_cast<double>(n - r);
  out.x = 2.0 * m1 * rd / (m2 * static_cast<double>(n - 2 * r));
  out.rho = spec.rho();
  out.hyp_24 = out.x * out.rho <= 0.5;
  out.hyp_needed = 2.0 * kd * out.rho * out.rho * out.rho * out.x * out.x / m1 <= 0.5;
  if (out.hyp_24 && out.hyp_needed && r > 0) {
    double root = std::sqrt(2.0 * M_PI * rd);
    out.u4 = kd * (2.0 * std::pow(out.rho, 4.0) * std::pow(out.x, 3.0) / m1) * 2.0 * kC0 * root;
    out.xsum_lower = 1.0 / (2.0 * kC0 * root);
  } else if (out.hyp_24 && out.hyp_needed && r == 0) {
    out.u4 = 0.0;
  }
  return out;
}

Thm15Sandwich thm15_sandwich(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  Lemma23Bound l23 = lemma23_bound(spec, n, r);
  Lemma24Bound l24 = lemma24_bound(spec, n, r);
  Thm15Sandwich out;
  out.effective = false;
  out.z = kInf;
  if (!l24.hyp_24 || !l24.hyp_needed || !l24.u4) return out;
  out.z = l23.bound + *l24.u4;
  if (out.z >= 1.0) return out;
  out.effective = true;
  // lower is the exact count of rank-r structures with all components of
  // size <= 2
  Copartition ones;
  ones.parts.assign(static_cast<std::size_t>(r), 1);
  out.log_lower = log_count_N(spec, n, ones);
  out.log_upper = *out.log_lower + std::log1p(out.z / (1.0 - out.z));
  return out;
}

FellerBounds feller_bounds(std::uint64_t k, std::uint64_t n, double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("feller_bounds: 0 < p < 1");
  if (k > n) throw std::invalid_argument("feller_bounds: k <= n");
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  double lambda = nd * p;
  double log_pois = (k == 0 ? 0.0 : kd * std::log(lambda)) - lambda - std::lgamma(kd + 1.0);
  FellerBounds out;
  out.upper = std::exp(log_pois + kd * lambda / nd);
  out.lower_degenerate = (k == n);
  if (out.lower_degenerate) {
    out.lower = 0.0;
  } else {
    out.lower = std::exp(log_pois - kd * kd / (nd - kd) - lambda * lambda / (nd - lambda));
  }
  return out;
}

namespace {

// log of sqrt(2 pi p q n) b(k;n,p) up to Stirling correction terms:
// exact except for the 1/(12.) factorial remainders
double stirling_core(double h, double n, double p) {
  double q = 1.0 - p;
  double pn = p * n, qn = q * n;
  double u = h / pn, v = h / qn;
  return -(pn + h) * std::log1p(u) - (qn - h) * std::log1p(-v) - 0.5 * std::log1p(u) -
         0.5 * std::log1p(-v);
}

}  // namespace

double binomial_f(double h, double n, double p) {
  return stirling_core(h, n, p) + 1.0 / (12.0 * n);
}

double binomial_g(double h, double n, double p) { return stirling_core(h, n, p); }

BinomialPointBounds binomial_point_bounds(std::uint64_t k, std::uint64_t n, double p) {
  BinomialPointBounds out{};
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  out.valid = p > 0.0 && p < 1.0 && p * nd >= 1.0 && k > 0 && k < n;
  out.h = kd - p * nd;
  if (!out.valid) return out;
  out.beta = 1.0 / (12.0 * kd) + 1.0 / (12.0 * (nd - kd));
  out.f = binomial_f(out.h, nd, p);
  out.g = binomial_g(out.h, nd, p);
  out.upper = std::exp(out.f);
  out.lower = std::exp(-out.beta + out.g);
  return out;
}

namespace {

struct SdPoint {
  double x, b0, b1, b2, mu_term;
  bool n3_lemma_ok, n3_proof_ok;
};

SdPoint sd_point(const AssemblySpec& spec, std::size_t n, std::size_t k) {
  double m1 = md(spec, 1), m2 = md(spec, 2);
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  SdPoint pt{};
  pt.x = 2.0 * m1 * (nd - kd) / (m2 * kd);
  pt.b0 = m1 * pt.x;
  pt.b1 = m2 * pt.x * pt.x / 2.0;
  pt.b2 = md(spec, 3) * pt.x * pt.x * pt.x / 6.0;
  pt.mu_term = pt.b0 + pt.b1 > 0.0 ? kd * pt.b1 / (pt.b0 + pt.b1) : 0.0;
  double rho = spec.rho();
  double lhs = nd * std::pow(nd - kd, 3.0) / (kd * kd);
  double scale = m1 / (2.0 * std::pow(rho, 4.0));
  double rhs_lemma = scale * std::pow(2.0 * m1 / m2, 3.0);
  double rhs_proof = scale * std::pow(m2 / (2.0 * m1), 3.0);
  bool hyp_x = pt.x * rho <= 0.5;
  pt.n3_lemma_ok = hyp_x && lhs <= rhs_lemma;
  pt.n3_proof_ok = hyp_x && lhs <= rhs_proof;
  return pt;
}

}  // namespace

DeviationThresholds deviation_thresholds(
    const AssemblySpec& spec, const std::vector<std::pair<std::size_t, std::size_t>>& family) {
  if (spec.m(1) == 0 || spec.m(2) == 0)
    throw unsupported_error("deviation_thresholds: requires m_1, m_2 > 0");
  if (family.empty()) throw std::invalid_argument("deviation_thresholds: empty family");
  DeviationThresholds out{};
  out.mu = 0.0;
  // smallest family n from which the tail condition holds at every
  // larger family point
  auto sorted = family;
  std::sort(sorted.begin(), sorted.end());
  // scan from the largest n down: the threshold is the smallest family n
  // from which the condition holds at every larger family point
  double n3_lemma = kInf, n3_proof = kInf;
  bool lemma_run = true, proof_run = true;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    SdPoint pt = sd_point(spec, it->first, it->second);
    out.mu = std::max(out.mu, pt.mu_term);
    double nd = static_cast<double>(it->first);
    if (lemma_run && pt.n3_lemma_ok) n3_lemma = nd; else lemma_run = false;
    if (proof_run && pt.n3_proof_ok) n3_proof = nd; else proof_run = false;
  }
  out.log_n0 = out.mu * std::exp(2.0);
  out.n3_lemma = n3_lemma;
  out.n3_proof = n3_proof;
  out.n3_conservative = std::max(n3_lemma, n3_proof);
  return out;
}

DeviationThresholds deviation_thresholds(const AssemblySpec& spec, std::size_t n, std::size_t k) {
  return deviation_thresholds(spec, std::vector<std::pair<std::size_t, std::size_t>>{{n, k}});
}

namespace {

// legacy f and g forms kept verbatim for the sd report diagnostics
double sd_f(double h, double n, double p) {
  double q = 1.0 - p;
  return -h / (2.0 * p * n) + h / (2.0 * q * n) - h * h / (p * n) - h * h / (q * n);
}

double sd_g(double h, double n, double p) {
  double pn = p * n;
  double den = pn - h;
  return h * pn / den + h * h / den + h / (2.0 * den);
}

}  // namespace

SdReport sd_bounds(const AssemblySpec& spec, std::size_t n, std::size_t k, std::uint64_t m) {
  require_m123(spec);
  if (!spec.radius_positive())
    throw unsupported_error("sd_bounds: radius of convergence is zero");
  if (k == 0 || k > n) throw std::invalid_argument("sd_bounds: 1 <= k <= n");
  SdReport rep;
  rep.n = n;
  rep.k = k;
  rep.m = m;
  std::uint64_t r = n - k;
  double nd = static_cast<double>(n), kd = static_cast<double>(k);
  double rd = static_cast<double>(r), m_d = static_cast<double>(m);
  SdPoint pt = sd_point(spec, n, k);
  rep.x = pt.x;
  rep.b0 = pt.b0;
  rep.b1 = pt.b1;
  rep.b2 = pt.b2;
  double m1 = md(spec, 1), m3 = md(spec, 3);
  rep.lambda = m3 / (6.0 * m1) * rep.x * rep.x;
  rep.p = pt.b0 + pt.b1 > 0.0 ? pt.b1 / (pt.b0 + pt.b1) : 0.0;

  DeviationThresholds th = deviation_thresholds(spec, n, k);
  rep.log_n0 = th.log_n0;
  rep.n3 = th.n3_conservative;

  // diagnostics are reported regardless of effectivity
  double log_lam = rep.lambda > 0.0 ? std::log(rep.lambda) : -kInf;
  rep.log_poisson_factor_at_k =
      (k == 0 ? 0.0 : kd * log_lam) - rep.lambda - std::lgamma(kd + 1.0);
  rep.log_poisson_factor_at_m =
      (m == 0 ? 0.0 : m_d * log_lam) - rep.lambda - std::lgamma(m_d + 1.0);
  rep.poisson_index_warning =
      k != m &&
      std::fabs(rep.log_poisson_factor_at_k - rep.log_poisson_factor_at_m) > 1e-9;

  bool guards = r > 0 && k > r && rep.p > 0.0 && rep.p < 1.0 && nd > rep.lambda;
  rep.effective = guards && std::log(nd) >= th.log_n0 && nd >= th.n3_conservative;
  if (!rep.effective) return rep;

  rep.beta = 1.0 / (12.0 * rd) + 1.0 / (12.0 * (kd - rd));
  double ln_n = std::log(nd);
  double log_frac = std::log(nd - 1.0) - std::log(nd);
  double log_pois = rep.log_poisson_factor_at_k;

  double h_low = 2.0 * m_d + ln_n;
  if (rep.p * kd - h_low > 0.0) {
    rep.log_d3_lower = log_pois - kd * kd / (nd - kd) -
                       rep.lambda * rep.lambda / (nd - rep.lambda) + log_frac - rep.beta +
                       sd_g(h_low, kd, rep.p) - sd_f(h_low, kd, rep.p);
  }
  double k_up = kd - ln_n;
  if (k_up > 0.0 && rep.p * k_up - ln_n > 0.0 && r > 0) {
    double root = std::sqrt(2.0 * M_PI * rd);
    double num = 1.0 / nd + std::exp(sd_f(ln_n, k_up, rep.p)) / root;
    double den_log = log_frac - std::log(root) - rep.beta + sd_g(ln_n, k_up, rep.p);
    rep.log_d3_upper = log_pois + rep.lambda * m_d / kd + std::log(num) - den_log;
  }
  if (rep.p * kd - ln_n > 0.0) {
    rep.log_l1eq2_upper =
        -rep.lambda + sd_f(0.0, kd, rep.p) - log_frac + rep.beta - sd_g(ln_n, kd, rep.p);
    double correction = 1.0 - 1.0 / (nd * (1.0 - rep.b2 / (m1 * rep.x)));
    if (correction > 0.0) {
      rep.log_l1eq2_lower = -rep.lambda - rep.lambda * rep.lambda / (nd - rep.lambda) -
                            rep.beta + sd_g(0.0, kd, rep.p) - log_frac -
                            sd_f(ln_n, kd, rep.p) + std::log(correction);
    }
  }
  return rep;
}

TypeRatios type_ratios(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  if (r < 4) throw std::invalid_argument("type_ratios: r >= 4");
  if (n <= 2 * r) throw std::invalid_argument("type_ratios: n > 2r");
  double m1 = md(spec, 1), m2 = md(spec, 2), m3 = md(spec, 3), m4 = md(spec, 4);
  double rd = static_cast<double>(r), nd = static_cast<double>(n);
  double d1 = nd - 2.0 * rd + 1.0;
  double d2 = nd - 2.0 * rd + 2.0;
  TypeRatios out;
  out.r1 = m1 * rd * (rd - 1.0) * 4.0 * m3 / (d1 * m2 * m2 * 6.0);
  // includes the a_3! = 2! symmetry factor so the ratio matches the
  // exact count quotient
  out.r2 = m1 * m1 * rd * (rd - 1.0) * (rd - 2.0) * (rd - 3.0) * 16.0 * m3 * m3 /
           (d1 * d2 * 36.0 * 2.0 * std::pow(m2, 4.0));
  out.r3 = m1 * m1 * rd * (rd - 1.0) * (rd - 2.0) * 8.0 * m4 /
           (d1 * d2 * std::pow(m2, 3.0) * 24.0);
  out.r1_proxy = 2.0 * m1 * m3 / (3.0 * m2 * m2) * rd * rd / nd;
  return out;
}

double conjecture_C(const AssemblySpec& spec, double t) {
  double lam = lambda_limit(spec, t);
  double m4 = md(spec, 4);
  return (2.0 * lam * lam + lam) - 2.0 * t * t * lam - t * t * (m4 / 4.0) * lam;
}

RegimeDescriptor thm2_classify(const AssemblySpec& spec, std::size_t n, std::uint64_t r) {
  if (spec.m(1) == 0 || spec.m(2) == 0)
    throw unsupported_error("thm2_classify: requires m_1, m_2 > 0");
  RegimeDescriptor out;
  double nd = static_cast<double>(n), rd = static_cast<double>(r);
  if (r == 0) {
    out.alpha_hat = 0.0;
    out.ell = 1;
    out.boundary = false;
    out.t = 0.0;
    out.l1_support = {1};
    out.di_magnitude = {static_cast<double>(n)};
    return out;
  }
  out.alpha_hat = std::log(rd) / std::log(nd);
  constexpr double kBoundaryTol = 0.02;
  std::size_t ell = 1;
  if (out.alpha_hat >= 0.5) {
    while (out.alpha_hat >= static_cast<double>(ell + 1) / static_cast<double>(ell + 2)) ++ell;
  }
  auto edge_of = [](std::size_t l) {
    return static_cast<double>(l) / static_cast<double>(l + 1);
  };
  // boundary scales r ~ t n^{l/(l+1)}: snap to whichever edge of the
  // bracket alpha sits next to
  if (std::fabs(out.alpha_hat - edge_of(ell + 1)) <= kBoundaryTol) {
    ++ell;
    out.boundary = true;
  } else {
    out.boundary = std::fabs(out.alpha_hat - edge_of(ell)) <= kBoundaryTol;
  }
  out.ell = ell;
  double edge = edge_of(ell);
  out.t = rd / std::pow(nd, edge);
  if (out.boundary) {
    if (spec.m(ell + 2) > 0) out.lambda = lambda_limit_ell(spec, out.t, ell);
    out.l1_support = {ell + 1, ell + 2};
  } else if (out.alpha_hat < 0.5) {
    out.l1_support = {2};
  } else {
    out.l1_support = {ell + 2};
  }
  std::size_t k = n - static_cast<std::size_t>(r);
  double m1 = md(spec, 1), m2 = md(spec, 2);
  double x = 2.0 * m1 * rd / (m2 * static_cast<double>(k));
  out.di_magnitude.resize(ell + 2);
  for (std::size_t i = 1; i <= ell + 2; ++i) {
    double mi = to_double(BigRat(spec.m(i)));
    out.di_magnitude[i - 1] = static_cast<double>(k) * mi *
                              std::pow(x, static_cast<double>(i) - 1.0) /
                              (m1 * std::exp(std::lgamma(static_cast<double>(i) + 1.0)));
  }
  return out;
}

std::string BoundsReport::to_json(int indent) const {
  nlohmann::json j;
  j["assembly"] = assembly;
  j["n"] = n;
  j["k"] = k;
  j["r"] = r;
  j["x"] = x;
  j["rho"] = rho;
  j["hyp_24"] = hyp_24;
  j["hyp_needed"] = hyp_needed;
  j["c0"] = c0;
  j["y"] = y;
  j["l1_eq3_bound"] = l1_eq3_bound;
  j["u4"] = opt_json(u4);
  j["xsum_lower"] = opt_json(xsum_lower);
  j["z"] = opt_json(z);
  j["log_pnk_lower"] = opt_json(log_pnk_lower);
  j["log_pnk_upper"] = opt_json(log_pnk_upper);
  return j.dump(indent);
}

std::string SdReport::to_json(int indent) const {
  nlohmann::json j;
  j["n"] = n;
  j["k"] = k;
  j["m"] = m;
  j["x"] = x;
  j["b0"] = b0;
  j["b1"] = b1;
  j["b2"] = b2;
  j["lambda"] = lambda;
  j["p"] = p;
  j["beta"] = beta;
  j["log_n0"] = log_n0;
  j["n3"] = std::isfinite(n3) ? nlohmann::json(n3) : nlohmann::json(nullptr);
  j["effective"] = effective;
  j["log_d3_lower"] = opt_json(log_d3_lower);
  j["log_d3_upper"] = opt_json(log_d3_upper);
  j["log_l1eq2_lower"] = opt_json(log_l1eq2_lower);
  j["log_l1eq2_upper"] = opt_json(log_l1eq2_upper);
  j["log_poisson_factor_at_k"] = log_poisson_factor_at_k;
  j["log_poisson_factor_at_m"] = log_poisson_factor_at_m;
  j["poisson_index_warning"] = poisson_index_warning;
  return j.dump(indent);
}

}  // namespace assemblies
