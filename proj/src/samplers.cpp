#include "assemblies/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace assemblies {

std::uint64_t default_max_trials(double acceptance_estimate) {
  if (!(acceptance_estimate > 0.0)) return 10000000;
  double budget = std::ceil(50.0 / acceptance_estimate);
  if (budget < 1000.0) return 1000;
  if (budget > 1e9) return 1000000000;
  return static_cast<std::uint64_t>(budget);
}

std::vector<std::uint64_t> sample_boltzmann(const SamplerConfig& cfg, Rng& rng) {
  if (cfg.spec == nullptr || cfg.n == 0)
    throw std::invalid_argument("sample_boltzmann: spec and n required");
  std::vector<std::uint64_t> counts(cfg.n, 0);
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    double mean = cfg.theta * lambda_i(*cfg.spec, cfg.x, i);
    counts[i - 1] = mean > 0.0 ? rng.poisson(mean) : 0;
  }
  return counts;
}

YSampler::YSampler(const AssemblySpec& spec, double x, YSupport mode, std::size_t n)
    : dist_(y_pmf(spec, x, mode, n)), alias_(dist_.pmf) {}

std::uint32_t YSampler::draw(Rng& rng) const {
  return static_cast<std::uint32_t>(alias_.sample(rng)) + 1;
}

KSample sample_k_v1(const SamplerConfig& cfg, const YSampler& ys, Rng& rng) {
  KSample s;
  s.y.resize(cfg.k);
  s.counts.assign(ys.dist().pmf.size(), 0);
  for (std::size_t j = 0; j < cfg.k; ++j) {
    std::uint32_t v = ys.draw(rng);
    s.y[j] = v;
    s.counts[v - 1] += 1;
    s.total += v;
  }
  return s;
}

std::vector<std::uint64_t> sample_k_v2(const SamplerConfig& cfg, Rng& rng) {
  return sample_boltzmann(cfg, rng);
}

namespace {

// local-CLT guess at the point probability of hitting the target sum,
// used only to size the default trial budget
double acceptance_guess(const std::vector<double>& pmf, std::size_t k) {
  double mean = 0.0, mom2 = 0.0;
  for (std::size_t i = 1; i <= pmf.size(); ++i) {
    mean += static_cast<double>(i) * pmf[i - 1];
    mom2 += static_cast<double>(i) * static_cast<double>(i) * pmf[i - 1];
  }
  double var = std::max(mom2 - mean * mean, 1e-12);
  return 1.0 / std::sqrt(2.0 * M_PI * static_cast<double>(k) * var);
}

}  // namespace

SampleReport sample_exact_dnk(const SamplerConfig& cfg, const YSampler& ys, Rng& rng) {
  SampleReport rep;
  std::uint64_t budget = cfg.max_trials != 0
                             ? cfg.max_trials
                             : default_max_trials(acceptance_guess(ys.dist().pmf, cfg.k));
  for (std::uint64_t t = 1; t <= budget; ++t) {
    KSample s = sample_k_v1(cfg, ys, rng);
    rep.trials_used = t;
    if (s.total == cfg.n) {
      rep.accepted = true;
      rep.counts = std::move(s.counts);
      rep.copart = copartition(PartitionType::from_counts(rep.counts));
      return rep;
    }
  }
  return rep;
}

SampleReport sample_exact_cn(const SamplerConfig& cfg, Rng& rng) {
  SampleReport rep;
  std::uint64_t budget = cfg.max_trials;
  if (budget == 0) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 1; i <= cfg.n; ++i) {
      double li = cfg.theta * lambda_i(*cfg.spec, cfg.x, i);
      mean += static_cast<double>(i) * li;
      var += static_cast<double>(i) * static_cast<double>(i) * li;
    }
    double guess = var > 0.0 ? std::exp(-0.5 * (static_cast<double>(cfg.n) - mean) *
                                        (static_cast<double>(cfg.n) - mean) / var) /
                                   std::sqrt(2.0 * M_PI * var)
                             : 0.0;
    budget = default_max_trials(guess);
  }
  for (std::uint64_t t = 1; t <= budget; ++t) {
    std::vector<std::uint64_t> z = sample_boltzmann(cfg, rng);
    rep.trials_used = t;
    std::uint64_t total = 0;
    for (std::size_t i = 1; i <= z.size(); ++i) total += i * z[i - 1];
    if (total == cfg.n) {
      rep.accepted = true;
      rep.counts = std::move(z);
      rep.copart = copartition(PartitionType::from_counts(rep.counts));
      return rep;
    }
  }
  return rep;
}

}  // namespace assemblies
