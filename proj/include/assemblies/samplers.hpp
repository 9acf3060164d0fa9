#ifndef ASSEMBLIES_SAMPLERS_HPP
#define ASSEMBLIES_SAMPLERS_HPP

#include <cstdint>
#include <vector>

#include "assemblies/exact.hpp"
#include "assemblies/rng.hpp"
#include "assemblies/spec.hpp"
#include "assemblies/tilted.hpp"

namespace assemblies {

struct SamplerConfig {
  const AssemblySpec* spec = nullptr;
  double x = 0.0;
  double theta = 1.0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_trials = 0;  // 0 = auto (ceil(50 / acceptance estimate))
  YSupport mode = YSupport::finite;
};

struct SampleReport {
  bool accepted = false;
  std::uint64_t trials_used = 0;
  std::vector<std::uint64_t> counts;  // counts[i-1] = number of components of size i
  Copartition copart;                 // set on acceptance
};

struct KSample {
  std::vector<std::uint32_t> y;       // the k draws
  std::vector<std::uint64_t> counts;  // counts[i-1] = #{j : Y_j = i}
  std::uint64_t total = 0;            // sum of the draws
};

// Free Boltzmann process: independent Z_i ~ Poisson(theta * lambda_i(x)).
std::vector<std::uint64_t> sample_boltzmann(const SamplerConfig& cfg, Rng& rng);

// k-Boltzmann sampler, version 1: i.i.d. component sizes Y_1..Y_k.
// A prebuilt alias table for the Y pmf; reuse across draws.
class YSampler {
 public:
  YSampler(const AssemblySpec& spec, double x, YSupport mode, std::size_t n);
  std::uint32_t draw(Rng& rng) const;
  const YDistribution& dist() const { return dist_; }

 private:
  YDistribution dist_;
  AliasTable alias_;
};

KSample sample_k_v1(const SamplerConfig& cfg, const YSampler& ys, Rng& rng);

// k-Boltzmann sampler, version 2: the (theta, x)-tilted free process.
std::vector<std::uint64_t> sample_k_v2(const SamplerConfig& cfg, Rng& rng);

// Hard rejection on sum Y = n: exact draw from D(n,k).
SampleReport sample_exact_dnk(const SamplerConfig& cfg, const YSampler& ys, Rng& rng);
// Hard rejection on T_n = n: exact draw from C(n).
SampleReport sample_exact_cn(const SamplerConfig& cfg, Rng& rng);

// Default trial budget: ~50 expected acceptances' worth of proposals.
std::uint64_t default_max_trials(double acceptance_estimate);

}  // namespace assemblies

#endif
