#ifndef ASSEMBLIES_RNG_HPP
#define ASSEMBLIES_RNG_HPP

#include <cstdint>
#include <vector>

namespace assemblies {

// xoshiro256** seeded through splitmix64.  We roll our own generator and
// discrete samplers because std:: distributions are not bit-reproducible
// across standard library implementations; given the same seed and
// IEEE-754 doubles, every platform draws the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream for a parallel worker.  Streams derived from the
  // same (seed, worker) pair are identical; distinct workers decorrelate
  // through the splitmix64 avalanche.
  static Rng worker_stream(std::uint64_t seed, std::uint64_t worker);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Poisson draw by inversion; large means are split recursively so the
  // running product never underflows.
  std::uint64_t poisson(double lambda);

 private:
  std::uint64_t s_[4];
};

// Walker alias table over {0, ..., m-1}; construction is deterministic
// given the weights.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace assemblies

#endif
