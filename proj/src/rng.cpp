#include "assemblies/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace assemblies {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

Rng Rng::worker_stream(std::uint64_t seed, std::uint64_t worker) {
  std::uint64_t sm = seed;
  std::uint64_t mixed = splitmix64(sm) ^ (0xd1b54a32d192ed03ULL * (worker + 1));
  return Rng(mixed);
}

std::uint64_t Rng::next_u64() {
  std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("poisson: bad mean");
  if (lambda == 0.0) return 0;
  if (lambda > 30.0) {
    // split so the inversion product never underflows; draw order is
    // fixed, so this stays reproducible
    double half = lambda / 2.0;
    std::uint64_t a = poisson(half);
    return a + poisson(lambda - half);
  }
  double u = uniform();
  double p = std::exp(-lambda);
  double cum = p;
  std::uint64_t j = 0;
  while (u >= cum && j < 10000) {
    ++j;
    p *= lambda / static_cast<double>(j);
    cum += p;
  }
  return j;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t m = weights.size();
  if (m == 0) throw std::invalid_argument("alias table: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("alias table: bad weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("alias table: zero total weight");

  prob_.assign(m, 0.0);
  alias_.assign(m, 0);
  std::vector<double> scaled(m);
  for (std::size_t i = 0; i < m; ++i) scaled[i] = weights[i] * static_cast<double>(m) / total;

  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < m; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) prob_[i] = 1.0;
  for (std::uint32_t i : small) prob_[i] = 1.0;
}

std::size_t AliasTable::sample(Rng& rng) const {
  const std::size_t m = prob_.size();
  std::uint64_t bits = rng.next_u64();
  std::size_t slot = static_cast<std::size_t>(bits % m);
  double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return u < prob_[slot] ? slot : alias_[slot];
}

}  // namespace assemblies
