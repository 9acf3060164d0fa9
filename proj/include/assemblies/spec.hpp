#ifndef ASSEMBLIES_SPEC_HPP
#define ASSEMBLIES_SPEC_HPP

#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "assemblies/common.hpp"

namespace assemblies {

// Truncated evaluation of a power series together with a bound on the
// discarded tail.
struct SeriesEval {
  double value = 0.0;
  std::size_t truncation_index = 0;
  double tail_bound = 0.0;
};

// An assembly is specified by the component-decoration counts m_1, m_2, ...
// wrapped in the exponential generating function M(z) = sum m_i z^i / i!.
//
// Immutable after construction except for the memo cache of m-values,
// which is guarded for concurrent readers.
class AssemblySpec {
 public:
  enum class Rule { set_partitions, permutations, mappings, simple_graphs, custom_list };

  static AssemblySpec set_partitions();
  static AssemblySpec permutations();
  static AssemblySpec mappings();
  static AssemblySpec simple_graphs();
  static AssemblySpec custom(std::string name, std::vector<BigInt> m, bool radius_positive = true);

  // Built-in by CLI identifier ("set-partitions", "permutations",
  // "mappings", "graphs").  Throws std::invalid_argument otherwise.
  static AssemblySpec builtin(const std::string& id);

  // Parses the custom assembly JSON file:
  //   {"name": str, "m": [ints] | {"rule": str}, "radius_positive": bool}
  static AssemblySpec from_json_file(const std::string& path);
  static AssemblySpec from_json_text(const std::string& text);

  const std::string& name() const { return name_; }
  Rule rule() const { return rule_; }
  bool radius_positive() const { return radius_positive_; }

  // m_i for i >= 1, memoized.
  BigInt m(std::size_t i) const;
  // log m_i; -inf when m_i = 0.
  double log_m(std::size_t i) const;
  bool m_positive(std::size_t i) const { return m(i) > 0; }

  // rho = sup_{i>=3} (m_i / i!)^{1/i}.  Analytic for the built-ins, a
  // finite max for custom lists.  Throws unsupported_error when the
  // radius of convergence is zero.
  double rho(std::size_t probe_limit = 64) const;

 private:
  AssemblySpec(std::string name, Rule rule, bool radius_positive, std::vector<BigInt> custom);

  void extend_cache(std::size_t i) const;

  std::string name_;
  Rule rule_;
  bool radius_positive_;
  std::vector<BigInt> custom_m_;  // rule == custom_list; zero beyond the list

  // cache_[i-1] = m_i
  mutable std::vector<BigInt> cache_;
  mutable std::vector<double> log_cache_;
  mutable std::shared_ptr<std::mutex> cache_mutex_;
};

// Inverts P(z) = exp(M(z)) through order N: given p(0..N) with p(0)=1,
// returns (m_1, ..., m_N) via the formal-series logarithm in exact
// rational arithmetic.  Throws std::invalid_argument on p(0) != 1 or a
// non-integer coefficient.
std::vector<BigInt> m_from_p(const std::vector<BigInt>& p_values);

// M(x) = sum m_i x^i / i! truncated with a certified geometric tail
// bound.  Requires radius_positive and x * rho < 1.
SeriesEval egf_M(const AssemblySpec& spec, double x, double rel_tol = 1e-12);

// lambda_i(x) = m_i x^i / i!  (Poisson mean of Z_i under the x-tilt).
double lambda_i(const AssemblySpec& spec, double x, std::size_t i);
BigRat lambda_i_exact(const AssemblySpec& spec, const BigRat& x, std::size_t i);

}  // namespace assemblies

#endif
