#include "assemblies/spec.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace assemblies {

AssemblySpec::AssemblySpec(std::string name, Rule rule, bool radius_positive,
                           std::vector<BigInt> custom)
    : name_(std::move(name)),
      rule_(rule),
      radius_positive_(radius_positive),
      custom_m_(std::move(custom)),
      cache_mutex_(std::make_shared<std::mutex>()) {}

AssemblySpec AssemblySpec::set_partitions() {
  return AssemblySpec("set-partitions", Rule::set_partitions, true, {});
}

AssemblySpec AssemblySpec::permutations() {
  return AssemblySpec("permutations", Rule::permutations, true, {});
}

AssemblySpec AssemblySpec::mappings() {
  return AssemblySpec("mappings", Rule::mappings, true, {});
}

AssemblySpec AssemblySpec::simple_graphs() {
  return AssemblySpec("graphs", Rule::simple_graphs, false, {});
}

AssemblySpec AssemblySpec::custom(std::string name, std::vector<BigInt> m, bool radius_positive) {
  for (const auto& v : m) {
    if (v < 0) throw std::invalid_argument("custom assembly: negative m value");
  }
  return AssemblySpec(std::move(name), Rule::custom_list, radius_positive, std::move(m));
}

AssemblySpec AssemblySpec::builtin(const std::string& id) {
  if (id == "set-partitions") return set_partitions();
  if (id == "permutations") return permutations();
  if (id == "mappings") return mappings();
  if (id == "graphs") return simple_graphs();
  throw std::invalid_argument("unknown assembly: " + id);
}

AssemblySpec AssemblySpec::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("assembly json: object expected");
  std::string name = j.value("name", std::string("custom"));
  if (!j.contains("m")) throw std::invalid_argument("assembly json: missing \"m\"");
  const auto& m = j.at("m");
  if (m.is_object()) {
    return builtin(m.at("rule").get<std::string>());
  }
  if (!m.is_array()) throw std::invalid_argument("assembly json: \"m\" must be array or rule");
  std::vector<BigInt> values;
  values.reserve(m.size());
  for (const auto& e : m) {
    if (e.is_number_unsigned()) {
      values.emplace_back(static_cast<unsigned long>(e.get<std::uint64_t>()));
    } else if (e.is_number_integer()) {
      long v = e.get<long>();
      if (v < 0) throw std::invalid_argument("assembly json: negative m value");
      values.emplace_back(v);
    } else if (e.is_string()) {
      values.emplace_back(BigInt(e.get<std::string>()));
    } else {
      throw std::invalid_argument("assembly json: m entries must be integers or digit strings");
    }
  }
  bool radius_positive = j.value("radius_positive", true);
  return custom(std::move(name), std::move(values), radius_positive);
}

AssemblySpec AssemblySpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open assembly file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

namespace {

// connected functional digraphs: (i-1)! sum_{j<i} i^j / j!, kept integral
// by folding the factorial quotient into each term
BigInt mappings_m(std::size_t i) {
  BigInt total = 0;
  BigInt factor;  // (i-1)!/j! * i^j
  mpz_fac_ui(factor.get_mpz_t(), static_cast<unsigned long>(i - 1));
  for (std::size_t j = 0; j < i; ++j) {
    if (j > 0) {
      factor *= static_cast<unsigned long>(i);
      mpz_divexact_ui(factor.get_mpz_t(), factor.get_mpz_t(), static_cast<unsigned long>(j));
    }
    total += factor;
  }
  return total;
}

}  // namespace

void AssemblySpec::extend_cache(std::size_t i) const {
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  if (cache_.size() >= i) return;
  std::size_t target = std::max<std::size_t>(i, cache_.size() * 2);
  if (rule_ == Rule::simple_graphs) {
    // p(n) = 2^C(n,2); invert the exponential once up to the new size
    std::vector<BigInt> p(target + 1);
    p[0] = 1;
    for (std::size_t n = 1; n <= target; ++n) {
      mpz_ui_pow_ui(p[n].get_mpz_t(), 2, static_cast<unsigned long>(n * (n - 1) / 2));
    }
    std::vector<BigInt> m = m_from_p(p);
    cache_ = std::move(m);
  } else {
    cache_.reserve(target);
    while (cache_.size() < target) {
      std::size_t idx = cache_.size() + 1;  // computing m_idx
      switch (rule_) {
        case Rule::set_partitions:
          cache_.emplace_back(1);
          break;
        case Rule::permutations: {
          BigInt v;
          mpz_fac_ui(v.get_mpz_t(), static_cast<unsigned long>(idx - 1));
          cache_.push_back(std::move(v));
          break;
        }
        case Rule::mappings:
          cache_.push_back(mappings_m(idx));
          break;
        case Rule::custom_list:
          cache_.push_back(idx <= custom_m_.size() ? custom_m_[idx - 1] : BigInt(0));
          break;
        case Rule::simple_graphs:
          break;  // handled above
      }
    }
  }
  log_cache_.resize(cache_.size());
  for (std::size_t j = 0; j < cache_.size(); ++j) log_cache_[j] = log_bigint(cache_[j]);
}

BigInt AssemblySpec::m(std::size_t i) const {
  if (i == 0) throw std::invalid_argument("m_i defined for i >= 1");
  if (rule_ == Rule::custom_list && i > custom_m_.size()) return 0;
  {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (i <= cache_.size()) return cache_[i - 1];
  }
  extend_cache(i);
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  return cache_[i - 1];
}

double AssemblySpec::log_m(std::size_t i) const {
  if (i == 0) throw std::invalid_argument("m_i defined for i >= 1");
  if (rule_ == Rule::custom_list && i > custom_m_.size())
    return -std::numeric_limits<double>::infinity();
  {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (i <= log_cache_.size()) return log_cache_[i - 1];
  }
  extend_cache(i);
  std::lock_guard<std::mutex> lock(*cache_mutex_);
  return log_cache_[i - 1];
}

double AssemblySpec::rho(std::size_t probe_limit) const {
  if (!radius_positive_)
    throw unsupported_error("assembly " + name_ + ": radius of convergence is zero");
  switch (rule_) {
    case Rule::set_partitions:
      // (1/i!)^{1/i} decreases, so the sup sits at i = 3
      return std::cbrt(1.0 / 6.0);
    case Rule::permutations:
      // (1/i)^{1/i} increases to 1
      return 1.0;
    case Rule::mappings:
      // m_i/i! ~ e^i/(2i), sup is the limit e
      return std::exp(1.0);
    case Rule::simple_graphs:
      throw unsupported_error("graphs: radius of convergence is zero");
    case Rule::custom_list: {
      double best = 0.0;
      std::size_t hi = std::min(custom_m_.size(), probe_limit);
      for (std::size_t i = 3; i <= hi; ++i) {
        double lm = log_m(i);
        if (lm == -std::numeric_limits<double>::infinity()) continue;
        double cand = std::exp((lm - std::lgamma(static_cast<double>(i) + 1.0)) /
                               static_cast<double>(i));
        best = std::max(best, cand);
      }
      return best;
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<BigInt> m_from_p(const std::vector<BigInt>& p_values) {
  if (p_values.empty() || p_values[0] != 1)
    throw std::invalid_argument("m_from_p: need p(0) = 1");
  const std::size_t N = p_values.size() - 1;
  std::vector<BigRat> q(N + 1), l(N + 1);
  BigInt fact = 1;
  q[0] = 1;
  for (std::size_t n = 1; n <= N; ++n) {
    fact *= static_cast<unsigned long>(n);
    q[n] = BigRat(p_values[n], fact);
    q[n].canonicalize();
  }
  std::vector<BigInt> m(N);
  BigInt nf = 1;
  for (std::size_t n = 1; n <= N; ++n) {
    BigRat acc = 0;
    for (std::size_t j = 1; j < n; ++j) acc += BigRat(static_cast<unsigned long>(j)) * l[j] * q[n - j];
    l[n] = q[n] - acc / BigRat(static_cast<unsigned long>(n));
    l[n].canonicalize();
    nf *= static_cast<unsigned long>(n);
    BigRat mn = l[n] * BigRat(nf);
    mn.canonicalize();
    if (mn.get_den() != 1)
      throw std::invalid_argument("m_from_p: log coefficients are not integral at n=" +
                                  std::to_string(n));
    m[n - 1] = mn.get_num();
  }
  return m;
}

SeriesEval egf_M(const AssemblySpec& spec, double x, double rel_tol) {
  if (!(x > 0.0)) throw std::invalid_argument("egf_M: x > 0 required");
  if (!spec.radius_positive())
    throw unsupported_error("egf_M: assembly has zero radius of convergence");
  double r = spec.rho();
  if (r > 0.0 && x * r >= 1.0)
    throw divergence_error("egf_M: x >= 1/rho, series diverges");
  const double lx = std::log(x);
  SeriesEval out;
  double sum = 0.0;
  std::size_t i = 1;
  const double ratio = x * r;  // geometric envelope for i >= 3
  for (;; ++i) {
    double lterm = spec.log_m(i) + static_cast<double>(i) * lx -
                   std::lgamma(static_cast<double>(i) + 1.0);
    double term = std::exp(lterm);
    sum += term;
    if (r == 0.0) {
      // rho = 0 only happens for short custom lists; the series is a
      // polynomial, so stop at the first vanished term past i = 2
      if ((i >= 3 && spec.log_m(i) == -std::numeric_limits<double>::infinity()) || i >= 4096) {
        out.truncation_index = i;
        out.tail_bound = 0.0;
        break;
      }
      continue;
    }
    if (i >= 3) {
      double tail = std::pow(ratio, static_cast<double>(i) + 1.0) / (1.0 - ratio);
      if (tail <= rel_tol * sum || i >= 100000) {
        out.truncation_index = i;
        out.tail_bound = tail;
        break;
      }
    }
  }
  out.value = sum;
  return out;
}

double lambda_i(const AssemblySpec& spec, double x, std::size_t i) {
  if (i == 0) throw std::invalid_argument("lambda_i: i >= 1");
  if (x == 0.0) return 0.0;
  double lm = spec.log_m(i);
  if (lm == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(lm + static_cast<double>(i) * std::log(x) -
                  std::lgamma(static_cast<double>(i) + 1.0));
}

BigRat lambda_i_exact(const AssemblySpec& spec, const BigRat& x, std::size_t i) {
  if (i == 0) throw std::invalid_argument("lambda_i: i >= 1");
  BigRat xi = 1;
  for (std::size_t j = 0; j < i; ++j) xi *= x;
  BigInt fact;
  mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(i));
  BigRat out = BigRat(spec.m(i)) * xi / BigRat(fact);
  out.canonicalize();
  return out;
}

}  // namespace assemblies
