#ifndef ASSEMBLIES_STATS_HPP
#define ASSEMBLIES_STATS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace assemblies {

// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// Streaming log-sum-exp accumulator: keeps a running maximum and a sum
// of rescaled exponentials, so millions of terms can be folded in one
// pass without a second sweep.
class LogSumAccumulator {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (sum_ == 0.0) {
      max_ = log_term;
      sum_ = 1.0;
      return;
    }
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }

  bool empty() const { return sum_ == 0.0; }

  double log_sum() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of
// freedom (used by the goodness-of-fit gates).
inline double chi_square_sf(double chi2, double df) { return gamma_q(df / 2.0, chi2 / 2.0); }

// lgamma(i) for i = 0..n as a flat table (index 0 unused, set to 0).
std::vector<double> lgamma_table(std::size_t n);

}  // namespace assemblies

#endif
