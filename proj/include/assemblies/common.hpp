#ifndef ASSEMBLIES_COMMON_HPP
#define ASSEMBLIES_COMMON_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace assemblies {

using BigInt = mpz_class;
using BigRat = mpq_class;

// Numeric mode for counting/law operations.  Exact mode carries big
// rationals end to end; log mode works in log-space doubles with a
// tracked error margin (needed once n! leaves fixed precision).
enum class NumericMode { exact, log_space };

// A series/parameter diverges (x outside the usable range).
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation is not defined for this assembly (e.g. radius of
// convergence zero).
class unsupported_error : public std::runtime_error {
 public:
  explicit unsupported_error(const std::string& what) : std::runtime_error(what) {}
};

// A solver target cannot be reached inside the valid parameter range.
class no_solution_error : public std::runtime_error {
 public:
  explicit no_solution_error(const std::string& what) : std::runtime_error(what) {}
};

inline double to_double(const BigRat& q) { return q.get_d(); }

// log of a positive big integer, exact to double rounding.
double log_bigint(const BigInt& v);

}  // namespace assemblies

#endif
