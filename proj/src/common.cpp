#include "assemblies/common.hpp"

#include <cmath>
#include <limits>

namespace assemblies {

double log_bigint(const BigInt& v) {
  if (v == 0) return -std::numeric_limits<double>::infinity();
  signed long exp2 = 0;
  double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
  return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

}  // namespace assemblies
