#include "dispersal_lab/special_fn.hpp"

#include <cmath>
#include <vector>

#include "dispersal_lab/errors.hpp"

namespace dlab {

namespace {

void check_lerch_args(double z, long a) {
  if (!(z >= 0.0 && z < 1.0)) {
    throw DomainError("lerch_phi1: z must lie in [0, 1)");
  }
  if (a < 1) {
    throw DomainError("lerch_phi1: a must be a positive integer");
  }
}

}  // namespace

LerchEval lerch_phi1_series(double z, long a) {
  check_lerch_args(z, a);
  double sum = 1.0 / static_cast<double>(a);
  double zj = 1.0;
  int terms = 1;
  for (long j = 1; j < 100000; ++j) {
    zj *= z;
    const double term = zj / static_cast<double>(a + j);
    sum += term;
    ++terms;
    if (term < 1e-16 * sum) {
      // Geometric remainder: sum_{i>j} z^i/(a+i) < z^{j+1} / ((a+j+1)(1-z)).
      sum += zj * z / (static_cast<double>(a + j + 1) * (1.0 - z));
      break;
    }
  }
  return {sum, terms, LerchMethod::Series};
}

LerchEval lerch_phi1_closed(double z, long a) {
  check_lerch_args(z, a);
  if (z == 0.0) return {1.0 / static_cast<double>(a), 1, LerchMethod::ClosedForm};
  double correction = 0.0;
  double zj = 1.0;
  for (long j = 1; j < a; ++j) {
    zj *= z;
    correction += zj / static_cast<double>(j);
  }
  const double bracket = -std::log1p(-z) - correction;
  const double value = bracket / std::pow(z, static_cast<double>(a));
  return {value, static_cast<int>(a), LerchMethod::ClosedForm};
}

LerchEval lerch_phi1(double z, long a) {
  check_lerch_args(z, a);
  // The closed form cancels roughly a*log10(1/z) digits; it is only used
  // where that loss is small, which is exactly where the series is slow.
  if (z >= 0.9 && static_cast<double>(a) * -std::log(z) < 9.0) {
    return lerch_phi1_closed(z, a);
  }
  return lerch_phi1_series(z, a);
}

double log_binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) {
    throw DomainError("log_binom: need 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binom_ratio(long n_top, long k_top, long n_bot, long k_bot) {
  return std::exp(log_binom(n_top, k_top) - log_binom(n_bot, k_bot));
}

BigInt surjections(long n, long k) {
  if (k < 0) throw DomainError("surjections: k must be nonnegative");
  if (n < k) return 0;
  if (k == 0) return n == 0 ? 1 : 0;
  BigInt total = 0;
  BigInt binom = 1;  // C(k, i), updated incrementally
  for (long i = 0; i <= k; ++i) {
    BigInt term = binom * boost::multiprecision::pow(BigInt(k - i),
                                                     static_cast<unsigned>(n));
    total += (i % 2 == 0) ? term : -term;
    binom = binom * (k - i) / (i + 1);
  }
  return total;
}

}  // namespace dlab
