#pragma once

#include <cstdint>
#include <boost/multiprecision/cpp_int.hpp>

namespace dlab {

using BigInt = boost::multiprecision::cpp_int;

enum class LerchMethod { Series, ClosedForm };

struct LerchEval {
  double value = 0.0;
  int terms_used = 0;
  LerchMethod method = LerchMethod::Series;
};

/// Lerch transcendent Phi(z, 1, a) = sum_{j>=0} z^j / (a + j) for z in [0,1)
/// and integer a >= 1. Direct series for small z; for z >= 0.9 the series is
/// slow and the log-based closed form is stable, so we switch over.
LerchEval lerch_phi1(double z, long a);

/// Series evaluation regardless of z (exposed for cross-checking).
LerchEval lerch_phi1_series(double z, long a);

/// Closed form (1/z^a)[ln(1/(1-z)) - sum_{j=1}^{a-1} z^j/j], z in (0,1).
LerchEval lerch_phi1_closed(double z, long a);

/// log C(n, k); domain error unless 0 <= k <= n.
double log_binom(long n, long k);

/// C(n_top, k_top) / C(n_bot, k_bot), evaluated in log space so that the
/// d = 800 regime does not overflow.
double binom_ratio(long n_top, long k_top, long n_bot, long k_bot);

/// Number of surjections from an n-set onto a k-set, exact:
/// T(n,k) = sum_i (-1)^i C(k,i) (k-i)^n. Returns 0 for n < k.
BigInt surjections(long n, long k);

}  // namespace dlab
