#pragma once

namespace pooltest {

// log(1 - exp(-x)) for x > 0, computed without catastrophic cancellation.
// Uses log(-expm1(-x)) below log(2) and log1p(-exp(-x)) above it.
double log1mexp(double x);

// log of the binomial coefficient C(n, k), exact for small n and via
// lgamma otherwise.
double log_choose(long n, long k);

// Upper tail of the standard normal, Q(z) = P(Z > z).
double normal_sf(double z);

// Quantile of the standard normal, inverse of the lower tail.
double normal_quantile(double p);

// Upper tail of the chi-squared distribution with df degrees of freedom,
// evaluated through the regularized incomplete gamma function.  The series
// branch is used for x < df + 1 and a Lentz-style continued fraction
// otherwise; both iterate to a relative tolerance of 1e-12.
double chi2_sf(double x, double df);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Upper tail of Student's t distribution with df degrees of freedom.
double student_t_sf(double t, double df);

}  // namespace pooltest
