#pragma once

#include <functional>

#include "pooltest/dataset.hpp"
#include "pooltest/params.hpp"

namespace pooltest {

// Effective pool size s^{1+lambda}.  lambda == 0 short-circuits to s so the
// perfect-test model is free of exp/log rounding.
double pool_power(int s, double lambda);

// Probability that a pool of s units tests positive when each unit is
// positive with probability theta and the test has excess intensity lambda:
// 1 - (1-theta)^(s^(1+lambda)).
double ppp(int s, double theta, double lambda);

// Same curve parameterized by eta on the cll scale, phi = 1 - exp(-s^(1+lambda) e^eta).
// eta = -inf and +inf map to 0 and 1.
double ppp_eta(int s, double eta, double lambda);

// Test response probability given the number of positive units in the pool.
// h(s, l) is the chance a pool of size s containing l positive units tests
// positive.
using HFunction = std::function<double(int pool_size, int positive_units)>;

// Positive pool probability when the test responds through h: the expectation
// of h(s, L) with L ~ Binomial(s, theta).  Evaluated by summation by parts
// over the binomial upper tails, so the perfect test (h = 1 iff l >= 1)
// reproduces ppp(s, theta, 0) bit for bit.
double ppp_from_h(int s, double theta, const HFunction& h);

// Log mass of the observed positive-pool counts: sum of independent
// Binomial(y_i | n_i, phi_i) log masses with phi_i from the parameter set.
// -inf exactly when some y_i > 0 with phi_i = 0 or y_i < n_i with phi_i = 1.
double poolbin_log_mass(const PooledDataset& data, const ModelParams& params);

// Draws positive-pool counts for the design rows (their positives fields are
// ignored) with y_i ~ Binomial(n_i, phi_i).  Deterministic in seed.
PooledDataset sample(const PooledDataset& design, const ModelParams& params,
                     std::uint64_t seed);

namespace detail {

// Per-row quantities for the cll-scale likelihood.  With u the linear
// predictor and w = e^u, the row has phi = 1 - exp(-w) and log mass
// logC - (n-y) w + y log(1-exp(-w)).  winv = w / (e^w - 1) appears in the
// derivatives with respect to u:
//   d l/du   = -(n-y) w + y winv
//   d2 l/du2 = -(n-y) w + y winv (1 - w - winv)
// u is clamped to +-700 so every intermediate stays finite.
struct RowTerms {
  double w = 0.0;
  double phi = 0.0;
  double winv = 1.0;
};

RowTerms row_terms_from_u(double u);
RowTerms row_terms_from_w(double w);

// w = -n_eff log(1-theta) for the row under the given parameter scale;
// validates covariate length on the regression scale.
double row_w(const PoolRow& row, const ModelParams& params);

double row_log_mass(long n, long y, const RowTerms& t);
double row_dloglik(long n, long y, const RowTerms& t);
double row_d2loglik(long n, long y, const RowTerms& t);

}  // namespace detail

}  // namespace pooltest
