#pragma once

#include <cstdint>
#include <vector>

#include "pairmn/linalg.hpp"
#include "pairmn/rng.hpp"

namespace pairmn {

// All samplers draw from an exclusively-owned RngStream and are
// reproducible given (seed, stream id).

// Gamma(shape, 1). shape == 0 is the point mass at 0.
double sample_gamma(double shape, RngStream& rng);

// Dirichlet with concentration vector `alpha` (entries >= 0, at least one
// positive). Zero-concentration coordinates come out exactly 0.
Vec sample_dirichlet(const Vec& alpha, RngStream& rng);

// Index draw from a probability vector (entries >= 0, positive sum).
int sample_categorical(const Vec& p, RngStream& rng);

// Poisson with the given mean.
long long sample_poisson(double mean, RngStream& rng);

// Binomial(n, p).
long long sample_binomial(long long n, double p, RngStream& rng);

// Multinomial(n, p) via conditional binomials; returns one count per
// category of p.
std::vector<long long> sample_multinomial(long long n, const Vec& p, RngStream& rng);

// One draw from a bivariate normal: means (mean1, mean2), covariance
// [[var1, cov], [cov, var2]]. The covariance must be positive semidefinite.
struct NormalPair {
  double z1;
  double z2;
};
NormalPair sample_mvnormal_pair(double mean1, double mean2, double var1,
                                double var2, double cov, RngStream& rng);

}  // namespace pairmn
