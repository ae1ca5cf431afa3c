#pragma once

#include <utility>

#include "pairmn/linalg.hpp"
#include "pairmn/rng.hpp"

namespace pairmn {

// Moment parameters of the paired-multinomial distribution: latent
// compositions with means pi1/pi2, covariances sigma1/sigma2 and
// cross-covariance sigma12.
struct PairMnParams {
  Vec pi1, pi2;
  Mat sigma1, sigma2, sigma12;

  // Throws InvalidInput unless: pi_t on the simplex; sigma_t symmetric PSD;
  // every matrix annihilates the all-ones vector.
  void validate() const;
  int dim() const { return static_cast<int>(pi1.size()); }
};

// How the second Dirichlet argument is read. `kVarianceShare` takes
// Dir(alpha, theta) to mean E = alpha, Var = theta (diag(alpha) - alpha
// alpha^T), i.e. concentration alpha (1-theta)/theta with theta in (0, 1]
// and theta = 1 the categorical vertex limit. `kConcentrationTotal` reads
// theta as the total concentration: Dir(alpha * theta), giving variance
// share 1/(1+theta). Both appear because the printed simulation settings
// mix theta values inside and outside (0, 1].
enum class ThetaMode { kVarianceShare, kConcentrationTotal };

// Converts a theta under either reading to the variance share
// w with Var = w (diag(alpha) - alpha alpha^T).
double theta_variance_share(double theta, ThetaMode mode);

struct MixedDirichletParams {
  Vec alpha1, alpha2, ell;
  double theta_a1 = 0.5, theta_a2 = 0.5, theta_ell = 0.5;
  double rho = 0.0;
  ThetaMode theta_mode = ThetaMode::kVarianceShare;

  void validate() const;
  int dim() const { return static_cast<int>(alpha1.size()); }
};

struct LogNormalParams {
  Vec mu1, mu2;
  Vec sigma_sd1, sigma_sd2;
  double rho = 0.0;

  void validate() const;
  int dim() const { return static_cast<int>(mu1.size()); }
};

struct PairMnMoments {
  Vec mean1, mean2;
  Mat var1, var2;
  Mat cross;
};

// First and second moments of the observed counts given totals n1, n2.
PairMnMoments pairmn_moments(const PairMnParams& params, long long n1, long long n2);

// Maps the mixed-Dirichlet generator parameters to PairMN moment form.
PairMnParams mixed_dirichlet_to_pairmn(const MixedDirichletParams& p);

// One draw of a composition with mean alpha and variance
// w(theta) (diag(alpha) - alpha alpha^T). At the vertex limit (variance
// share 1) returns a categorical vertex draw.
Vec sample_overdispersed_dirichlet(const Vec& alpha, double theta, ThetaMode mode,
                                   RngStream& rng);

struct PairedCountDraw {
  std::vector<long long> x1, x2;
};

// One subject under the mixed-Dirichlet PairMN generator.
PairedCountDraw sample_pairmn_mixed_dirichlet(const MixedDirichletParams& p,
                                              long long n1, long long n2,
                                              RngStream& rng);

// One subject under the log-normal PairMN generator.
PairedCountDraw sample_pairmn_lognormal(const LogNormalParams& p, long long n1,
                                        long long n2, RngStream& rng);

// Latent composition pair (exposed for moment checks on P itself).
struct LatentPair {
  Vec p1, p2;
};
LatentPair sample_latent_mixed_dirichlet(const MixedDirichletParams& p, RngStream& rng);
LatentPair sample_latent_lognormal(const LogNormalParams& p, RngStream& rng);

}  // namespace pairmn
