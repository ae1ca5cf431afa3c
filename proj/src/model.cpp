#include "pairmn/model.hpp"

#include <cmath>

#include "pairmn/errors.hpp"
#include "pairmn/samplers.hpp"

namespace pairmn {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kAnnihilTol = 1e-10;

void check_simplex(const Vec& v, const char* what) {
  if (v.size() < 1) throw InvalidInput(std::string(what) + ": empty vector");
  double sum = 0.0;
  for (int j = 0; j < v.size(); ++j) {
    if (!(v(j) >= 0.0) || !std::isfinite(v(j)))
      throw InvalidInput(std::string(what) + ": entries must be finite and >= 0");
    sum += v(j);
  }
  if (std::fabs(sum - 1.0) > kSimplexTol * v.size() + kSimplexTol)
    throw InvalidInput(std::string(what) + ": entries must sum to 1");
}

void check_annihilates_ones(const Mat& m, const char* what) {
  const Vec ones = Vec::Ones(m.cols());
  if ((m * ones).cwiseAbs().maxCoeff() > kAnnihilTol ||
      (m.transpose() * ones).cwiseAbs().maxCoeff() > kAnnihilTol)
    throw InvalidInput(std::string(what) + ": row/column sums must vanish");
}

void check_psd(const Mat& m, const char* what) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kAnnihilTol)
    throw InvalidInput(std::string(what) + ": must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  if (es.eigenvalues().minCoeff() < -kAnnihilTol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()))
    throw InvalidInput(std::string(what) + ": must be positive semidefinite");
}

Mat multinomial_kernel(const Vec& p) {
  return Mat(p.asDiagonal()) - p * p.transpose();
}

}  // namespace

void PairMnParams::validate() const {
  check_simplex(pi1, "PairMnParams.pi1");
  check_simplex(pi2, "PairMnParams.pi2");
  const int d = dim();
  if (pi2.size() != d || sigma1.rows() != d || sigma1.cols() != d ||
      sigma2.rows() != d || sigma2.cols() != d || sigma12.rows() != d ||
      sigma12.cols() != d)
    throw InvalidInput("PairMnParams: dimension mismatch");
  check_psd(sigma1, "PairMnParams.sigma1");
  check_psd(sigma2, "PairMnParams.sigma2");
  check_annihilates_ones(sigma1, "PairMnParams.sigma1");
  check_annihilates_ones(sigma2, "PairMnParams.sigma2");
  check_annihilates_ones(sigma12, "PairMnParams.sigma12");
}

double theta_variance_share(double theta, ThetaMode mode) {
  switch (mode) {
    case ThetaMode::kVarianceShare:
      if (!(theta > 0.0) || theta > 1.0)
        throw InvalidInput("theta must be in (0, 1] under the variance-share reading");
      return theta;
    case ThetaMode::kConcentrationTotal:
      if (!(theta > 0.0) || !std::isfinite(theta))
        throw InvalidInput("theta must be a positive concentration total");
      return 1.0 / (1.0 + theta);
  }
  throw InvalidInput("unknown theta mode");
}

void MixedDirichletParams::validate() const {
  check_simplex(alpha1, "MixedDirichletParams.alpha1");
  check_simplex(alpha2, "MixedDirichletParams.alpha2");
  check_simplex(ell, "MixedDirichletParams.ell");
  if (alpha2.size() != alpha1.size() || ell.size() != alpha1.size())
    throw InvalidInput("MixedDirichletParams: dimension mismatch");
  theta_variance_share(theta_a1, theta_mode);
  theta_variance_share(theta_a2, theta_mode);
  theta_variance_share(theta_ell, theta_mode);
  if (!(rho >= 0.0) || rho >= 1.0)
    throw InvalidInput("MixedDirichletParams: rho must be in [0, 1)");
}

void LogNormalParams::validate() const {
  const int d = dim();
  if (d < 1 || mu2.size() != d || sigma_sd1.size() != d || sigma_sd2.size() != d)
    throw InvalidInput("LogNormalParams: dimension mismatch");
  for (int j = 0; j < d; ++j) {
    if (!std::isfinite(mu1(j)) || !std::isfinite(mu2(j)))
      throw InvalidInput("LogNormalParams: means must be finite");
    if (!(sigma_sd1(j) > 0.0) || !(sigma_sd2(j) > 0.0))
      throw InvalidInput("LogNormalParams: sigma entries must be > 0");
  }
  if (!(rho > -1.0) || !(rho < 1.0))
    throw InvalidInput("LogNormalParams: rho must be in (-1, 1)");
}

PairMnMoments pairmn_moments(const PairMnParams& params, long long n1, long long n2) {
  params.validate();
  if (n1 < 1 || n2 < 1) throw InvalidInput("pairmn_moments: totals must be >= 1");
  const double f1 = static_cast<double>(n1);
  const double f2 = static_cast<double>(n2);
  PairMnMoments m;
  m.mean1 = f1 * params.pi1;
  m.mean2 = f2 * params.pi2;
  m.var1 = f1 * multinomial_kernel(params.pi1) + f1 * (f1 - 1.0) * params.sigma1;
  m.var2 = f2 * multinomial_kernel(params.pi2) + f2 * (f2 - 1.0) * params.sigma2;
  m.cross = f1 * f2 * params.sigma12;
  return m;
}

PairMnParams mixed_dirichlet_to_pairmn(const MixedDirichletParams& p) {
  p.validate();
  const double w1 = theta_variance_share(p.theta_a1, p.theta_mode);
  const double w2 = theta_variance_share(p.theta_a2, p.theta_mode);
  const double wl = theta_variance_share(p.theta_ell, p.theta_mode);
  const double r = p.rho;
  const Mat kern_l = multinomial_kernel(p.ell);
  PairMnParams out;
  out.pi1 = (1.0 - r) * p.alpha1 + r * p.ell;
  out.pi2 = (1.0 - r) * p.alpha2 + r * p.ell;
  out.sigma1 = (1.0 - r) * (1.0 - r) * w1 * multinomial_kernel(p.alpha1) +
               r * r * wl * kern_l;
  out.sigma2 = (1.0 - r) * (1.0 - r) * w2 * multinomial_kernel(p.alpha2) +
               r * r * wl * kern_l;
  out.sigma12 = r * r * wl * kern_l;
  return out;
}

Vec sample_overdispersed_dirichlet(const Vec& alpha, double theta, ThetaMode mode,
                                   RngStream& rng) {
  check_simplex(alpha, "sample_overdispersed_dirichlet.alpha");
  const double w = theta_variance_share(theta, mode);
  if (w >= 1.0) {
    // vertex draw: degenerate Dirichlet with all mass at one coordinate
    Vec out = Vec::Zero(alpha.size());
    out(sample_categorical(alpha, rng)) = 1.0;
    return out;
  }
  const double conc = (1.0 - w) / w;
  return sample_dirichlet(conc * alpha, rng);
}

LatentPair sample_latent_mixed_dirichlet(const MixedDirichletParams& p, RngStream& rng) {
  const Vec shared = sample_overdispersed_dirichlet(p.ell, p.theta_ell, p.theta_mode, rng);
  const Vec p1 = sample_overdispersed_dirichlet(p.alpha1, p.theta_a1, p.theta_mode, rng);
  const Vec p2 = sample_overdispersed_dirichlet(p.alpha2, p.theta_a2, p.theta_mode, rng);
  LatentPair out;
  out.p1 = (1.0 - p.rho) * p1 + p.rho * shared;
  out.p2 = (1.0 - p.rho) * p2 + p.rho * shared;
  return out;
}

PairedCountDraw sample_pairmn_mixed_dirichlet(const MixedDirichletParams& p,
                                              long long n1, long long n2,
                                              RngStream& rng) {
  p.validate();
  if (n1 < 0 || n2 < 0) throw InvalidInput("totals must be >= 0");
  const LatentPair lat = sample_latent_mixed_dirichlet(p, rng);
  PairedCountDraw out;
  out.x1 = n1 > 0 ? sample_multinomial(n1, lat.p1, rng)
                  : std::vector<long long>(p.dim(), 0);
  out.x2 = n2 > 0 ? sample_multinomial(n2, lat.p2, rng)
                  : std::vector<long long>(p.dim(), 0);
  return out;
}

LatentPair sample_latent_lognormal(const LogNormalParams& p, RngStream& rng) {
  const int d = p.dim();
  Vec z1(d), z2(d);
  for (int j = 0; j < d; ++j) {
    const double s1 = p.sigma_sd1(j);
    const double s2 = p.sigma_sd2(j);
    const NormalPair z = sample_mvnormal_pair(p.mu1(j), p.mu2(j), s1 * s1,
                                              s2 * s2, p.rho * s1 * s2, rng);
    z1(j) = z.z1;
    z2(j) = z.z2;
  }
  const auto softmax = [](const Vec& z) {
    const Vec e = (z.array() - z.maxCoeff()).exp();
    return Vec(e / e.sum());
  };
  return {softmax(z1), softmax(z2)};
}

PairedCountDraw sample_pairmn_lognormal(const LogNormalParams& p, long long n1,
                                        long long n2, RngStream& rng) {
  p.validate();
  if (n1 < 0 || n2 < 0) throw InvalidInput("totals must be >= 0");
  const LatentPair lat = sample_latent_lognormal(p, rng);
  PairedCountDraw out;
  out.x1 = n1 > 0 ? sample_multinomial(n1, lat.p1, rng)
                  : std::vector<long long>(p.dim(), 0);
  out.x2 = n2 > 0 ? sample_multinomial(n2, lat.p2, rng)
                  : std::vector<long long>(p.dim(), 0);
  return out;
}

}  // namespace pairmn
