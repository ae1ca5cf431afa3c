#include "pairmn/samplers.hpp"

#include <array>
#include <cmath>

#include "pairmn/errors.hpp"

namespace pairmn {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log(k!) with a fixed-order accumulation table below 1024 and a Stirling
// series above, so streams do not depend on the platform's lgamma.
class LogFactorial {
 public:
  LogFactorial() {
    table_[0] = 0.0;
    for (int k = 1; k < kTableSize; ++k)
      table_[k] = table_[k - 1] + std::log(static_cast<double>(k));
  }
  double operator()(long long k) const {
    if (k < kTableSize) return table_[static_cast<int>(k)];
    const double x = static_cast<double>(k) + 1.0;
    const double x3 = x * x * x;
    return (x - 0.5) * std::log(x) - x + kLogSqrt2Pi + 1.0 / (12.0 * x) -
           1.0 / (360.0 * x3) + 1.0 / (1260.0 * x3 * x * x);
  }

 private:
  static constexpr int kTableSize = 1024;
  std::array<double, kTableSize> table_;
};

const LogFactorial lfact;

// BINV inversion; requires n * p modest.
long long binomial_inversion(long long n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double f0 = std::exp(static_cast<double>(n) * std::log(q));
  for (;;) {
    double u = rng.uniform();
    double f = f0;
    long long k = 0;
    while (u > f) {
      u -= f;
      ++k;
      if (k > n) break;
      f *= s * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    if (k <= n) return k;
    // fell off the support through rounding; redraw
  }
}

// Hormann's BTRS transformed rejection; requires n * min(p, 1-p) >= 10
// and p <= 0.5.
long long binomial_btrs(long long n, double p, RngStream& rng) {
  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const long long m = static_cast<long long>(std::floor((nd + 1.0) * p));
  const double h = lfact(m) + lfact(n - m);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const long long k = static_cast<long long>(std::floor((2.0 * a / us + b) * u + c));
    if (k < 0 || k > n) continue;
    if (us >= 0.07 && v <= v_r) return k;
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - lfact(k) - lfact(n - k) + static_cast<double>(k - m) * lpq)
      return k;
  }
}

// Hormann's PTRS transformed rejection for Poisson, mean >= 10.
long long poisson_ptrs(double lam, RngStream& rng) {
  const double b = 0.931 + 2.53 * std::sqrt(lam);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double llam = std::log(lam);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const long long k = static_cast<long long>(std::floor((2.0 * a / us + b) * u + lam + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        static_cast<double>(k) * llam - lam - lfact(k))
      return k;
  }
}

}  // namespace

double sample_gamma(double shape, RngStream& rng) {
  if (shape < 0.0 || !std::isfinite(shape))
    throw InvalidInput("sample_gamma: shape must be finite and >= 0");
  if (shape == 0.0) return 0.0;
  if (shape < 1.0) {
    const double u = rng.uniform_pos();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Vec sample_dirichlet(const Vec& alpha, RngStream& rng) {
  const int d = static_cast<int>(alpha.size());
  if (d < 1) throw InvalidInput("sample_dirichlet: empty concentration");
  bool any_pos = false;
  for (int j = 0; j < d; ++j) {
    if (alpha(j) < 0.0 || !std::isfinite(alpha(j)))
      throw InvalidInput("sample_dirichlet: concentrations must be finite and >= 0");
    any_pos |= alpha(j) > 0.0;
  }
  if (!any_pos) throw InvalidInput("sample_dirichlet: all concentrations zero");
  Vec g(d);
  for (;;) {
    double sum = 0.0;
    for (int j = 0; j < d; ++j) {
      g(j) = sample_gamma(alpha(j), rng);
      sum += g(j);
    }
    if (sum > 0.0) return g / sum;
    // every coordinate underflowed; redraw
  }
}

int sample_categorical(const Vec& p, RngStream& rng) {
  const int d = static_cast<int>(p.size());
  if (d < 1) throw InvalidInput("sample_categorical: empty probability vector");
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    if (p(j) < 0.0 || !std::isfinite(p(j)))
      throw InvalidInput("sample_categorical: probabilities must be finite and >= 0");
    total += p(j);
  }
  if (!(total > 0.0)) throw InvalidInput("sample_categorical: zero total probability");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (int j = 0; j < d; ++j) {
    acc += p(j);
    if (u < acc) return j;
  }
  return d - 1;
}

long long sample_poisson(double mean, RngStream& rng) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw InvalidInput("sample_poisson: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = rng.uniform_pos();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform_pos();
    }
    return k;
  }
  return poisson_ptrs(mean, rng);
}

long long sample_binomial(long long n, double p, RngStream& rng) {
  if (n < 0) throw InvalidInput("sample_binomial: n must be >= 0");
  if (p < 0.0 || p > 1.0 || !std::isfinite(p))
    throw InvalidInput("sample_binomial: p must be in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flipped = p > 0.5;
  const double pp = flipped ? 1.0 - p : p;
  long long k;
  if (static_cast<double>(n) * pp < 14.0) {
    k = binomial_inversion(n, pp, rng);
  } else {
    k = binomial_btrs(n, pp, rng);
  }
  return flipped ? n - k : k;
}

std::vector<long long> sample_multinomial(long long n, const Vec& p, RngStream& rng) {
  const int d = static_cast<int>(p.size());
  if (d < 1) throw InvalidInput("sample_multinomial: empty probability vector");
  if (n < 0) throw InvalidInput("sample_multinomial: n must be >= 0");
  double total = 0.0;
  for (int j = 0; j < d; ++j) {
    if (p(j) < 0.0 || !std::isfinite(p(j)))
      throw InvalidInput("sample_multinomial: probabilities must be finite and >= 0");
    total += p(j);
  }
  if (!(total > 0.0)) throw InvalidInput("sample_multinomial: zero total probability");
  std::vector<long long> out(d, 0);
  long long remaining = n;
  double mass_left = total;
  for (int j = 0; j + 1 < d && remaining > 0; ++j) {
    if (p(j) <= 0.0) continue;
    double cond = p(j) / mass_left;
    if (cond > 1.0) cond = 1.0;
    const long long x = (cond >= 1.0) ? remaining : sample_binomial(remaining, cond, rng);
    out[j] = x;
    remaining -= x;
    mass_left -= p(j);
    if (mass_left <= 0.0) break;
  }
  out[d - 1] += remaining;
  return out;
}

NormalPair sample_mvnormal_pair(double mean1, double mean2, double var1,
                                double var2, double cov, RngStream& rng) {
  if (var1 < 0.0 || var2 < 0.0 || !std::isfinite(var1) || !std::isfinite(var2) ||
      !std::isfinite(cov))
    throw InvalidInput("sample_mvnormal_pair: variances must be finite and >= 0");
  const double bound = std::sqrt(var1 * var2);
  if (std::fabs(cov) > bound * (1.0 + 1e-12) + 1e-300)
    throw InvalidInput("sample_mvnormal_pair: covariance not positive semidefinite");
  const double l11 = std::sqrt(var1);
  const double l21 = l11 > 0.0 ? cov / l11 : 0.0;
  const double rest = var2 - l21 * l21;
  const double l22 = rest > 0.0 ? std::sqrt(rest) : 0.0;
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  return {mean1 + l11 * z1, mean2 + l21 * z1 + l22 * z2};
}

}  // namespace pairmn
