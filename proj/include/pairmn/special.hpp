#pragma once

namespace pairmn {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// Accurate to ~1e-13 for moderate a, b.
double reg_inc_beta(double x, double a, double b);

// Regularized lower incomplete gamma P(a, x).
double reg_lower_gamma(double a, double x);

// CDF of the F distribution with d1, d2 degrees of freedom; x < 0 maps to 0.
double f_cdf(double x, int d1, int d2);

// CDF of the chi-square distribution with k degrees of freedom.
double chisq_cdf(double x, int k);

// Standard normal CDF.
double normal_cdf(double x);

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// Asymptotic p-value of the one-sample KS statistic d on n observations.
double ks_pvalue(double d, int n);

}  // namespace pairmn
