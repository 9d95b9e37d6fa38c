// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

// Distribution tails carried in log space: the p-values reported by
// leakage assessments routinely fall far below the smallest double.
namespace scadoe::stats {

/// Inverse of the standard normal CDF, p in (0, 1).
double normal_quantile(double p);

/// log P(Z > z) for standard normal Z.
double log_normal_sf(double z);

/// log of the regularized incomplete beta I_x(a, b).
double log_ibeta(double a, double b, double x);

/// log of the regularized upper incomplete gamma Q(a, x).
double log_gamma_q(double a, double x);

/// Two-sided Student-t p-value as -log10 p.
double t_to_neglog10p(double t, double df);

/// Welch-Satterthwaite degrees of freedom from the two sample variances.
double welch_df(double var_a, double n_a, double var_b, double n_b);

/// Chi-square survival function as -log10 p.
double chi2_neglog10p(double statistic, double df);

/// -log10 P(Binomial(trials, 1/2) >= successes), exact.
double binomial_tail_neglog10p(std::int64_t successes, std::int64_t trials);

} // namespace scadoe::stats
