// SPDX-License-Identifier: Apache-2.0

#include "scadoe/analysis/stats.hpp"

#include "scadoe/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace scadoe::stats {

namespace {

constexpr double kLn10 = std::numbers::ln10;
constexpr int kMaxIter = 100000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// log(1 - exp(x)) for x <= 0
double log1mexp(double x) {
    return x > -std::numbers::ln2 ? std::log(-std::expm1(x)) : std::log1p(-std::exp(x));
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double betacf(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h;
    }
    fail(ErrorKind::NumericalError, "incomplete beta continued fraction did not converge");
}

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        fail(ErrorKind::InvalidInput, "normal_quantile: p must be in (0, 1)");
    // Acklam's rational approximation followed by one Halley refinement.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

double log_normal_sf(double z) {
    if (z < 30.0)
        return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
    // Asymptotic series of the Mills ratio.
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_ibeta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0) || !(x >= 0.0 && x <= 1.0))
        fail(ErrorKind::InvalidInput, "log_ibeta: need a, b > 0 and 0 <= x <= 1");
    if (x == 0.0)
        return -std::numeric_limits<double>::infinity();
    if (x == 1.0)
        return 0.0;
    const double log_front =
        a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return log_front + std::log(betacf(a, b, x)) - std::log(a);
    const double log_other = log_front + std::log(betacf(b, a, 1.0 - x)) - std::log(b);
    return log1mexp(std::min(log_other, 0.0));
}

double log_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        fail(ErrorKind::InvalidInput, "log_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0)
        return 0.0;
    const double log_front = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a, x)
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int n = 0; n < kMaxIter; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * kEps)
                return log1mexp(std::min(log_front + std::log(sum), 0.0));
        }
        fail(ErrorKind::NumericalError, "incomplete gamma series did not converge");
    }
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return log_front + std::log(h);
    }
    fail(ErrorKind::NumericalError, "incomplete gamma continued fraction did not converge");
}

double t_to_neglog10p(double t, double df) {
    if (!(df > 0.0))
        fail(ErrorKind::InvalidInput, "t_to_neglog10p: df must be positive");
    if (!std::isfinite(t))
        fail(ErrorKind::InvalidInput, "t_to_neglog10p: t must be finite");
    if (t == 0.0)
        return 0.0;
    // two-sided p = I_{df/(df+t^2)}(df/2, 1/2)
    const double x = df / (df + t * t);
    return std::max(0.0, -log_ibeta(df / 2.0, 0.5, x) / kLn10);
}

double welch_df(double var_a, double n_a, double var_b, double n_b) {
    const double ua = var_a / n_a;
    const double ub = var_b / n_b;
    const double denom = ua * ua / (n_a - 1.0) + ub * ub / (n_b - 1.0);
    if (!(denom > 0.0))
        return n_a + n_b - 2.0;
    return (ua + ub) * (ua + ub) / denom;
}

double chi2_neglog10p(double statistic, double df) {
    if (!(df > 0.0))
        fail(ErrorKind::InvalidInput, "chi2_neglog10p: df must be positive");
    if (statistic <= 0.0)
        return 0.0;
    return std::max(0.0, -log_gamma_q(df / 2.0, statistic / 2.0) / kLn10);
}

double binomial_tail_neglog10p(std::int64_t successes, std::int64_t trials) {
    if (trials <= 0 || successes < 0 || successes > trials)
        fail(ErrorKind::InvalidInput, "binomial tail: need 0 <= k <= M, M > 0");
    if (successes == 0)
        return 0.0;
    const double m = static_cast<double>(trials);
    const double lg_m = std::lgamma(m + 1.0);
    // log-sum-exp of log C(M, i) for i = k..M
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(trials - successes + 1));
    for (std::int64_t i = successes; i <= trials; ++i) {
        const double di = static_cast<double>(i);
        terms.push_back(lg_m - std::lgamma(di + 1.0) - std::lgamma(m - di + 1.0));
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double acc = 0.0;
    for (double v : terms)
        acc += std::exp(v - top);
    const double log_p = top + std::log(acc) - m * std::numbers::ln2;
    return std::max(0.0, -log_p / kLn10);
}

} // namespace scadoe::stats
