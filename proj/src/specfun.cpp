#include "plaq/specfun.hpp"

#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

namespace plaq::specfun {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// P(a,x) via the lower series, valid and fast for x < a+1.
double gamma_p_series(double a, double x) {
    double term = 1.0, sum = 1.0, ap = a;
    for (int i = 0; i < 600; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(a * std::log(x) - x - std::lgamma(a + 1.0));
}

// Q(a,x) via the Lentz continued fraction, valid for x >= a+1-ish.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Gamma(s,x) = mantissa * exp(exponent); the continued fraction without the
// 1/Gamma(s) normalization, usable for any real s when x is not small.
std::pair<double, double> upper_gamma_cf_scaled(double s, double x) {
    double b = x + 1.0 - s;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 2000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return {h, s * std::log(x) - x};
}

// E1(x) = Gamma(0,x) by its power series, for 0 < x < 1.5.
double expint_e1(double x) {
    constexpr double kEuler = 0.57721566490153286060651209;
    double sum = -kEuler - std::log(x);
    double term = 1.0;
    for (int k = 1; k <= 100; ++k) {
        term *= -x / k;
        sum -= term / k;
        if (std::abs(term / k) < std::abs(sum) * kEps) break;
    }
    return sum;
}

// Gamma(s,x) as (mantissa, exponent) for any real s, x > 0.
std::pair<double, double> upper_gamma_scaled(double s, double x) {
    if (s > 0.0) {
        if (x >= s + 1.0) return upper_gamma_cf_scaled(s, x);
        const double q = 1.0 - gamma_p_series(s, x);
        if (q > 1e-12) return {q, std::lgamma(s)};
        return upper_gamma_cf_scaled(s, x);  // Q underflow region
    }
    if (x >= 1.5) return upper_gamma_cf_scaled(s, x);

    // x < 1.5, s <= 0: downward recurrence from an anchor in (0,1], with
    // Gamma(0,x) = E1(x) when the recursion passes through s = 0.
    int n = static_cast<int>(std::floor(-s)) + 1;
    double cur;
    double v, e;
    const double s0 = s + n;
    if (s0 == 1.0) {  // s is a nonpositive integer
        v = expint_e1(x);
        e = 0.0;
        cur = 0.0;
        n -= 1;
    } else {
        std::tie(v, e) = upper_gamma_scaled(s0, x);
        cur = s0;
    }
    const double lx = std::log(x);
    for (int i = 0; i < n; ++i) {
        cur -= 1.0;
        const double p = std::exp(cur * lx - x - e);
        v = (v - p) / cur;
        if (v != 0.0 && (std::abs(v) > 1e100 || std::abs(v) < 1e-100)) {
            const double shift = std::log(std::abs(v));
            e += shift;
            v = std::copysign(1.0, v);
        }
    }
    return {v, e};
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("ln_gamma: requires x > 0");
    return std::lgamma(x);
}

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_p: requires a > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("gamma_p: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::invalid_argument("gamma_q: requires a > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("gamma_q: requires x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double upper_incomplete_gamma(double s, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("upper_incomplete_gamma: requires x > 0");
    const auto [v, e] = upper_gamma_scaled(s, x);
    if (e > 700.0) throw std::overflow_error("upper_incomplete_gamma: result overflows");
    return v * std::exp(e);
}

double log_upper_incomplete_gamma(double s, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("log_upper_incomplete_gamma: requires x > 0");
    const auto [v, e] = upper_gamma_scaled(s, x);
    return std::log(v) + e;
}

double chi2_cdf(int k_dof, double x) {
    if (k_dof < 1) throw std::invalid_argument("chi2_cdf: requires k_dof >= 1");
    if (!(x >= 0.0)) throw std::invalid_argument("chi2_cdf: requires x >= 0");
    return gamma_p(0.5 * k_dof, 0.5 * x);
}

namespace {

// ln P(a,x), usable when the value underflows a double.
double log_gamma_p(double a, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (x < a + 1.0) {
        double term = 1.0, sum = 1.0, ap = a;
        for (int i = 0; i < 600; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (term < sum * kEps) break;
        }
        return std::log(sum) + a * std::log(x) - x - std::lgamma(a + 1.0);
    }
    const double q = gamma_q_cf(a, x);
    return std::log1p(-q);
}

// Log-domain fallback: logsumexp over ln w_j + ln P_j with the j-window
// spanning both the Poisson mode and j = 0 (the deep left tail is carried by
// small j even when the weights there are tiny).
double noncentral_chi2_cdf_log(double a0, double lam, double y) {
    const double spread = 10.0 * std::sqrt(lam) + 20.0;
    const std::size_t j_hi = static_cast<std::size_t>(lam + spread);
    double max_lt = -std::numeric_limits<double>::infinity();
    std::vector<double> lts;
    lts.reserve(j_hi + 1);
    for (std::size_t j = 0; j <= j_hi; ++j) {
        const double lw = -lam + j * std::log(lam) - std::lgamma(static_cast<double>(j) + 1.0);
        const double lp = log_gamma_p(a0 + static_cast<double>(j), y);
        const double lt = lw + lp;
        lts.push_back(lt);
        if (lt > max_lt) max_lt = lt;
    }
    if (!std::isfinite(max_lt)) return 0.0;
    double sum = 0.0;
    for (double lt : lts) sum += std::exp(lt - max_lt);
    const double lf = max_lt + std::log(sum);
    return lf < -745.0 ? 0.0 : std::exp(lf);
}

}  // namespace

double noncentral_chi2_cdf(int k_dof, double nc, double x) {
    if (k_dof < 1) throw std::invalid_argument("noncentral_chi2_cdf: requires k_dof >= 1");
    if (!(nc >= 0.0)) throw std::invalid_argument("noncentral_chi2_cdf: requires nc >= 0");
    if (!(x >= 0.0)) throw std::invalid_argument("noncentral_chi2_cdf: requires x >= 0");
    if (x == 0.0) return 0.0;
    if (nc == 0.0) return chi2_cdf(k_dof, x);

    const double a0 = 0.5 * k_dof;
    const double lam = 0.5 * nc;
    const double y = 0.5 * x;
    constexpr double kAbsTol = 1e-14;

    // Start at the Poisson mode; extend up while the remaining tail matters
    // and down to j = 0. Central CDFs advance by the stable recurrence
    // P(a+1,x) = P(a,x) - x^a e^{-x} / Gamma(a+1).
    const auto j0 = static_cast<long>(lam);
    const double lw0 = -lam + j0 * std::log(lam) - std::lgamma(static_cast<double>(j0) + 1.0);
    const double w0 = std::exp(lw0);
    if (w0 == 0.0) return noncentral_chi2_cdf_log(a0, lam, y);

    const double p0 = gamma_p(a0 + static_cast<double>(j0), y);
    const double lt0 = (a0 + j0) * std::log(y) - y - std::lgamma(a0 + j0 + 1.0);
    double total = w0 * p0;

    double w = w0, p = p0, lt = lt0;
    const double ly = std::log(y);
    for (long j = j0 + 1;; ++j) {
        p -= std::exp(lt);  // t at a0 + j - 1
        if (p < 0.0) p = 0.0;
        w *= lam / static_cast<double>(j);
        total += w * p;
        lt += ly - std::log(a0 + static_cast<double>(j));
        if (w * p < kAbsTol && j > lam + 10.0 * std::sqrt(lam) + 10.0) break;
        if (j > j0 + 100000) break;
    }
    w = w0;
    p = p0;
    lt = lt0;
    for (long j = j0 - 1; j >= 0; --j) {
        lt -= ly - std::log(a0 + static_cast<double>(j) + 1.0);
        p += std::exp(lt);  // t at a0 + j
        if (p > 1.0) p = 1.0;
        w *= static_cast<double>(j + 1) / lam;
        total += w * p;
        if (w < kAbsTol && j < lam - 10.0 * std::sqrt(lam) - 10.0) break;
    }

    if (total < 1e-280) return noncentral_chi2_cdf_log(a0, lam, y);
    return std::min(1.0, total);
}

double generalized_binomial(double a, int m) {
    if (m < 0) throw std::invalid_argument("generalized_binomial: requires m >= 0");
    double c = 1.0;
    for (int i = 0; i < m; ++i) c *= (a - i) / (i + 1.0);
    if (!std::isfinite(c)) throw std::overflow_error("generalized_binomial: overflow");
    return c;
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs) {
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("poisson_binomial_pmf: probabilities must lie in [0,1]");
    std::vector<double> pmf{1.0};
    for (double p : probs) {
        std::vector<double> next(pmf.size() + 1, 0.0);
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            next[k] += pmf[k] * (1.0 - p);
            next[k + 1] += pmf[k] * p;
        }
        pmf = std::move(next);
    }
    return pmf;
}

}  // namespace plaq::specfun
