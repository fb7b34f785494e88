#include "plaq/snc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "plaq/quadrature.hpp"

namespace plaq::snc {

namespace {
constexpr double kLn2 = std::numbers::ln2;
}

GammaApproxParams gamma_approx_params(std::pair<double, double> moments, MomentMatching variant) {
    const auto [mean, var] = moments;
    if (!(mean > 0.0)) throw std::invalid_argument("gamma_approx_params: mean must be > 0");
    if (!(var > 0.0))
        throw std::invalid_argument(
            "gamma_approx_params: var must be > 0 (pure LOS uses the deterministic path)");
    GammaApproxParams p;
    if (variant == MomentMatching::proof) {
        p.alpha_g = var / (2.0 * mean);
        p.k_g = 2.0 * mean * mean / var;
    } else {
        p.alpha_g = var / (2.0 * (1.0 + mean));
        p.k_g = 2.0 * (1.0 + mean) * (1.0 + mean) / var;
    }
    return p;
}

namespace {

// log-density integrand for the defining integral; used by the oracle and as
// the cancellation fallback.
double mellin_integral(double s, double alpha_g, double k_g, double rel_tol) {
    const double a0 = 0.5 * k_g;
    const double lognorm = a0 * std::log(2.0) + std::lgamma(a0);
    const auto f = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double lg = (s - 1.0) * std::log1p(alpha_g * x) + (a0 - 1.0) * std::log(x) -
                          0.5 * x - lognorm;
        return lg < -745.0 ? 0.0 : std::exp(lg);
    };
    // split: bulk of chi2 mass, then the tail
    const double x_hi = k_g + 60.0 * std::sqrt(2.0 * k_g) + 220.0;
    double v = quadrature::integrate(f, 0.0, x_hi, rel_tol);
    if (s > 1.0) {  // growing integrand: add tail panels until negligible
        double a = x_hi;
        for (int i = 0; i < 40; ++i) {
            const double b = a * 2.0;
            const double t = quadrature::integrate(f, a, b, rel_tol);
            v += t;
            if (std::abs(t) < rel_tol * std::abs(v)) break;
            a = b;
        }
    }
    return v;
}

}  // namespace

double mellin_g(double s, const GammaApproxParams& params, const RealTolerance& tol) {
    tol.validate();
    if (!(params.alpha_g > 0.0 && params.k_g > 0.0))
        throw std::invalid_argument("mellin_g: invalid approximation parameters");
    const double ag = params.alpha_g;
    const double kp = 0.5 * (params.k_g - 2.0);  // k'
    const double x = 1.0 / (2.0 * ag);
    const double log2a = std::log(2.0 * ag);
    const double log_pref = x + (s - 1.0) * log2a - std::lgamma(0.5 * params.k_g);

    long double sum = 0.0L;
    long double abs_sum = 0.0L;
    double log_c = 0.0;  // ln |C(k', m)|
    double sign_c = 1.0;
    int consecutive_small = 0;
    bool converged = false;

    for (std::size_t m = 0; m < tol.max_terms; ++m) {
        if (m > 0) {
            const double factor = (kp - static_cast<double>(m - 1)) / static_cast<double>(m);
            if (factor == 0.0) {  // integer k': the binomial series terminates exactly
                converged = true;
                break;
            }
            log_c += std::log(std::abs(factor));
            sign_c = std::copysign(sign_c, sign_c * factor);
        }
        const double lg =
            specfun::log_upper_incomplete_gamma(s - static_cast<double>(m) + kp, x);
        const double log_term = log_pref + log_c - static_cast<double>(m) * log2a + lg;
        const double sign = (m % 2 == 0) ? sign_c : -sign_c;
        const double term = sign * std::exp(log_term);
        sum += term;
        abs_sum += std::abs(term);
        if (std::abs(term) < tol.rel_tol * std::abs(static_cast<double>(sum))) {
            if (++consecutive_small >= 3) {
                converged = true;
                break;
            }
        } else {
            consecutive_small = 0;
        }
    }
    if (!converged)
        throw specfun::NonConvergenceError("mellin_g: series did not converge within max_terms");

    const double value = static_cast<double>(sum);
    // Alternating-term cancellation destroys the sum long before it matters
    // to the kernel only at deeply negative s; recompute from the defining
    // integral when the surviving digits are insufficient.
    const double cancel = static_cast<double>(abs_sum) * 1e-17;
    if (!(std::abs(value) > cancel / tol.rel_tol) || value <= 0.0)
        return mellin_integral(s, ag, params.k_g, 1e-9);
    return value;
}

double mellin_g_oracle(double s, const GammaApproxParams& params) {
    if (!(params.alpha_g > 0.0 && params.k_g > 0.0))
        throw std::invalid_argument("mellin_g_oracle: invalid approximation parameters");
    return mellin_integral(s, params.alpha_g, params.k_g, 1e-10);
}

double mean_log_rate(const GammaApproxParams& params) {
    const double a0 = 0.5 * params.k_g;
    const double lognorm = a0 * std::log(2.0) + std::lgamma(a0);
    const auto f = [&](double x) {
        if (x <= 0.0) return 0.0;
        const double lg = (a0 - 1.0) * std::log(x) - 0.5 * x - lognorm;
        return lg < -745.0 ? 0.0 : std::log2(1.0 + params.alpha_g * x) * std::exp(lg);
    };
    const double x_hi = params.k_g + 60.0 * std::sqrt(2.0 * params.k_g) + 220.0;
    return quadrature::integrate(f, 0.0, x_hi, 1e-10);
}

double mellin_service_baseline(double s, double p_fa, int n_k, const GammaApproxParams& params,
                               const RealTolerance& tol) {
    if (n_k < 0) throw std::invalid_argument("mellin_service_baseline: n_k must be >= 0");
    if (!(p_fa >= 0.0 && p_fa <= 1.0))
        throw std::invalid_argument("mellin_service_baseline: p_fa must lie in [0,1]");
    if (p_fa == 1.0) return 1.0;
    return (1.0 - p_fa) * mellin_g(1.0 + n_k * (s - 1.0) / kLn2, params, tol) + p_fa;
}

double mellin_service_sybil(double s, double p_fa, const attacks::NkPmf& nk_pmf,
                            const GammaApproxParams& params, const RealTolerance& tol) {
    if (nk_pmf.empty()) throw std::invalid_argument("mellin_service_sybil: empty N_k pmf");
    if (!(p_fa >= 0.0 && p_fa <= 1.0))
        throw std::invalid_argument("mellin_service_sybil: p_fa must lie in [0,1]");
    if (p_fa == 1.0) return 1.0;
    double mix = 0.0;
    for (const auto& [n, p] : nk_pmf)
        mix += p * mellin_g(1.0 + n * (s - 1.0) / kLn2, params, tol);
    return (1.0 - p_fa) * mix + p_fa;
}

double mellin_service_disassoc(double s, double p_block, int k_rc, double baseline_mellin_at_s) {
    if (!(p_block >= 0.0 && p_block <= 1.0))
        throw std::invalid_argument("mellin_service_disassoc: p_block must lie in [0,1]");
    if (k_rc < 1) throw std::invalid_argument("mellin_service_disassoc: k_rc must be >= 1");
    (void)s;
    return (1.0 - p_block) * std::pow(baseline_mellin_at_s, k_rc) + p_block;
}

double mellin_arrival_const(double s, double alpha, int timescale) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("mellin_arrival_const: alpha must be >= 0");
    if (timescale < 1) throw std::invalid_argument("mellin_arrival_const: timescale must be >= 1");
    return std::exp(alpha * timescale * (s - 1.0));
}

void SncScenario::validate() const {
    if (!arrival_mellin || !service_mellin)
        throw std::invalid_argument("SncScenario: missing Mellin transform");
    if (timescale < 1) throw std::invalid_argument("SncScenario: timescale must be >= 1");
    if (std::abs(arrival_mellin(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument("SncScenario: M_A(1) != 1");
    if (std::abs(service_mellin(1.0) - 1.0) > 1e-9)
        throw std::invalid_argument("SncScenario: M_S(1) != 1");
}

namespace {

// ln of the stability product M_A(1+s) M_S(1-s); -inf when the service
// transform has fully underflowed.
double log_stability(double s, const SncScenario& sc) {
    const double ms = sc.service_mellin(1.0 - s);
    if (!(ms > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(sc.arrival_mellin(1.0 + s)) + std::log(ms);
}

double log_kernel(double s, int w, const SncScenario& sc) {
    const double ms = sc.service_mellin(1.0 - s);
    if (!(ms > 0.0)) return -std::numeric_limits<double>::infinity();
    const double lv = std::log(sc.arrival_mellin(1.0 + s)) + std::log(ms);
    if (lv >= 0.0) return std::numeric_limits<double>::infinity();
    return w * std::log(ms) - std::log1p(-std::exp(lv));
}

struct StableRange {
    double lo = 0.0, hi = 0.0;
    bool stable = false;
};

StableRange stable_range(const SncScenario& sc) {
    StableRange r;
    double lo = 1e-6;
    if (log_stability(lo, sc) >= 0.0) {
        bool found = false;
        for (double s : {1e-7, 1e-8, 1e-9}) {
            if (log_stability(s, sc) < 0.0) {
                lo = s;
                found = true;
                break;
            }
        }
        if (!found) return r;  // unstable: product >= 1 for all probed s
    }
    r.stable = true;
    r.lo = lo;
    double hi = std::max(lo * 2.0, 1e-4);
    while (log_stability(hi, sc) < 0.0 && hi < 1e4) hi *= 2.0;
    if (hi >= 1e4) {
        r.hi = 1e4;
        return r;
    }
    double a = 0.5 * hi, b = hi;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (a + b);
        if (log_stability(mid, sc) < 0.0)
            a = mid;
        else
            b = mid;
        if (b - a < 1e-12 * b) break;
    }
    r.hi = a;
    return r;
}

}  // namespace

double steady_kernel(double s, int w, const SncScenario& scenario) {
    if (!(s > 0.0)) throw std::invalid_argument("steady_kernel: requires s > 0");
    if (w < 0) throw std::invalid_argument("steady_kernel: requires w >= 0");
    const double lk = log_kernel(s, w, scenario);
    if (lk == std::numeric_limits<double>::infinity()) return kUnstable;
    return lk < -745.0 ? 0.0 : std::exp(lk);
}

DelayBoundResult delay_bound(int w, const SncScenario& scenario) {
    if (w < 0) throw std::invalid_argument("delay_bound: requires w >= 0");
    DelayBoundResult res;
    res.w = w;
    const StableRange r = stable_range(scenario);
    if (!r.stable) {
        res.bound = 1.0;
        res.log_kernel = std::numeric_limits<double>::infinity();
        return res;
    }
    res.stable = true;

    constexpr int kGrid = 400;
    const double llo = std::log(r.lo), lhi = std::log(r.hi * (1.0 - 1e-12));
    double best = std::numeric_limits<double>::infinity(), best_s = r.lo;
    int best_i = 0;
    for (int i = 0; i < kGrid; ++i) {
        const double s = std::exp(llo + (lhi - llo) * i / (kGrid - 1));
        const double v = log_kernel(s, w, scenario);
        if (v < best) {
            best = v;
            best_s = s;
            best_i = i;
        }
    }
    // golden-section refinement between the grid neighbors of the minimum
    double a = std::exp(llo + (lhi - llo) * std::max(0, best_i - 1) / (kGrid - 1));
    double b = std::exp(llo + (lhi - llo) * std::min(kGrid - 1, best_i + 1) / (kGrid - 1));
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = log_kernel(x1, w, scenario), f2 = log_kernel(x2, w, scenario);
    for (int i = 0; i < 80; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = log_kernel(x1, w, scenario);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = log_kernel(x2, w, scenario);
        }
        if (b - a < 1e-12 * b) break;
    }
    if (f1 < best) {
        best = f1;
        best_s = x1;
    }
    if (f2 < best) {
        best = f2;
        best_s = x2;
    }

    res.s_star = best_s;
    res.log_kernel = best;
    res.bound = best >= 0.0 ? 1.0 : (best < -745.0 ? 0.0 : std::exp(best));
    return res;
}

long delay_guarantee(double epsilon, const SncScenario& scenario) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("delay_guarantee: epsilon must lie in (0,1]");
    DelayBoundResult b0 = delay_bound(0, scenario);
    if (!b0.stable) return kUnboundedDelay;
    if (b0.bound <= epsilon) return 0;

    int w = 1;
    for (;;) {
        const DelayBoundResult b = delay_bound(w, scenario);
        if (b.bound <= epsilon) break;
        if (w > (1 << 22)) return kUnboundedDelay;
        w *= 2;
    }
    int lo = w / 2, hi = w;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        if (delay_bound(mid, scenario).bound <= epsilon)
            hi = mid;
        else
            lo = mid;
    }
    return static_cast<long>(hi) * scenario.timescale;
}

double mean_service_rate(const ServiceDescription& svc) {
    if (svc.nk_pmf.empty()) throw std::invalid_argument("mean_service_rate: empty N_k pmf");
    const double en = attacks::nk_mean(svc.nk_pmf);
    const double rate = (1.0 - svc.p_block) * (1.0 - svc.p_fa) * en * mean_log_rate(svc.gamma);
    return rate;
}

double utilization_arrival_rate(double u, const ServiceDescription& svc) {
    if (!(u > 0.0 && u < 1.0))
        throw std::invalid_argument("utilization_arrival_rate: u must lie in (0,1)");
    const double es = mean_service_rate(svc);
    if (!(es > 0.0)) throw std::runtime_error("utilization_arrival_rate: degenerate zero service");
    return u * es;
}

SncScenario make_scenario(double alpha, const ServiceDescription& svc, const RealTolerance& tol) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("make_scenario: alpha must be >= 0");
    SncScenario sc;
    sc.timescale = svc.k_rc;
    sc.arrival_mellin = [alpha, ts = svc.k_rc](double s) {
        return mellin_arrival_const(s, alpha, ts);
    };
    sc.service_mellin = [svc, tol](double s) {
        const double frame = mellin_service_sybil(s, svc.p_fa, svc.nk_pmf, svc.gamma, tol);
        if (svc.k_rc == 1 && svc.p_block == 0.0) return frame;
        return mellin_service_disassoc(s, svc.p_block, svc.k_rc, frame);
    };
    return sc;
}

}  // namespace plaq::snc
