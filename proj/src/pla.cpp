#include "plaq/pla.hpp"

#include <cmath>
#include <stdexcept>

#include "plaq/specfun.hpp"

namespace plaq::pla {

double discriminant(const VectorXcd& feature_mean, const MatrixXcd& feature_cov,
                    const VectorXcd& observed) {
    if (feature_mean.size() != observed.size() || feature_cov.rows() != feature_mean.size() ||
        feature_cov.cols() != feature_mean.size())
        throw std::invalid_argument("discriminant: dimension mismatch");
    Eigen::LLT<MatrixXcd> llt(feature_cov);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("discriminant: covariance is singular or not PD");
    const VectorXcd diff = observed - feature_mean;
    return 2.0 * diff.dot(llt.solve(diff)).real();
}

Discriminant::Discriminant(const DeviceChannelStats& stats)
    : mean_(stats.mean), llt_(stats.covariance) {
    if (llt_.info() != Eigen::Success)
        throw std::invalid_argument("Discriminant: covariance is singular or not PD");
}

double Discriminant::operator()(const VectorXcd& observed) const {
    const VectorXcd diff = observed - mean_;
    // 2 diff^H Cov^-1 diff = 2 || L^-1 diff ||^2
    const VectorXcd y = llt_.matrixL().solve(diff);
    return 2.0 * y.squaredNorm();
}

double false_alarm_rate(double threshold, int n_rx) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("false_alarm_rate: requires T >= 0");
    if (n_rx < 1) throw std::invalid_argument("false_alarm_rate: requires n_rx >= 1");
    return 1.0 - specfun::chi2_cdf(2 * n_rx, threshold);
}

double threshold_for_fa(double target_fa, int n_rx) {
    if (!(target_fa > 0.0 && target_fa < 1.0))
        throw std::invalid_argument("threshold_for_fa: target must lie in (0,1)");
    if (n_rx < 1) throw std::invalid_argument("threshold_for_fa: requires n_rx >= 1");
    const double want = 1.0 - target_fa;  // CDF value at T
    double lo = 0.0, hi = 1.0;
    while (specfun::chi2_cdf(2 * n_rx, hi) < want) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (specfun::chi2_cdf(2 * n_rx, mid) < want)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

PlaDecisionModel model_for_fa(double target_fa, int n_rx) {
    PlaDecisionModel m;
    m.n_rx = n_rx;
    m.threshold = threshold_for_fa(target_fa, n_rx);
    m.p_fa = false_alarm_rate(m.threshold, n_rx);
    return m;
}

ImpersonationParams impersonation_params(const DeviceChannelStats& legit,
                                         const DeviceChannelStats& attacker) {
    if (legit.n_rx() != attacker.n_rx())
        throw std::invalid_argument("impersonation_params: antenna count mismatch");

    // A = Cov * (1+K)/P must agree between the two parties.
    const double sl = (1.0 + legit.rice_k) / legit.power;
    const double sa = (1.0 + attacker.rice_k) / attacker.power;
    const double mismatch = (legit.covariance * sl - attacker.covariance * sa).cwiseAbs().maxCoeff();
    if (mismatch > 1e-8)
        throw std::invalid_argument(
            "impersonation_params: attacker covariance is not of the scaled legitimate form");

    ImpersonationParams p;
    p.n_rx = legit.n_rx();
    p.lambda = attacker.power * (1.0 + legit.rice_k) /
               (legit.power * (1.0 + attacker.rice_k));
    Eigen::LLT<MatrixXcd> llt(attacker.covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("impersonation_params: attacker covariance not PD");
    const VectorXcd diff = attacker.mean - legit.mean;
    p.nu = 2.0 * diff.dot(llt.solve(diff)).real();
    if (p.nu < 0.0) p.nu = 0.0;
    return p;
}

double missed_detection_rate(double threshold, const ImpersonationParams& params) {
    if (!(threshold >= 0.0)) throw std::invalid_argument("missed_detection_rate: requires T >= 0");
    if (!(params.lambda > 0.0)) throw std::invalid_argument("missed_detection_rate: lambda must be > 0");
    return specfun::noncentral_chi2_cdf(2 * params.n_rx, params.nu, threshold / params.lambda);
}

namespace {

// log objective of the Chernoff bound; base (1-2t)(1+2 lambda t) > 0 on (0, 1/2).
double log_chernoff_objective(double t, double lambda, double nu, int n_rx) {
    const double base = (1.0 - 2.0 * t) * (1.0 + 2.0 * lambda * t);
    return -n_rx * std::log(base) - nu * lambda * t / (1.0 + 2.0 * lambda * t);
}

}  // namespace

double chernoff_pd(const ImpersonationParams& params) {
    if (!(params.lambda > 0.0)) throw std::invalid_argument("chernoff_pd: lambda must be > 0");
    if (!(params.nu >= 0.0)) throw std::invalid_argument("chernoff_pd: nu must be >= 0");
    const double lam = params.lambda, nu = params.nu;
    const int n = params.n_rx;

    constexpr int kGrid = 200;
    constexpr double kLo = 1e-9, kHi = 0.5 - 1e-9;
    double best_t = kLo, best = log_chernoff_objective(kLo, lam, nu, n);
    for (int i = 1; i < kGrid; ++i) {
        const double t = kLo + (kHi - kLo) * i / (kGrid - 1);
        const double v = log_chernoff_objective(t, lam, nu, n);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    // golden-section refinement around the grid minimum
    const double step = (kHi - kLo) / (kGrid - 1);
    double a = std::max(kLo, best_t - step), b = std::min(kHi, best_t + step);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = log_chernoff_objective(x1, lam, nu, n);
    double f2 = log_chernoff_objective(x2, lam, nu, n);
    for (int i = 0; i < 80; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = log_chernoff_objective(x1, lam, nu, n);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = log_chernoff_objective(x2, lam, nu, n);
        }
    }
    best = std::min(best, std::min(f1, f2));
    return std::min(1.0, std::exp(best));
}

MdL2Bounds md_l2_bounds(double threshold, const ImpersonationParams& params) {
    const double p_md = missed_detection_rate(threshold, params);
    const double p_fa = false_alarm_rate(threshold, params.n_rx);
    MdL2Bounds b;
    b.lower = p_fa * p_md;
    b.upper = std::min(p_md, chernoff_pd(params));
    if (b.upper < b.lower) b.upper = b.lower;  // guard numeric noise at extremes
    return b;
}

}  // namespace plaq::pla
