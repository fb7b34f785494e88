#pragma once

#include <Eigen/Dense>

#include "plaq/channel.hpp"

// GLRT authentication: discriminant statistic, threshold calibration, false
// alarm / missed detection rates, the Chernoff bound on two-message
// confusion, and the L=2 missed-detection sandwich.

namespace plaq::pla {

using channel::DeviceChannelStats;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

// Threshold test d(h) <> T with p_fa = 1 - F_{chi2_{2 n_rx}}(T).
struct PlaDecisionModel {
    double threshold = 0.0;
    int n_rx = 1;
    double p_fa = 1.0;
};

// Distribution of the discriminant under impersonation:
// d_i(h_E) ~ lambda * chi2_{2 n_rx}(nu).
struct ImpersonationParams {
    double lambda = 1.0;
    double nu = 0.0;
    int n_rx = 1;
};

// d(h) = 2 (h - m)^H Cov^{-1} (h - m). Requires strictly PD covariance.
double discriminant(const VectorXcd& feature_mean, const MatrixXcd& feature_cov,
                    const VectorXcd& observed);

// Precomputed-factor form for tight loops (simulator, Monte Carlo oracles).
class Discriminant {
  public:
    explicit Discriminant(const DeviceChannelStats& stats);
    double operator()(const VectorXcd& observed) const;

  private:
    VectorXcd mean_;
    Eigen::LLT<MatrixXcd> llt_;
};

double false_alarm_rate(double threshold, int n_rx);

// Inverse of false_alarm_rate in T, by bracketed bisection on the CDF.
double threshold_for_fa(double target_fa, int n_rx);

PlaDecisionModel model_for_fa(double target_fa, int n_rx);

// (lambda, nu) per the printed formulas. The attacker covariance must be of
// the scaled form Cov_E = (P_E / (1 + K_E)) A with the same A as the
// legitimate device; anything else is rejected.
ImpersonationParams impersonation_params(const DeviceChannelStats& legit,
                                         const DeviceChannelStats& attacker);

// F_{chi2_{2 n_rx}(nu)}(T / lambda).
double missed_detection_rate(double threshold, const ImpersonationParams& params);

// Chernoff bound on P(d(h_E) < d(h_i)): minimum over t in (0, 1/2) of
// (1 + 2(lambda-1)t - 4 lambda t^2)^{-n_rx} exp(-nu lambda t / (1 + 2 lambda t)),
// evaluated in log domain on a grid with golden-section refinement and
// clamped to [0, 1].
double chernoff_pd(const ImpersonationParams& params);

struct MdL2Bounds {
    double lower = 0.0;  // p_fa * p_md
    double upper = 1.0;  // min(p_md, chernoff_pd)
};

MdL2Bounds md_l2_bounds(double threshold, const ImpersonationParams& params);

}  // namespace plaq::pla
