#pragma once

#include <functional>
#include <limits>

#include "plaq/attacks.hpp"
#include "plaq/specfun.hpp"

// Stochastic-network-calculus delay-bound engine: Mellin transforms of the
// SNR-domain arrival and service processes, the steady-state kernel, the
// stability region, and minimization of the kernel over s.

namespace plaq::snc {

using specfun::RealTolerance;

// Scaled central chi-square approximation gamma ~ alpha_g * chi2_{k_g}.
struct GammaApproxParams {
    double alpha_g = 1.0;
    double k_g = 2.0;
};

// The proof's moment matching (alpha = Var/2E over gamma itself) is the
// default; the theorem statement's printed variant (with 1+E in place of E)
// is selectable.
enum class MomentMatching { proof, theorem };

GammaApproxParams gamma_approx_params(std::pair<double, double> moments,
                                      MomentMatching variant = MomentMatching::proof);

// Mellin transform M_{g(gamma)}(s) = E[(1 + alpha_g X)^{s-1}], X ~ chi2_{k_g},
// by the incomplete-gamma series. Terms are accumulated in signed log scale;
// the truncation rule requires three consecutive terms below rel_tol times
// the partial sum. When the alternating terms cancel past the point where
// the sum retains rel_tol accuracy (deeply negative s), the value is
// recomputed from the defining integral instead.
double mellin_g(double s, const GammaApproxParams& params, const RealTolerance& tol = {});

// Independent validator: adaptive quadrature of the defining integral.
double mellin_g_oracle(double s, const GammaApproxParams& params);

// E[log2(1 + alpha_g X)], X ~ chi2_{k_g} (quadrature).
double mean_log_rate(const GammaApproxParams& params);

// Corollary forms of the service-process Mellin transform.
double mellin_service_baseline(double s, double p_fa, int n_k, const GammaApproxParams& params,
                               const RealTolerance& tol = {});
double mellin_service_sybil(double s, double p_fa, const attacks::NkPmf& nk_pmf,
                            const GammaApproxParams& params, const RealTolerance& tol = {});
double mellin_service_disassoc(double s, double p_block, int k_rc, double baseline_mellin_at_s);

// M_A(s) = exp(alpha * timescale * (s-1)) for constant arrivals.
double mellin_arrival_const(double s, double alpha, int timescale = 1);

// One attack scenario, as the pair of Mellin transforms plus the kernel-step
// timescale (1 frame, or k_rc frames for the disassociation block process).
struct SncScenario {
    std::function<double(double)> arrival_mellin;
    std::function<double(double)> service_mellin;
    int timescale = 1;

    void validate() const;  // M_A(1) = M_S(1) = 1 within 1e-9
};

inline constexpr double kUnstable = std::numeric_limits<double>::infinity();

// Steady-state kernel M_S(1-s)^w / (1 - M_A(1+s) M_S(1-s)); +inf when the
// stability product is >= 1.
double steady_kernel(double s, int w, const SncScenario& scenario);

struct DelayBoundResult {
    int w = 0;
    double bound = 1.0;      // clamped to [0,1]
    double log_kernel = 0.0; // raw ln of the kernel at s_star
    double s_star = 0.0;
    bool stable = false;
};

// Minimizes the steady-state kernel over s: logarithmic 400-point grid on
// (1e-6, s_max) with golden-section refinement, where s_max is the largest
// stable s (bisection on the stability product).
DelayBoundResult delay_bound(int w, const SncScenario& scenario);

inline constexpr long kUnboundedDelay = std::numeric_limits<long>::max();

// Smallest w (in frames; kernel steps times timescale) with bound <= epsilon,
// by exponential search plus bisection. kUnboundedDelay when unstable.
long delay_guarantee(double epsilon, const SncScenario& scenario);

// Mean per-frame service E[s_k] = (1 - p_fa) E[N_k] E[log2(1+gamma)],
// optionally derated by a disassociation block-failure probability.
struct ServiceDescription {
    double p_fa = 0.0;
    attacks::NkPmf nk_pmf;
    GammaApproxParams gamma;
    double p_block = 0.0;
    int k_rc = 1;
};

double mean_service_rate(const ServiceDescription& svc);

// alpha = u * E[s_k] for a target utilization u in (0,1).
double utilization_arrival_rate(double u, const ServiceDescription& svc);

// Assembles the scenario (arrival + service Mellin transforms) for a given
// arrival rate in bits/frame.
SncScenario make_scenario(double alpha, const ServiceDescription& svc,
                          const RealTolerance& tol = {});

}  // namespace plaq::snc
