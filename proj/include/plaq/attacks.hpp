#pragma once

#include <map>
#include <string>
#include <vector>

// Scenario-level stochastic models: scheduling distributions under the
// baseline and Sybil attacks, the floor-division symbol budget, and the
// disassociation block-failure probability.

namespace plaq::attacks {

// pmf over {0, 1, ..., n}
using CountPmf = std::vector<double>;
// pmf over allocated symbol budgets N_k (sparse support)
using NkPmf = std::map<int, double>;

struct FrameResourceModel {
    int n_frame = 288;
    std::vector<std::string> active_set;
    std::vector<std::string> sybil_set;  // disjoint from active
    double arrival_rate = 0.0;           // bits per frame per device

    void validate() const;
};

// Binomial(n_active, 1 - p_fa) pmf of the number of scheduled devices.
CountPmf baseline_sched_dist(int n_active, double p_fa);

// Poisson-binomial pmf of successfully launched Sybil IDs (independence
// approximation over the per-target missed-detection rates).
CountPmf sybil_success_dist(const std::vector<double>& md_rates);

// Distribution of |I_DTP| under a Sybil attack: discrete convolution.
CountPmf sched_dist_under_sybil(const CountPmf& baseline, const CountPmf& sybil);

// Pushes a pmf over *other* scheduled devices through c -> floor(n_frame/c)
// with the tagged device conditioned as scheduled (contenders = 1 + others).
NkPmf nk_dist(const CountPmf& others_pmf, int n_frame);

double pmf_mean(const CountPmf& pmf);
double nk_mean(const NkPmf& pmf);

// P(D_l = 1) = 1 - (1 - md_upper * p_attack)^{k_rc}.
double disassoc_block_prob(double md_upper, double p_attack, int k_rc);

struct DisassocModel {
    double p_attack = 0.0;
    int k_rc = 1;
    double p_block = 0.0;
};

}  // namespace plaq::attacks
