#include "plaq/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plaq/specfun.hpp"

namespace plaq::attacks {

void FrameResourceModel::validate() const {
    if (n_frame < 1) throw std::invalid_argument("FrameResourceModel: n_frame must be >= 1");
    if (arrival_rate < 0.0) throw std::invalid_argument("FrameResourceModel: arrival_rate must be >= 0");
    for (const auto& s : sybil_set)
        if (std::find(active_set.begin(), active_set.end(), s) != active_set.end())
            throw std::invalid_argument("FrameResourceModel: sybil set overlaps active set (" + s + ")");
}

CountPmf baseline_sched_dist(int n_active, double p_fa) {
    if (n_active < 1) throw std::invalid_argument("baseline_sched_dist: n_active must be >= 1");
    if (!(p_fa >= 0.0 && p_fa <= 1.0))
        throw std::invalid_argument("baseline_sched_dist: p_fa must lie in [0,1]");
    return specfun::poisson_binomial_pmf(std::vector<double>(n_active, 1.0 - p_fa));
}

CountPmf sybil_success_dist(const std::vector<double>& md_rates) {
    return specfun::poisson_binomial_pmf(md_rates);
}

CountPmf sched_dist_under_sybil(const CountPmf& baseline, const CountPmf& sybil) {
    if (baseline.empty() || sybil.empty())
        throw std::invalid_argument("sched_dist_under_sybil: empty pmf");
    CountPmf out(baseline.size() + sybil.size() - 1, 0.0);
    for (std::size_t i = 0; i < baseline.size(); ++i)
        for (std::size_t j = 0; j < sybil.size(); ++j) out[i + j] += baseline[i] * sybil[j];
    return out;
}

NkPmf nk_dist(const CountPmf& others_pmf, int n_frame) {
    if (n_frame < 1) throw std::invalid_argument("nk_dist: n_frame must be >= 1");
    NkPmf out;
    for (std::size_t others = 0; others < others_pmf.size(); ++others) {
        const double p = others_pmf[others];
        if (p <= 0.0) continue;
        const int contenders = 1 + static_cast<int>(others);
        out[n_frame / contenders] += p;
    }
    return out;
}

double pmf_mean(const CountPmf& pmf) {
    double m = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) m += static_cast<double>(k) * pmf[k];
    return m;
}

double nk_mean(const NkPmf& pmf) {
    double m = 0.0;
    for (const auto& [n, p] : pmf) m += n * p;
    return m;
}

double disassoc_block_prob(double md_upper, double p_attack, int k_rc) {
    if (!(md_upper >= 0.0 && md_upper <= 1.0))
        throw std::invalid_argument("disassoc_block_prob: md_upper must lie in [0,1]");
    if (!(p_attack >= 0.0 && p_attack <= 1.0))
        throw std::invalid_argument("disassoc_block_prob: p_attack must lie in [0,1]");
    if (k_rc < 1) throw std::invalid_argument("disassoc_block_prob: k_rc must be >= 1");
    return 1.0 - std::pow(1.0 - md_upper * p_attack, k_rc);
}

}  // namespace plaq::attacks
