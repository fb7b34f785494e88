#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "plaq/channel.hpp"

// Frame-level Monte Carlo queueing simulator: the validation oracle for the
// analytical delay bounds, plus Monte Carlo estimators for the detection
// probabilities.

namespace plaq::sim {

using channel::DeviceChannelStats;

enum class Scenario {
    baseline,
    sybil,
    disassociation,
    no_pla_baseline,
    no_pla_disassociation,
};

struct SimConfig {
    Scenario scenario = Scenario::baseline;
    long n_frames = 1'000'000;
    double warmup_frac = 0.1;
    std::uint64_t seed = 0x5eed;
    int replications = 8;
    int threads = 1;
    int w_max = 200;

    DeviceChannelStats target;
    int n_other_active = 8;
    int n_frame = 288;
    double alpha = 0.0;  // bits per frame

    // PLA (ignored by the no-pla scenarios)
    double threshold = 0.0;
    double p_fa = 0.0;

    // attack
    std::vector<DeviceChannelStats> sybil_targets;  // feature-bank entries under attack
    std::optional<DeviceChannelStats> attacker;     // Eve's true channel
    double p_attack = 0.0;
    int k_rc = 1;

    void validate() const;
};

struct SimTrace {
    // violation_curve[w] = P(W > w) for w = 0..w_max, bit-weighted over
    // departed post-warmup bits; se is the across-replication standard error.
    std::vector<double> violation_curve;
    std::vector<double> se;
    double total_bits = 0.0;
    long frames_simulated = 0;
    // post-warmup mean backlog over the first and second half (stationarity)
    double mean_backlog_first_half = 0.0;
    double mean_backlog_second_half = 0.0;
};

SimTrace run_link_sim(const SimConfig& config);

// Monte Carlo estimates of the single- and two-message detection
// probabilities through the full channel-draw + discriminant path.
struct DetectionMcResult {
    long n = 0;
    long hits_fa = 0;   // d(h_legit) > T
    long hits_md = 0;   // d(h_eve) < T
    long hits_dom = 0;  // d(h_eve) < d(h_legit)
    long hits_l2 = 0;   // d(h_eve) < d(h_legit) and d(h_eve) < T

    double p_fa = 0.0, se_fa = 0.0;
    double p_md = 0.0, se_md = 0.0;
    double p_dom = 0.0, se_dom = 0.0;
    double p_l2 = 0.0, se_l2 = 0.0;
};

DetectionMcResult detection_mc(const DeviceChannelStats& legit, const DeviceChannelStats& attacker,
                               double threshold, long n_samples, std::uint64_t seed);

// Joint-draw estimate of E[K_Sybil]: one shared attacker realization per
// frame tested against every targeted feature-bank entry.
struct SybilMcResult {
    double mean_k = 0.0;
    double se = 0.0;
    long n_frames = 0;
};

SybilMcResult sybil_joint_mc(const std::vector<DeviceChannelStats>& targets,
                             const DeviceChannelStats& attacker, double threshold, long n_frames,
                             std::uint64_t seed);

}  // namespace plaq::sim
