#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "plaq/channel.hpp"
#include "plaq/pla.hpp"
#include "plaq/sim.hpp"
#include "plaq/snc.hpp"

// Scenario configuration: JSON deployment and scenario files, the square-grid
// deployment generator, and the wiring from a parsed scenario to the pla /
// attacks / snc / sim machinery.

namespace plaq::scenario {

using nlohmann::json;

// ---- deployment file ----

struct GridSpec {
    int rows = 5;
    int cols = 5;
    double extent = 20.0;  // meters; grid spans [0, extent]^2
    int n_rx = 4;
    double delta_r = 0.5;
    double carrier_freq = 2.4e9;
    double rice_k_db = 6.0;
    double rice_k_e_db = 0.0;
    double rho = 0.0;
    double beta = 3.0;
    double snr_far_db = 15.0;  // mean link SNR (P*N_Rx) of the farthest device
    channel::Vector2d attacker_position{25.0, 0.0};
};

// 24-device layout: grid points minus the access point at the origin, ids
// D1..Dn in row-major order (x outer, y inner), array axis along y = -x.
channel::Deployment make_grid_deployment(const GridSpec& spec);

json deployment_to_json(const channel::Deployment& dep);
channel::Deployment deployment_from_json(const json& j);

// ---- scenario file ----

enum class AttackType { baseline, data_injection, sybil, disassociation };

struct EveSpec {
    std::optional<std::string> device;  // compromised device id
    std::optional<channel::Vector2d> position;
    std::optional<std::pair<double, double>> distance_aoa;  // (d_E, Phi_E)
    std::optional<double> rice_k_db;                        // overrides deployment attacker K
};

struct Scenario {
    channel::Deployment deployment;

    bool pla_enabled = true;
    std::optional<double> target_fa;   // exactly one of target_fa / threshold
    std::optional<double> threshold;

    AttackType attack = AttackType::baseline;
    EveSpec eve;
    std::vector<std::string> sybil_targets;  // explicit ids, or
    int n_sybil = 0;                         // first n inactive ids (excluding Eve)
    std::string target_device = "D12";
    double p_attack = 1.0;
    int k_rc = 4;

    std::vector<std::string> active_set;  // default: upper-right quadrant
    int n_frame = 288;
    std::optional<double> utilization;
    std::optional<double> alpha;
    std::string utilization_reference = "self";  // "self" | "pla"
    double epsilon = 1e-6;
    int w_min = 1, w_max = 30;
    snc::MomentMatching moment_matching = snc::MomentMatching::proof;

    bool sim_enabled = false;
    long sim_frames = 1'000'000;
    int sim_replications = 8;
    double sim_warmup_frac = 0.1;
    std::uint64_t seed = 0xD1CEu;
};

Scenario scenario_from_json(const json& j);
json scenario_to_json(const Scenario& sc);
Scenario load_scenario(const std::string& path);

// Dotted-path override, e.g. set(j, "snc.utilization", "0.9").
void apply_override(json& j, const std::string& key, const std::string& value);

// ---- resolution to the analytic machinery ----

struct Resolved {
    channel::DeviceChannelStats target;            // tagged device
    std::optional<channel::DeviceChannelStats> eve;
    pla::PlaDecisionModel pla;                     // threshold/p_fa (pla off -> p_fa 0, T inf)
    std::vector<std::string> sybil_ids;
    std::vector<double> sybil_md;                  // per-target missed-detection rates
    double md_l2_upper = 0.0;                      // disassociation: min(p_md, p_d), or 0.5 w/o pla
    int n_active = 0;
    snc::ServiceDescription service;               // for the scenario as configured
    double alpha = 0.0;                            // bits/frame
};

// Default active set when the scenario leaves it empty.
std::vector<std::string> default_active_set();

// Picks the first n inactive device ids (excluding Eve) in id order.
std::vector<std::string> pick_sybil_targets(const channel::Deployment& dep,
                                            const std::vector<std::string>& active,
                                            const std::optional<std::string>& eve_device, int n);

channel::DeviceChannelStats eve_stats(const Scenario& sc);

// Builds the service description for the scenario. `pla_on` false evaluates
// the unprotected variant (no false alarms, every Sybil id accepted, coin-flip
// disassociation resolution).
snc::ServiceDescription build_service(const Scenario& sc, bool pla_on);

// Full resolution; alpha follows the scenario's utilization_reference:
// "self" derives it from this scenario's own service, "pla" from the
// PLA-protected variant at the same attack point.
Resolved resolve(const Scenario& sc);

// Same, but forces the unprotected variant (keeping alpha per the reference).
Resolved resolve_without_pla(const Scenario& sc);

sim::SimConfig build_sim_config(const Scenario& sc, const Resolved& r, int threads);

}  // namespace plaq::scenario
