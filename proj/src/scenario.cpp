#include "plaq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace plaq::scenario {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

channel::Deployment make_grid_deployment(const GridSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1)
        throw std::invalid_argument("make_grid_deployment: grid must be at least 1x1");
    channel::Deployment dep;
    dep.array.n_rx = spec.n_rx;
    dep.array.delta_r = spec.delta_r;
    dep.array.carrier_freq = spec.carrier_freq;
    dep.array.orientation = channel::Vector2d{1.0, -1.0} / std::numbers::sqrt2;
    dep.rice_k = db_to_linear(spec.rice_k_db);
    dep.corr = spec.rho;

    const double dx = spec.cols > 1 ? spec.extent / (spec.cols - 1) : 0.0;
    const double dy = spec.rows > 1 ? spec.extent / (spec.rows - 1) : 0.0;
    int idx = 1;
    double d_max = 0.0;
    for (int i = 0; i < spec.rows; ++i) {
        for (int j = 0; j < spec.cols; ++j) {
            const channel::Vector2d pos{i * dx, j * dy};
            if (pos.norm() == 0.0) continue;  // access point sits at the origin
            dep.devices.push_back({"D" + std::to_string(idx++), pos});
            d_max = std::max(d_max, pos.norm());
        }
    }
    if (dep.devices.empty())
        throw std::invalid_argument("make_grid_deployment: grid contains only the origin");

    dep.pathloss.beta = spec.beta;
    dep.pathloss.exponent = channel::PathLossExponent::half_beta;
    // P0 such that the farthest device's mean link SNR (P * N_Rx) hits the target
    const double p_far = db_to_linear(spec.snr_far_db) / spec.n_rx;
    dep.pathloss.p0 = 1.0;
    dep.pathloss.p0 = p_far / dep.pathloss.power_at(d_max);

    dep.attacker = channel::AttackerSpec{spec.attacker_position, db_to_linear(spec.rice_k_e_db)};
    dep.validate();
    return dep;
}

json deployment_to_json(const channel::Deployment& dep) {
    json j;
    j["array"] = {{"n_rx", dep.array.n_rx},
                  {"delta_r", dep.array.delta_r},
                  {"carrier_freq_hz", dep.array.carrier_freq},
                  {"orientation", {dep.array.orientation.x(), dep.array.orientation.y()}}};
    j["pathloss"] = {
        {"p0", dep.pathloss.p0},
        {"beta", dep.pathloss.beta},
        {"exponent",
         dep.pathloss.exponent == channel::PathLossExponent::half_beta ? "half-beta" : "beta"}};
    j["rice_k"] = dep.rice_k;
    j["rho"] = dep.corr;
    json devs = json::array();
    for (const auto& d : dep.devices)
        devs.push_back({{"id", d.id}, {"position", {d.position.x(), d.position.y()}}});
    j["devices"] = devs;
    if (dep.attacker)
        j["attacker"] = {{"position", {dep.attacker->position.x(), dep.attacker->position.y()}},
                         {"rice_k", dep.attacker->rice_k}};
    return j;
}

channel::Deployment deployment_from_json(const json& j) {
    channel::Deployment dep;
    const auto& ja = j.at("array");
    dep.array.n_rx = ja.at("n_rx").get<int>();
    dep.array.delta_r = ja.at("delta_r").get<double>();
    dep.array.carrier_freq = ja.at("carrier_freq_hz").get<double>();
    const auto& o = ja.at("orientation");
    dep.array.orientation = channel::Vector2d{o.at(0).get<double>(), o.at(1).get<double>()};

    const auto& jp = j.at("pathloss");
    dep.pathloss.p0 = jp.at("p0").get<double>();
    dep.pathloss.beta = jp.at("beta").get<double>();
    const std::string exp = jp.value("exponent", "half-beta");
    if (exp == "half-beta")
        dep.pathloss.exponent = channel::PathLossExponent::half_beta;
    else if (exp == "beta")
        dep.pathloss.exponent = channel::PathLossExponent::beta;
    else
        throw std::invalid_argument("deployment: unknown pathloss exponent '" + exp + "'");

    dep.rice_k = j.contains("rice_k") ? j.at("rice_k").get<double>()
                                       : db_to_linear(j.at("rice_k_db").get<double>());
    dep.corr = j.at("rho").get<double>();
    for (const auto& d : j.at("devices")) {
        const auto& p = d.at("position");
        dep.devices.push_back(
            {d.at("id").get<std::string>(), {p.at(0).get<double>(), p.at(1).get<double>()}});
    }
    if (j.contains("attacker")) {
        const auto& a = j.at("attacker");
        const auto& p = a.at("position");
        const double k_e = a.contains("rice_k") ? a.at("rice_k").get<double>()
                                                 : db_to_linear(a.at("rice_k_db").get<double>());
        dep.attacker = channel::AttackerSpec{{p.at(0).get<double>(), p.at(1).get<double>()}, k_e};
    }
    dep.validate();
    return dep;
}

namespace {

AttackType attack_from_string(const std::string& s) {
    if (s == "baseline") return AttackType::baseline;
    if (s == "data-injection") return AttackType::data_injection;
    if (s == "sybil") return AttackType::sybil;
    if (s == "disassociation") return AttackType::disassociation;
    throw std::invalid_argument("scenario: unknown attack type '" + s + "'");
}

std::string attack_to_string(AttackType a) {
    switch (a) {
        case AttackType::baseline: return "baseline";
        case AttackType::data_injection: return "data-injection";
        case AttackType::sybil: return "sybil";
        case AttackType::disassociation: return "disassociation";
    }
    return "baseline";
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    const auto& jd = j.at("deployment");
    if (jd.contains("file")) {
        std::ifstream in(jd.at("file").get<std::string>());
        if (!in) throw std::runtime_error("scenario: cannot open deployment file");
        json sub;
        in >> sub;
        sc.deployment = deployment_from_json(sub);
    } else {
        sc.deployment = deployment_from_json(jd);
    }

    if (j.contains("pla")) {
        const auto& jp = j.at("pla");
        sc.pla_enabled = jp.value("enabled", true);
        if (jp.contains("target_fa")) sc.target_fa = jp.at("target_fa").get<double>();
        if (jp.contains("threshold")) sc.threshold = jp.at("threshold").get<double>();
        if (sc.target_fa && sc.threshold)
            throw std::invalid_argument("scenario: specify either pla.target_fa or pla.threshold");
    }
    if (!sc.target_fa && !sc.threshold) sc.target_fa = 1e-2;

    if (j.contains("attack")) {
        const auto& ja = j.at("attack");
        sc.attack = attack_from_string(ja.value("type", "baseline"));
        if (ja.contains("eve")) {
            const auto& je = ja.at("eve");
            if (je.contains("device")) sc.eve.device = je.at("device").get<std::string>();
            if (je.contains("position")) {
                const auto& p = je.at("position");
                sc.eve.position = channel::Vector2d{p.at(0).get<double>(), p.at(1).get<double>()};
            }
            if (je.contains("distance"))
                sc.eve.distance_aoa = {je.at("distance").get<double>(),
                                       je.at("aoa_rad").get<double>()};
            if (je.contains("rice_k_db")) sc.eve.rice_k_db = je.at("rice_k_db").get<double>();
        }
        if (ja.contains("targets"))
            sc.sybil_targets = ja.at("targets").get<std::vector<std::string>>();
        sc.n_sybil = ja.value("n_targets", static_cast<int>(sc.sybil_targets.size()));
        sc.target_device = ja.value("target", sc.target_device);
        sc.p_attack = ja.value("p_attack", sc.p_attack);
        sc.k_rc = ja.value("k_rc", sc.k_rc);
    }

    if (j.contains("snc")) {
        const auto& js = j.at("snc");
        sc.target_device = js.value("device", sc.target_device);
        if (js.contains("active")) sc.active_set = js.at("active").get<std::vector<std::string>>();
        sc.n_frame = js.value("n_frame", sc.n_frame);
        if (js.contains("utilization")) sc.utilization = js.at("utilization").get<double>();
        if (js.contains("alpha")) sc.alpha = js.at("alpha").get<double>();
        sc.utilization_reference = js.value("utilization_reference", sc.utilization_reference);
        sc.epsilon = js.value("epsilon", sc.epsilon);
        sc.w_min = js.value("w_min", sc.w_min);
        sc.w_max = js.value("w_max", sc.w_max);
        const std::string mm = js.value("moment_matching", "proof");
        if (mm == "proof")
            sc.moment_matching = snc::MomentMatching::proof;
        else if (mm == "theorem")
            sc.moment_matching = snc::MomentMatching::theorem;
        else
            throw std::invalid_argument("scenario: unknown moment_matching '" + mm + "'");
    }
    if (sc.utilization && sc.alpha)
        throw std::invalid_argument("scenario: specify either snc.utilization or snc.alpha");
    if (!sc.utilization && !sc.alpha) sc.utilization = 0.5;
    if (sc.utilization_reference != "self" && sc.utilization_reference != "pla")
        throw std::invalid_argument("scenario: utilization_reference must be 'self' or 'pla'");

    if (j.contains("sim")) {
        const auto& js = j.at("sim");
        sc.sim_enabled = js.value("enabled", true);
        sc.sim_frames = js.value("frames", sc.sim_frames);
        sc.sim_replications = js.value("replications", sc.sim_replications);
        sc.sim_warmup_frac = js.value("warmup_frac", sc.sim_warmup_frac);
    }
    sc.seed = j.value("seed", sc.seed);

    if (sc.active_set.empty()) sc.active_set = default_active_set();
    for (const auto& id : sc.active_set) sc.deployment.device(id);  // existence check
    for (const auto& id : sc.sybil_targets) sc.deployment.device(id);
    sc.deployment.device(sc.target_device);
    return sc;
}

json scenario_to_json(const Scenario& sc) {
    json j;
    j["deployment"] = deployment_to_json(sc.deployment);
    json jp;
    jp["enabled"] = sc.pla_enabled;
    if (sc.target_fa) jp["target_fa"] = *sc.target_fa;
    if (sc.threshold) jp["threshold"] = *sc.threshold;
    j["pla"] = jp;

    json ja;
    ja["type"] = attack_to_string(sc.attack);
    json je;
    if (sc.eve.device) je["device"] = *sc.eve.device;
    if (sc.eve.position) je["position"] = {sc.eve.position->x(), sc.eve.position->y()};
    if (sc.eve.distance_aoa) {
        je["distance"] = sc.eve.distance_aoa->first;
        je["aoa_rad"] = sc.eve.distance_aoa->second;
    }
    if (sc.eve.rice_k_db) je["rice_k_db"] = *sc.eve.rice_k_db;
    if (!je.empty()) ja["eve"] = je;
    if (!sc.sybil_targets.empty()) ja["targets"] = sc.sybil_targets;
    if (sc.n_sybil) ja["n_targets"] = sc.n_sybil;
    ja["target"] = sc.target_device;
    ja["p_attack"] = sc.p_attack;
    ja["k_rc"] = sc.k_rc;
    j["attack"] = ja;

    json js;
    js["device"] = sc.target_device;
    js["active"] = sc.active_set;
    js["n_frame"] = sc.n_frame;
    if (sc.utilization) js["utilization"] = *sc.utilization;
    if (sc.alpha) js["alpha"] = *sc.alpha;
    js["utilization_reference"] = sc.utilization_reference;
    js["epsilon"] = sc.epsilon;
    js["w_min"] = sc.w_min;
    js["w_max"] = sc.w_max;
    js["moment_matching"] = sc.moment_matching == snc::MomentMatching::proof ? "proof" : "theorem";
    j["snc"] = js;

    json jm;
    jm["enabled"] = sc.sim_enabled;
    jm["frames"] = sc.sim_frames;
    jm["replications"] = sc.sim_replications;
    jm["warmup_frac"] = sc.sim_warmup_frac;
    j["sim"] = jm;
    j["seed"] = sc.seed;
    return j;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    return scenario_from_json(j);
}

void apply_override(json& j, const std::string& key, const std::string& value) {
    std::string ptr = "/" + key;
    std::replace(ptr.begin(), ptr.end(), '.', '/');
    json v;
    try {
        v = json::parse(value);
    } catch (const json::parse_error&) {
        v = value;  // bare string
    }
    j[json::json_pointer(ptr)] = v;
}

std::vector<std::string> default_active_set() {
    return {"D12", "D13", "D14", "D17", "D18", "D19", "D22", "D23", "D24"};
}

std::vector<std::string> pick_sybil_targets(const channel::Deployment& dep,
                                            const std::vector<std::string>& active,
                                            const std::optional<std::string>& eve_device, int n) {
    std::vector<std::string> out;
    for (const auto& d : dep.devices) {
        if (static_cast<int>(out.size()) >= n) break;
        if (std::find(active.begin(), active.end(), d.id) != active.end()) continue;
        if (eve_device && *eve_device == d.id) continue;
        out.push_back(d.id);
    }
    if (static_cast<int>(out.size()) < n)
        throw std::invalid_argument("pick_sybil_targets: not enough inactive devices");
    return out;
}

channel::DeviceChannelStats eve_stats(const Scenario& sc) {
    const auto& dep = sc.deployment;
    if (sc.eve.device) return channel::device_stats(dep, *sc.eve.device);

    double k_e = dep.attacker ? dep.attacker->rice_k : 1.0;
    if (sc.eve.rice_k_db) k_e = std::pow(10.0, *sc.eve.rice_k_db / 10.0);
    if (sc.eve.position) return channel::stats_for_position(*sc.eve.position, k_e, dep);
    if (sc.eve.distance_aoa) {
        const auto pos = channel::position_from_aoa(dep.array, sc.eve.distance_aoa->first,
                                                    sc.eve.distance_aoa->second);
        return channel::stats_for_position(pos, k_e, dep);
    }
    if (dep.attacker) return channel::attacker_stats(dep);
    throw std::invalid_argument("scenario: attack configured but no attacker position");
}

namespace {

pla::PlaDecisionModel pla_model(const Scenario& sc, bool enabled) {
    pla::PlaDecisionModel m;
    m.n_rx = sc.deployment.array.n_rx;
    if (!enabled) {
        m.threshold = std::numeric_limits<double>::infinity();
        m.p_fa = 0.0;
        return m;
    }
    if (sc.threshold) {
        m.threshold = *sc.threshold;
        m.p_fa = pla::false_alarm_rate(m.threshold, m.n_rx);
        return m;
    }
    return pla::model_for_fa(*sc.target_fa, m.n_rx);
}

std::vector<std::string> resolved_sybil_ids(const Scenario& sc) {
    if (sc.attack != AttackType::sybil) return {};
    if (!sc.sybil_targets.empty()) return sc.sybil_targets;
    return pick_sybil_targets(sc.deployment, sc.active_set, sc.eve.device, sc.n_sybil);
}

}  // namespace

snc::ServiceDescription build_service(const Scenario& sc, bool pla_on) {
    const auto& dep = sc.deployment;
    const auto target = channel::device_stats(dep, sc.target_device);
    const auto moments = channel::snr_moments(target);

    snc::ServiceDescription svc;
    svc.gamma = snc::gamma_approx_params(moments, sc.moment_matching);
    const pla::PlaDecisionModel model = pla_model(sc, pla_on);
    svc.p_fa = model.p_fa;
    const int n_active = static_cast<int>(sc.active_set.size());

    switch (sc.attack) {
        case AttackType::baseline:
        case AttackType::data_injection: {
            // deterministic N_k at the full active set
            svc.nk_pmf = {{sc.n_frame / n_active, 1.0}};
            break;
        }
        case AttackType::sybil: {
            const auto ids = resolved_sybil_ids(sc);
            const auto eve = eve_stats(sc);
            std::vector<double> md;
            md.reserve(ids.size());
            for (const auto& id : ids) {
                if (!pla_on) {
                    md.push_back(1.0);  // every Sybil id accepted
                    continue;
                }
                const auto params =
                    pla::impersonation_params(channel::device_stats(dep, id), eve);
                md.push_back(pla::missed_detection_rate(model.threshold, params));
            }
            const auto others = attacks::sched_dist_under_sybil(
                attacks::baseline_sched_dist(std::max(1, n_active - 1), svc.p_fa),
                attacks::sybil_success_dist(md));
            svc.nk_pmf = attacks::nk_dist(others, sc.n_frame);
            break;
        }
        case AttackType::disassociation: {
            svc.nk_pmf = {{sc.n_frame / n_active, 1.0}};
            svc.k_rc = sc.k_rc;
            double md_upper = 0.5;  // random guessing without PLA
            if (pla_on) {
                const auto params = pla::impersonation_params(target, eve_stats(sc));
                md_upper = pla::md_l2_bounds(model.threshold, params).upper;
            }
            svc.p_block = attacks::disassoc_block_prob(md_upper, sc.p_attack, sc.k_rc);
            break;
        }
    }
    return svc;
}

namespace {

Resolved resolve_impl(const Scenario& sc, bool pla_on) {
    Resolved r;
    const auto& dep = sc.deployment;
    r.target = channel::device_stats(dep, sc.target_device);
    r.n_active = static_cast<int>(sc.active_set.size());
    r.pla = pla_model(sc, pla_on);

    if (sc.attack != AttackType::baseline) r.eve = eve_stats(sc);
    if (sc.attack == AttackType::sybil) {
        r.sybil_ids = resolved_sybil_ids(sc);
        for (const auto& id : r.sybil_ids) {
            if (!pla_on) {
                r.sybil_md.push_back(1.0);
                continue;
            }
            const auto params = pla::impersonation_params(channel::device_stats(dep, id), *r.eve);
            r.sybil_md.push_back(pla::missed_detection_rate(r.pla.threshold, params));
        }
    }
    if (sc.attack == AttackType::disassociation) {
        if (pla_on) {
            const auto params = pla::impersonation_params(r.target, *r.eve);
            r.md_l2_upper = pla::md_l2_bounds(r.pla.threshold, params).upper;
        } else {
            r.md_l2_upper = 0.5;
        }
    }

    r.service = build_service(sc, pla_on);
    if (sc.alpha) {
        r.alpha = *sc.alpha;
    } else if (sc.utilization_reference == "pla" && !pla_on) {
        r.alpha = snc::utilization_arrival_rate(*sc.utilization, build_service(sc, true));
    } else {
        r.alpha = snc::utilization_arrival_rate(*sc.utilization, r.service);
    }
    return r;
}

}  // namespace

Resolved resolve(const Scenario& sc) { return resolve_impl(sc, sc.pla_enabled); }

Resolved resolve_without_pla(const Scenario& sc) { return resolve_impl(sc, false); }

sim::SimConfig build_sim_config(const Scenario& sc, const Resolved& r, int threads) {
    sim::SimConfig cfg;
    switch (sc.attack) {
        case AttackType::baseline:
        case AttackType::data_injection:
            cfg.scenario = sc.pla_enabled ? sim::Scenario::baseline : sim::Scenario::no_pla_baseline;
            break;
        case AttackType::sybil:
            if (!sc.pla_enabled)
                throw std::invalid_argument("build_sim_config: sybil simulation requires PLA");
            cfg.scenario = sim::Scenario::sybil;
            break;
        case AttackType::disassociation:
            cfg.scenario = sc.pla_enabled ? sim::Scenario::disassociation
                                          : sim::Scenario::no_pla_disassociation;
            break;
    }
    cfg.n_frames = sc.sim_frames;
    cfg.warmup_frac = sc.sim_warmup_frac;
    cfg.seed = sc.seed;
    cfg.replications = sc.sim_replications;
    cfg.threads = threads;
    cfg.target = r.target;
    cfg.n_other_active = std::max(0, r.n_active - 1);
    cfg.n_frame = sc.n_frame;
    cfg.alpha = r.alpha;
    cfg.threshold = r.pla.threshold;
    cfg.p_fa = r.pla.p_fa;
    if (sc.attack == AttackType::sybil) {
        for (const auto& id : r.sybil_ids)
            cfg.sybil_targets.push_back(channel::device_stats(sc.deployment, id));
        cfg.attacker = r.eve;
    }
    if (sc.attack == AttackType::disassociation) {
        cfg.attacker = r.eve;
        cfg.p_attack = sc.p_attack;
        cfg.k_rc = sc.k_rc;
    }
    return cfg;
}

}  // namespace plaq::scenario
