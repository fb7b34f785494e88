#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "plaq/csv.hpp"
#include "plaq/scenario.hpp"

// plaq: detection performance and delay-violation bounds for channel-feature
// authentication in an MTC uplink, with a frame-level validation simulator.
//
// Subcommands: deployment, detect, delay, simulate.

namespace {

using namespace plaq;
using nlohmann::json;

struct SweepSpec {
    std::string var;
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw CLI::ValidationError("--sweep", "expected <var>=<start>:<stop>:<steps>");
    SweepSpec s;
    s.var = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    bool log_scale = false;
    if (rest.rfind("log:", 0) == 0) {
        log_scale = true;
        rest = rest.substr(4);
    }
    double start, stop;
    int steps;
    if (std::sscanf(rest.c_str(), "%lf:%lf:%d", &start, &stop, &steps) != 3 || steps < 1)
        throw CLI::ValidationError("--sweep", "expected <var>=<start>:<stop>:<steps>");
    if (steps == 1) {
        s.values = {start};
        return s;
    }
    for (int i = 0; i < steps; ++i) {
        const double f = static_cast<double>(i) / (steps - 1);
        s.values.push_back(log_scale ? start * std::pow(stop / start, f)
                                     : start + (stop - start) * f);
    }
    return s;
}

json load_scenario_json(const std::string& path, const std::vector<std::string>& sets) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json j;
    in >> j;
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got: " + kv);
        scenario::apply_override(j, kv.substr(0, eq), kv.substr(eq + 1));
    }
    return j;
}

void apply_sweep_value(json& j, const std::string& var, double value) {
    if (var == "p_fa") {
        j["pla"]["enabled"] = true;
        j["pla"]["target_fa"] = value;
        j["pla"].erase("threshold");
    } else if (var == "n_sybil") {
        j["attack"]["n_targets"] = static_cast<int>(std::lround(value));
        j["attack"].erase("targets");
    } else if (var == "p_attack") {
        j["attack"]["p_attack"] = value;
    } else if (var == "n_rx") {
        j["deployment"]["array"]["n_rx"] = static_cast<int>(std::lround(value));
    } else if (var == "k_rice_db") {
        j["deployment"]["rice_k_db"] = value;
    } else if (var == "k_rice_e_db") {
        j["attack"]["eve"]["rice_k_db"] = value;
    } else if (var == "rho") {
        j["deployment"]["rho"] = value;
    } else if (var == "aoa") {
        j["attack"]["eve"]["aoa_rad"] = value;
        if (!j["attack"]["eve"].contains("distance"))
            throw std::runtime_error("aoa sweep requires attack.eve.distance");
        j["attack"]["eve"].erase("position");
        j["attack"]["eve"].erase("device");
    } else if (var == "utilization") {
        j["snc"]["utilization"] = value;
        j["snc"].erase("alpha");
    } else {
        throw std::runtime_error("unknown sweep variable: " + var);
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

// Runs fn(i) for i in [0, n) on a pool, preserving result order.
template <typename Fn>
void run_ordered(int n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, n);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

int cmd_deployment(const std::string& out_path, const scenario::GridSpec& spec) {
    const auto dep = scenario::make_grid_deployment(spec);
    auto out = open_out(out_path);
    out << scenario::deployment_to_json(dep).dump(2) << '\n';
    return 0;
}

int cmd_detect(const json& base, const std::optional<SweepSpec>& sweep, const std::string& out_path,
               long mc_samples, std::uint64_t seed, int threads) {
    const SweepSpec sw = sweep.value_or(SweepSpec{"none", {0.0}});
    auto out = open_out(out_path);
    csv::Writer w(out);
    w.header({"sweep_var", "sweep_value", "device_id", "p_fa", "p_md", "chernoff_pd",
              "md_l2_lower", "md_l2_upper", "mc_estimate", "mc_stderr"});

    struct Row {
        std::vector<std::string> fields;
    };
    std::vector<std::vector<Row>> results(sw.values.size());

    run_ordered(static_cast<int>(sw.values.size()), threads, [&](int i) {
        json j = base;
        if (sw.var != "none") apply_sweep_value(j, sw.var, sw.values[i]);
        const auto sc = scenario::scenario_from_json(j);
        const auto eve = scenario::eve_stats(sc);
        const auto model = sc.pla_enabled
                               ? (sc.threshold ? pla::PlaDecisionModel{*sc.threshold,
                                                                       sc.deployment.array.n_rx,
                                                                       pla::false_alarm_rate(
                                                                           *sc.threshold,
                                                                           sc.deployment.array.n_rx)}
                                               : pla::model_for_fa(*sc.target_fa,
                                                                   sc.deployment.array.n_rx))
                               : pla::PlaDecisionModel{};

        std::vector<std::string> ids = sc.sybil_targets;
        if (ids.empty()) ids = {sc.target_device};
        for (const auto& id : ids) {
            const auto legit = channel::device_stats(sc.deployment, id);
            const auto params = pla::impersonation_params(legit, eve);
            const double p_md = pla::missed_detection_rate(model.threshold, params);
            const double p_d = pla::chernoff_pd(params);
            const auto bounds = pla::md_l2_bounds(model.threshold, params);
            const auto mc =
                sim::detection_mc(legit, eve, model.threshold, mc_samples,
                                  channel::substream_seed(seed, i * 1000 + results[i].size()));
            results[i].push_back({{csv::format_double(sw.values[i], 10).insert(0, ""),
                                   "",  // placeholder replaced below
                                   id, csv::format_probability(model.p_fa),
                                   csv::format_probability(p_md), csv::format_probability(p_d),
                                   csv::format_probability(bounds.lower),
                                   csv::format_probability(bounds.upper),
                                   csv::format_probability(mc.p_l2),
                                   csv::format_probability(mc.se_l2)}});
            auto& f = results[i].back().fields;
            f[0] = sw.var;
            f[1] = csv::format_double(sw.values[i], 10);
        }
    });
    for (const auto& rows : results)
        for (const auto& r : rows) w.row(r.fields);
    return 0;
}

int cmd_delay(const json& base, const std::optional<SweepSpec>& sweep, const std::string& out_path,
              int threads) {
    const SweepSpec sw = sweep.value_or(SweepSpec{"none", {0.0}});
    auto out = open_out(out_path);
    csv::Writer w(out);

    json probe = base;
    if (sw.var != "none") apply_sweep_value(probe, sw.var, sw.values[0]);
    const auto sc0 = scenario::scenario_from_json(probe);
    std::vector<std::string> head{"sweep_var", "sweep_value", "alpha",
                                  "w_epsilon", "stable",      "s_star"};
    std::vector<int> w_grid;
    for (int ww = sc0.w_min; ww <= sc0.w_max; ++ww) w_grid.push_back(ww);
    const bool emit_grid = w_grid.size() <= 64 && sc0.w_max > 0;
    if (emit_grid)
        for (int ww : w_grid) head.push_back("bound_w" + std::to_string(ww));
    w.header(head);

    std::vector<std::vector<std::string>> rows(sw.values.size());
    run_ordered(static_cast<int>(sw.values.size()), threads, [&](int i) {
        json j = base;
        if (sw.var != "none") apply_sweep_value(j, sw.var, sw.values[i]);
        const auto sc = scenario::scenario_from_json(j);
        const auto r = sc.pla_enabled ? scenario::resolve(sc) : scenario::resolve_without_pla(sc);
        const auto scn = snc::make_scenario(r.alpha, r.service);
        const long w_eps = snc::delay_guarantee(sc.epsilon, scn);
        const bool stable = w_eps != snc::kUnboundedDelay;
        std::vector<std::string> f{
            sw.var, csv::format_double(sw.values[i], 10), csv::format_double(r.alpha, 10),
            stable ? std::to_string(w_eps) : "unbounded", stable ? "1" : "0"};
        double s_star = 0.0;
        if (stable) s_star = snc::delay_bound(std::max(1, static_cast<int>(w_eps / scn.timescale)),
                                              scn).s_star;
        f.push_back(csv::format_double(s_star, 8));
        if (emit_grid)
            for (int ww : w_grid) {
                const auto b = snc::delay_bound(ww, scn);
                f.push_back(csv::format_probability(b.bound));
            }
        rows[i] = std::move(f);
    });
    for (const auto& r : rows) w.row(r);
    return 0;
}

int cmd_simulate(const json& base, const std::string& out_path, int threads) {
    const auto sc = scenario::scenario_from_json(base);
    const auto r = sc.pla_enabled ? scenario::resolve(sc) : scenario::resolve_without_pla(sc);
    auto cfg = scenario::build_sim_config(sc, r, threads);
    const auto trace = sim::run_link_sim(cfg);
    const auto scn = snc::make_scenario(r.alpha, r.service);

    auto out = open_out(out_path);
    csv::Writer w(out);
    w.header({"w", "empirical_p", "ci_halfwidth", "n_samples", "bound"});
    for (int ww = 0; ww < static_cast<int>(trace.violation_curve.size()); ++ww) {
        const int steps = std::max(0, ww / scn.timescale);
        const auto b = snc::delay_bound(steps, scn);
        w.row({std::to_string(ww), csv::format_probability(trace.violation_curve[ww]),
               csv::format_probability(1.96 * trace.se[ww]),
               csv::format_double(trace.total_bits, 12), csv::format_probability(b.bound)});
        if (ww > sc.w_max && trace.violation_curve[ww] == 0.0) break;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"channel-feature authentication: detection metrics, delay-violation bounds, "
                 "and a frame-level validation simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_path = "out.csv";
    std::vector<std::string> sets;
    std::string sweep_arg;
    std::uint64_t seed = 0xD1CEu;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    long mc_samples = 100000;

    auto add_common = [&](CLI::App* cmd, bool needs_scenario = true) {
        if (needs_scenario)
            cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_path, "output CSV path");
        cmd->add_option("--seed", seed, "master RNG seed");
        cmd->add_option("--sweep", sweep_arg, "<var>=<start>:<stop>:<steps> (prefix log: for log spacing)");
        cmd->add_option("--threads", threads, "worker threads");
        cmd->add_option("--set", sets, "override scenario keys, e.g. snc.utilization=0.9");
    };

    auto* dep_cmd = app.add_subcommand("deployment", "generate a square-grid deployment file");
    scenario::GridSpec grid;
    std::string dep_out = "deployment.json";
    dep_cmd->add_option("--out", dep_out, "output deployment JSON");
    dep_cmd->add_option("--rows", grid.rows, "grid rows");
    dep_cmd->add_option("--cols", grid.cols, "grid columns");
    dep_cmd->add_option("--extent", grid.extent, "grid extent in meters");
    dep_cmd->add_option("--n-rx", grid.n_rx, "access point antennas");
    dep_cmd->add_option("--rice-k-db", grid.rice_k_db, "device Rice factor [dB]");
    dep_cmd->add_option("--rice-k-e-db", grid.rice_k_e_db, "attacker Rice factor [dB]");
    dep_cmd->add_option("--rho", grid.rho, "antenna correlation");
    dep_cmd->add_option("--beta", grid.beta, "path-loss exponent");
    dep_cmd->add_option("--snr-far-db", grid.snr_far_db, "mean link SNR at the farthest device [dB]");

    auto* detect_cmd = app.add_subcommand("detect", "detection metrics (analytic + MC) as CSV");
    add_common(detect_cmd);
    detect_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo draws per row");

    auto* delay_cmd = app.add_subcommand("delay", "delay guarantees and bound curves as CSV");
    add_common(delay_cmd);

    auto* sim_cmd = app.add_subcommand("simulate", "run the link simulator; empirical curve + bound");
    add_common(sim_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (dep_cmd->parsed()) return cmd_deployment(dep_out, grid);

        json base = load_scenario_json(scenario_path, sets);
        if (base.contains("seed") == false) base["seed"] = seed;
        std::optional<SweepSpec> sweep;
        if (!sweep_arg.empty()) sweep = parse_sweep(sweep_arg);

        if (detect_cmd->parsed()) return cmd_detect(base, sweep, out_path, mc_samples, seed, threads);
        if (delay_cmd->parsed()) return cmd_delay(base, sweep, out_path, threads);
        if (sim_cmd->parsed()) return cmd_simulate(base, out_path, threads);
    } catch (const std::exception& e) {
        json err;
        err["errors"] = json::array({e.what()});
        std::cerr << err.dump() << '\n';
        return 1;
    }
    return 0;
}
