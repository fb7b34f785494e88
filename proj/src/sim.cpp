#include "plaq/sim.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <thread>

#include "plaq/pla.hpp"

namespace plaq::sim {

using channel::ChannelSampler;
using channel::substream_seed;

void SimConfig::validate() const {
    if (n_frames <= 0) throw std::invalid_argument("SimConfig: n_frames must be > 0");
    if (!(warmup_frac >= 0.0 && warmup_frac < 1.0))
        throw std::invalid_argument("SimConfig: warmup_frac must lie in [0,1)");
    if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
    if (n_frame < 1) throw std::invalid_argument("SimConfig: n_frame must be >= 1");
    if (n_other_active < 0) throw std::invalid_argument("SimConfig: n_other_active must be >= 0");
    if (!(alpha >= 0.0)) throw std::invalid_argument("SimConfig: alpha must be >= 0");
    if (w_max < 1) throw std::invalid_argument("SimConfig: w_max must be >= 1");
    if (target.mean.size() == 0) throw std::invalid_argument("SimConfig: missing target stats");
    const bool needs_attacker = scenario == Scenario::sybil || scenario == Scenario::disassociation;
    if (needs_attacker && !attacker)
        throw std::invalid_argument("SimConfig: scenario requires attacker stats");
    if (scenario == Scenario::sybil && sybil_targets.empty())
        throw std::invalid_argument("SimConfig: sybil scenario requires targets");
    if ((scenario == Scenario::disassociation || scenario == Scenario::no_pla_disassociation) &&
        k_rc < 1)
        throw std::invalid_argument("SimConfig: k_rc must be >= 1");
    if (!(p_attack >= 0.0 && p_attack <= 1.0))
        throw std::invalid_argument("SimConfig: p_attack must lie in [0,1]");
}

namespace {

// FIFO fluid queue recording bit-weighted delay at departure.
class DelayQueue {
  public:
    DelayQueue(int w_max, long warmup) : hist_(w_max + 2, 0.0), w_max_(w_max), warmup_(warmup) {}

    void step(long frame, double arrivals, double service) {
        backlog_ += arrivals;
        chunks_.push_back({frame, arrivals});
        double cap = service;
        while (cap > 0.0 && !chunks_.empty()) {
            auto& head = chunks_.front();
            const double served = std::min(cap, head.bits);
            head.bits -= served;
            cap -= served;
            backlog_ -= served;
            if (frame >= warmup_ && head.arrival >= warmup_) {
                const long d = frame - head.arrival;
                hist_[std::min<long>(d, w_max_ + 1)] += served;
                total_ += served;
            }
            if (head.bits <= 0.0) chunks_.pop_front();
        }
        if (backlog_ < -1e-6) throw std::runtime_error("DelayQueue: negative backlog");
        if (backlog_ < 0.0) backlog_ = 0.0;
    }

    // folds still-queued post-warmup bits in by their current age; a bit of
    // age d will leave with delay >= d, so this floors the violation tally
    void finalize(long last_frame) {
        for (const auto& c : chunks_) {
            if (c.arrival < warmup_ || c.bits <= 0.0) continue;
            const long age = last_frame - c.arrival;
            hist_[std::min<long>(age, w_max_ + 1)] += c.bits;
            total_ += c.bits;
        }
    }

    double backlog() const { return backlog_; }
    double total_bits() const { return total_; }
    const std::vector<double>& histogram() const { return hist_; }

  private:
    struct Chunk {
        long arrival;
        double bits;
    };
    std::deque<Chunk> chunks_;
    std::vector<double> hist_;
    double backlog_ = 0.0;
    double total_ = 0.0;
    int w_max_;
    long warmup_;
};

struct RepResult {
    std::vector<double> hist;
    double total = 0.0;
    double backlog_h1 = 0.0, backlog_h2 = 0.0;
};

RepResult simulate_replication(const SimConfig& cfg, long frames, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif;
    std::binomial_distribution<int> other_sched(
        cfg.n_other_active,
        (cfg.scenario == Scenario::no_pla_baseline ||
         cfg.scenario == Scenario::no_pla_disassociation)
            ? 1.0
            : 1.0 - cfg.p_fa);

    ChannelSampler target_sampler(cfg.target);
    pla::Discriminant target_discr(cfg.target);
    std::optional<ChannelSampler> eve_sampler;
    if (cfg.attacker) eve_sampler.emplace(*cfg.attacker);
    std::vector<pla::Discriminant> sybil_discr;
    for (const auto& st : cfg.sybil_targets) sybil_discr.emplace_back(st);

    const long warmup = static_cast<long>(cfg.warmup_frac * frames);
    DelayQueue queue(cfg.w_max, warmup);
    long lock = 0;
    double arrived = 0.0, departed_cap = 0.0;

    double backlog_sum_h1 = 0.0, backlog_sum_h2 = 0.0;
    const long half = warmup + (frames - warmup) / 2;

    for (long t = 0; t < frames; ++t) {
        const Eigen::VectorXcd h = target_sampler.draw(rng);
        const double gamma = h.squaredNorm();
        const double rate = std::log2(1.0 + gamma);

        double service = 0.0;
        const int others = other_sched(rng);

        switch (cfg.scenario) {
            case Scenario::baseline: {
                if (target_discr(h) <= cfg.threshold) {
                    const int n_k = cfg.n_frame / (1 + others);
                    service = n_k * rate;
                }
                break;
            }
            case Scenario::sybil: {
                const Eigen::VectorXcd h_e = eve_sampler->draw(rng);
                int k_syb = 0;
                for (const auto& d : sybil_discr)
                    if (d(h_e) <= cfg.threshold) ++k_syb;
                if (target_discr(h) <= cfg.threshold) {
                    const int n_k = cfg.n_frame / (1 + others + k_syb);
                    service = n_k * rate;
                }
                break;
            }
            case Scenario::disassociation: {
                if (lock > 0) {
                    --lock;
                    break;
                }
                const double d_own = target_discr(h);
                if (unif(rng) < cfg.p_attack) {
                    const Eigen::VectorXcd h_e = eve_sampler->draw(rng);
                    const double d_e = target_discr(h_e);
                    if (d_e < d_own) {  // ML picks Eve's DCN; ties go to the device
                        if (d_e <= cfg.threshold) lock = cfg.k_rc - 1;
                        break;  // either disassociated or both rejected
                    }
                }
                if (d_own <= cfg.threshold) {
                    const int n_k = cfg.n_frame / (1 + others);
                    service = n_k * rate;
                }
                break;
            }
            case Scenario::no_pla_baseline: {
                const int n_k = cfg.n_frame / (1 + others);
                service = n_k * rate;
                break;
            }
            case Scenario::no_pla_disassociation: {
                if (lock > 0) {
                    --lock;
                    break;
                }
                if (unif(rng) < cfg.p_attack && unif(rng) < 0.5) {
                    lock = cfg.k_rc - 1;  // random guess accepted Eve's DCN
                    break;
                }
                const int n_k = cfg.n_frame / (1 + others);
                service = n_k * rate;
                break;
            }
        }
        queue.step(t, cfg.alpha, service);
        arrived += cfg.alpha;
        departed_cap += service;
        if (t >= warmup) {
            if (t < half)
                backlog_sum_h1 += queue.backlog();
            else
                backlog_sum_h2 += queue.backlog();
        }
    }
    queue.finalize(frames - 1);
    if (queue.total_bits() > arrived + 1e-6)
        throw std::runtime_error("simulate_replication: departures exceed arrivals");

    RepResult r;
    r.hist = queue.histogram();
    r.total = queue.total_bits();
    const long n1 = half - warmup, n2 = frames - half;
    r.backlog_h1 = n1 > 0 ? backlog_sum_h1 / n1 : 0.0;
    r.backlog_h2 = n2 > 0 ? backlog_sum_h2 / n2 : 0.0;
    return r;
}

}  // namespace

SimTrace run_link_sim(const SimConfig& config) {
    config.validate();
    const int reps = config.replications;
    const long frames_per_rep = config.n_frames / reps;
    if (frames_per_rep < 10) throw std::invalid_argument("run_link_sim: too few frames per replication");

    std::vector<RepResult> results(reps);
    const int workers = std::max(1, std::min(config.threads, reps));
    if (workers == 1) {
        for (int r = 0; r < reps; ++r)
            results[r] =
                simulate_replication(config, frames_per_rep, substream_seed(config.seed, r));
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int wkr = 0; wkr < workers; ++wkr) {
            pool.emplace_back([&] {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= reps) return;
                    results[r] =
                        simulate_replication(config, frames_per_rep, substream_seed(config.seed, r));
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SimTrace trace;
    trace.frames_simulated = frames_per_rep * reps;
    const std::size_t bins = results[0].hist.size();

    // pooled bit-weighted curve; merge in replication order
    std::vector<double> pooled(bins, 0.0);
    double total = 0.0;
    for (const auto& r : results) {
        for (std::size_t i = 0; i < bins; ++i) pooled[i] += r.hist[i];
        total += r.total;
        trace.mean_backlog_first_half += r.backlog_h1 / reps;
        trace.mean_backlog_second_half += r.backlog_h2 / reps;
    }
    trace.total_bits = total;

    const int w_max = static_cast<int>(bins) - 2;
    trace.violation_curve.assign(w_max + 1, 0.0);
    trace.se.assign(w_max + 1, 0.0);
    if (total <= 0.0) return trace;

    // tail sums: P(W > w) = sum_{d > w} hist[d] / total
    std::vector<double> tail(bins + 1, 0.0);
    for (std::size_t i = bins; i-- > 0;) tail[i] = tail[i + 1] + pooled[i];
    for (int w = 0; w <= w_max; ++w) trace.violation_curve[w] = tail[w + 1] / total;

    if (reps >= 2) {
        for (int w = 0; w <= w_max; ++w) {
            double mean = 0.0;
            std::vector<double> per(reps, 0.0);
            for (int r = 0; r < reps; ++r) {
                double t = 0.0;
                for (std::size_t i = w + 1; i < bins; ++i) t += results[r].hist[i];
                per[r] = results[r].total > 0 ? t / results[r].total : 0.0;
                mean += per[r] / reps;
            }
            double var = 0.0;
            for (int r = 0; r < reps; ++r) var += (per[r] - mean) * (per[r] - mean);
            var /= (reps - 1);
            trace.se[w] = std::sqrt(var / reps);
        }
    }
    return trace;
}

DetectionMcResult detection_mc(const DeviceChannelStats& legit, const DeviceChannelStats& attacker,
                               double threshold, long n_samples, std::uint64_t seed) {
    if (n_samples < 10000) throw std::invalid_argument("detection_mc: n_samples must be >= 1e4");
    ChannelSampler legit_sampler(legit), eve_sampler(attacker);
    pla::Discriminant d(legit);
    std::mt19937_64 rng(seed);

    DetectionMcResult r;
    r.n = n_samples;
    for (long i = 0; i < n_samples; ++i) {
        const double d_i = d(legit_sampler.draw(rng));
        const double d_e = d(eve_sampler.draw(rng));
        if (d_i > threshold) ++r.hits_fa;
        if (d_e < threshold) ++r.hits_md;
        if (d_e < d_i) ++r.hits_dom;
        if (d_e < d_i && d_e < threshold) ++r.hits_l2;
    }
    const auto finish = [n = n_samples](long hits, double& p, double& se) {
        p = static_cast<double>(hits) / n;
        se = std::sqrt(std::max(p * (1.0 - p), 1.0 / n / n) / n);
    };
    finish(r.hits_fa, r.p_fa, r.se_fa);
    finish(r.hits_md, r.p_md, r.se_md);
    finish(r.hits_dom, r.p_dom, r.se_dom);
    finish(r.hits_l2, r.p_l2, r.se_l2);
    return r;
}

SybilMcResult sybil_joint_mc(const std::vector<DeviceChannelStats>& targets,
                             const DeviceChannelStats& attacker, double threshold, long n_frames,
                             std::uint64_t seed) {
    if (targets.empty()) throw std::invalid_argument("sybil_joint_mc: no targets");
    if (n_frames < 1) throw std::invalid_argument("sybil_joint_mc: n_frames must be >= 1");
    ChannelSampler eve_sampler(attacker);
    std::vector<pla::Discriminant> discr;
    for (const auto& t : targets) discr.emplace_back(t);
    std::mt19937_64 rng(seed);

    double sum = 0.0, sum_sq = 0.0;
    for (long i = 0; i < n_frames; ++i) {
        const Eigen::VectorXcd h_e = eve_sampler.draw(rng);
        int k = 0;
        for (const auto& d : discr)
            if (d(h_e) <= threshold) ++k;
        sum += k;
        sum_sq += static_cast<double>(k) * k;
    }
    SybilMcResult r;
    r.n_frames = n_frames;
    r.mean_k = sum / n_frames;
    const double var = std::max(0.0, sum_sq / n_frames - r.mean_k * r.mean_k);
    r.se = std::sqrt(var / n_frames);
    return r;
}

}  // namespace plaq::sim
