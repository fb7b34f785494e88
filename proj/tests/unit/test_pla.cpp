#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "plaq/pla.hpp"
#include "plaq/scenario.hpp"
#include "plaq/specfun.hpp"

using namespace plaq;
using namespace plaq::pla;

namespace {

// synthetic stats pair realizing a given (lambda, nu) with A = I, K = 0
std::pair<DeviceChannelStats, DeviceChannelStats> synthetic_pair(double lambda, double nu,
                                                                 int n_rx) {
    DeviceChannelStats legit;
    legit.mean = VectorXcd::Zero(n_rx);
    legit.covariance = MatrixXcd::Identity(n_rx, n_rx);
    legit.power = 1.0;
    legit.rice_k = 0.0;

    DeviceChannelStats eve;
    eve.power = lambda;  // lambda = P_E (1+0) / (1 (1+0))
    eve.rice_k = 0.0;
    eve.covariance = lambda * MatrixXcd::Identity(n_rx, n_rx);
    eve.mean = VectorXcd::Zero(n_rx);
    eve.mean[0] = std::sqrt(nu * lambda / 2.0);  // nu = 2 |m|^2 / lambda
    return {legit, eve};
}

double chernoff_grid_oracle(double lambda, double nu, int n_rx) {
    double best = 0.0;
    bool first = true;
    for (int i = 1; i < 2000000; ++i) {
        const double t = 0.5 * i / 2000000.0;
        const double base = (1.0 - 2.0 * t) * (1.0 + 2.0 * lambda * t);
        const double lf = -n_rx * std::log(base) - nu * lambda * t / (1.0 + 2.0 * lambda * t);
        if (first || lf < best) {
            best = lf;
            first = false;
        }
    }
    return std::min(1.0, std::exp(best));
}

}  // namespace

TEST_CASE("discriminant: zero at the mean, scalar closed form") {
    VectorXcd m = VectorXcd::Constant(3, std::complex<double>(0.4, -1.0));
    MatrixXcd cov = 0.7 * MatrixXcd::Identity(3, 3);
    CHECK(discriminant(m, cov, m) == doctest::Approx(0.0));

    VectorXcd m1 = VectorXcd::Zero(1);
    MatrixXcd c1 = 0.5 * MatrixXcd::Identity(1, 1);
    VectorXcd h1 = VectorXcd::Constant(1, std::complex<double>(1.0, 0.0));
    CHECK(discriminant(m1, c1, h1) == doctest::Approx(4.0).epsilon(1e-13));

    MatrixXcd singular = MatrixXcd::Zero(2, 2);
    CHECK_THROWS_AS(discriminant(VectorXcd::Zero(2), singular, VectorXcd::Zero(2)),
                    std::invalid_argument);
}

TEST_CASE("discriminant of legitimate draws is chi-square: KS test") {
    for (int n_rx : {1, 4, 8}) {
        scenario::GridSpec spec;
        spec.n_rx = n_rx;
        const auto dep = scenario::make_grid_deployment(spec);
        const auto st = channel::device_stats(dep, "D12");
        channel::ChannelSampler sampler(st);
        Discriminant d(st);
        std::mt19937_64 rng(1000 + n_rx);
        const long n = 100000;
        std::vector<double> u(n);
        for (long i = 0; i < n; ++i) u[i] = specfun::chi2_cdf(2 * n_rx, d(sampler.draw(rng)));
        std::sort(u.begin(), u.end());
        double ks = 0.0;
        for (long i = 0; i < n; ++i) {
            const double ecdf_hi = static_cast<double>(i + 1) / n;
            const double ecdf_lo = static_cast<double>(i) / n;
            ks = std::max(ks, std::max(std::abs(ecdf_hi - u[i]), std::abs(u[i] - ecdf_lo)));
        }
        // critical value at significance 1e-3: sqrt(-ln(5e-4)/2) / sqrt(n)
        CHECK(ks * std::sqrt(static_cast<double>(n)) < 1.95);
    }
}

TEST_CASE("false alarm rate and threshold inverse") {
    CHECK(false_alarm_rate(0.0, 1) == doctest::Approx(1.0));
    CHECK(false_alarm_rate(0.0, 8) == doctest::Approx(1.0));
    CHECK(false_alarm_rate(9.2103404, 1) == doctest::Approx(0.01).epsilon(1e-7));

    CHECK(threshold_for_fa(0.5, 1) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
    CHECK(threshold_for_fa(1e-2, 1) == doctest::Approx(9.21034037197618).epsilon(1e-10));
    CHECK(threshold_for_fa(1e-2, 8) == doctest::Approx(31.999926908815176).epsilon(1e-10));

    for (int n_rx : {1, 4, 8})
        for (double fa : {1e-1, 1e-2, 1e-5}) {
            const double t = threshold_for_fa(fa, n_rx);
            CHECK(false_alarm_rate(t, n_rx) == doctest::Approx(fa).epsilon(1e-10));
        }

    double prev = 2.0;
    for (double t = 0.0; t < 40.0; t += 0.5) {
        const double v = false_alarm_rate(t, 4);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(threshold_for_fa(0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(threshold_for_fa(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(false_alarm_rate(-1.0, 4), std::invalid_argument);
}

TEST_CASE("impersonation params: identity, power ratio, frozen geometry") {
    const auto dep = scenario::make_grid_deployment({});
    const auto d12 = channel::device_stats(dep, "D12");
    const auto self = impersonation_params(d12, d12);
    CHECK(self.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.nu == doctest::Approx(0.0).epsilon(1e-12));

    auto [legit, eve] = synthetic_pair(4.0, 0.0, 2);
    eve.mean = legit.mean;  // same mean, 4x power
    const auto p4 = impersonation_params(legit, eve);
    CHECK(p4.lambda == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p4.nu == doctest::Approx(0.0).epsilon(1e-12));

    // Eve at (25,0) targeting D12 under the default deployment
    const auto eve_ext = channel::attacker_stats(dep);
    const auto p = impersonation_params(d12, eve_ext);
    CHECK(p.lambda == doctest::Approx(1.0596325285574169).epsilon(1e-10));
    CHECK(p.nu == doctest::Approx(30.07091462071093).epsilon(1e-8));

    // non-conforming attacker covariance is rejected
    auto bad = eve_ext;
    bad.covariance(0, 1) += 0.05 * bad.power;
    CHECK_THROWS_AS(impersonation_params(d12, bad), std::invalid_argument);
}

TEST_CASE("missed detection rate: identities and MC oracle") {
    const double T = threshold_for_fa(1e-2, 4);
    ImpersonationParams same{1.0, 0.0, 4};
    CHECK(missed_detection_rate(T, same) ==
          doctest::Approx(1.0 - false_alarm_rate(T, 4)).epsilon(1e-12));
    CHECK(missed_detection_rate(0.0, same) == 0.0);

    double prev = -1.0;
    for (double t = 0.0; t < 60.0; t += 1.0) {
        const double v = missed_detection_rate(t, ImpersonationParams{1.7, 8.0, 4});
        CHECK(v >= prev);
        prev = v;
    }

    // end-to-end MC through the discriminant path
    auto [legit, eve] = synthetic_pair(1.7, 8.0, 4);
    channel::ChannelSampler es(eve);
    Discriminant d(legit);
    std::mt19937_64 rng(77);
    const long n = 500000;
    long hits = 0;
    for (long i = 0; i < n; ++i)
        if (d(es.draw(rng)) < T) ++hits;
    const double mc = static_cast<double>(hits) / n;
    const double expect = missed_detection_rate(T, ImpersonationParams{1.7, 8.0, 4});
    const double se = std::sqrt(expect * (1.0 - expect) / n);
    CHECK(std::abs(mc - expect) < 4.0 * se);
}

TEST_CASE("chernoff bound: trivial point, decay, grid oracle") {
    CHECK(chernoff_pd(ImpersonationParams{1.0, 0.0, 4}) == doctest::Approx(1.0));
    CHECK(chernoff_pd(ImpersonationParams{1.0, 200.0, 4}) < 1e-10);
    CHECK(chernoff_pd(ImpersonationParams{2.0, 10.0, 4}) ==
          doctest::Approx(0.07837021054197603).epsilon(1e-6));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ulam(0.2, 5.0), unu(0.0, 50.0);
    for (int i = 0; i < 5; ++i) {
        const double lam = ulam(rng), nu = unu(rng);
        const int n_rx = 1 << (rng() % 4);
        const double mine = chernoff_pd(ImpersonationParams{lam, nu, n_rx});
        const double oracle = chernoff_grid_oracle(lam, nu, n_rx);
        CHECK(mine == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("chernoff bound dominates the confusion probability (small MC)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ulam(0.2, 5.0), unu(0.0, 50.0);
    for (int trial = 0; trial < 6; ++trial) {
        const double lam = ulam(rng), nu = unu(rng);
        const int n_rx = trial % 2 ? 4 : 2;
        auto [legit, eve] = synthetic_pair(lam, nu, n_rx);
        channel::ChannelSampler ls(legit), es(eve);
        Discriminant d(legit);
        const long n = 200000;
        long hits = 0;
        for (long i = 0; i < n; ++i)
            if (d(es.draw(rng)) < d(ls.draw(rng))) ++hits;
        const double mc = static_cast<double>(hits) / n;
        const double se = std::sqrt(std::max(mc * (1.0 - mc), 1.0 / n) / n);
        CHECK(chernoff_pd(ImpersonationParams{lam, nu, n_rx}) >= mc - 3.0 * se);
    }
}

TEST_CASE("L=2 sandwich bounds") {
    const double T = threshold_for_fa(1e-2, 4);
    const auto zero = md_l2_bounds(0.0, ImpersonationParams{1.3, 4.0, 4});
    CHECK(zero.lower == doctest::Approx(0.0));
    CHECK(zero.upper == doctest::Approx(0.0));

    const auto same = md_l2_bounds(T, ImpersonationParams{1.0, 0.0, 4});
    CHECK(same.lower == doctest::Approx(0.01 * 0.99).epsilon(1e-8));
    CHECK(same.upper == doctest::Approx(0.99).epsilon(1e-8));

    // MC sits inside the sandwich for randomized configurations
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ulam(0.2, 5.0), unu(0.0, 50.0), ufa(0.001, 0.2);
    for (int trial = 0; trial < 6; ++trial) {
        const double lam = ulam(rng), nu = unu(rng), fa = ufa(rng);
        const int n_rx = trial % 2 ? 2 : 4;
        const double t = threshold_for_fa(fa, n_rx);
        const auto b = md_l2_bounds(t, ImpersonationParams{lam, nu, n_rx});
        CHECK(b.lower <= b.upper);

        auto [legit, eve] = synthetic_pair(lam, nu, n_rx);
        channel::ChannelSampler ls(legit), es(eve);
        Discriminant d(legit);
        const long n = 200000;
        long hits = 0;
        for (long i = 0; i < n; ++i) {
            const double de = d(es.draw(rng));
            if (de < d(ls.draw(rng)) && de < t) ++hits;
        }
        // count-domain 3-sigma comparison
        const double lo_cnt = n * b.lower, hi_cnt = n * b.upper;
        CHECK(hits >= lo_cnt - 3.0 * std::sqrt(lo_cnt + 1.0));
        CHECK(hits <= hi_cnt + 3.0 * std::sqrt(hi_cnt + 1.0));
    }
}
