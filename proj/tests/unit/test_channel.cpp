#include <doctest.h>

#include <cmath>
#include <numbers>

#include "plaq/channel.hpp"
#include "plaq/scenario.hpp"

using namespace plaq;
using namespace plaq::channel;

namespace {

Deployment defaults() { return scenario::make_grid_deployment({}); }

}  // namespace

TEST_CASE("spatial signature: closed forms and unit norm") {
    ArrayConfig a4;
    a4.n_rx = 4;
    const auto e0 = spatial_signature(0.0, a4);
    for (int i = 0; i < 4; ++i) {
        CHECK(e0[i].real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(e0[i].imag() == doctest::Approx(0.0).epsilon(1e-14));
    }

    ArrayConfig a2;
    a2.n_rx = 2;
    const auto e1 = spatial_signature(1.0, a2);
    CHECK(e1[0].real() == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(e1[1].real() == doctest::Approx(-1.0 / std::numbers::sqrt2).epsilon(1e-12));
    CHECK(std::abs(e1[1].imag()) < 1e-12);

    ArrayConfig a8;
    a8.n_rx = 8;
    const auto e = spatial_signature(0.5, a8);
    for (int m = 0; m < 8; ++m) {
        const auto expect = std::polar(1.0 / std::sqrt(8.0), -2.0 * std::numbers::pi * 0.5 * 0.5 * m);
        CHECK(std::abs(e[m] - expect) < 1e-12);
    }

    for (double om : {-1.0, -0.3, 0.0, 0.7, 1.0})
        for (int n : {1, 3, 8, 16}) {
            ArrayConfig ac;
            ac.n_rx = n;
            CHECK(spatial_signature(om, ac).norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    CHECK_THROWS_AS(spatial_signature(1.5, a4), std::invalid_argument);
}

TEST_CASE("device stats: broadside, pure LOS limit, hand-computed values") {
    auto dep = defaults();

    // D12 at (10,10) lies broadside to the y=-x array: Omega = 0
    const auto st = device_stats(dep, "D12");
    CHECK(st.dir_cosine == doctest::Approx(0.0).epsilon(1e-12));
    for (int i = 1; i < st.n_rx(); ++i) CHECK(std::abs(st.mean[i] - st.mean[0]) < 1e-12);

    // K -> inf: all power in the mean
    auto los = dep;
    los.rice_k = 1e12;
    const auto st_los = stats_for_position({10.0, 10.0}, los.rice_k, los);
    CHECK(st_los.covariance.trace().real() < 1e-9 * st_los.power);
    CHECK(st_los.mean.squaredNorm() ==
          doctest::Approx(st_los.power * dep.array.n_rx).epsilon(1e-9));

    // hand-computed: (20,20), P0=1, beta=3, K=10^0.6
    auto hand = dep;
    hand.pathloss.p0 = 1.0;
    const auto st2 = stats_for_position({20.0, 20.0}, hand.rice_k, hand);
    CHECK(st2.distance == doctest::Approx(std::sqrt(800.0)).epsilon(1e-14));
    CHECK(st2.power == doctest::Approx(0.0066478698711812355).epsilon(1e-12));
    CHECK(st2.mean.squaredNorm() == doctest::Approx(0.021252973826359).epsilon(1e-10));
    CHECK(st2.covariance.trace().real() == doctest::Approx(0.005338505658365941).epsilon(1e-10));

    CHECK_THROWS_AS(stats_for_position({0.0, 0.0}, 1.0, dep), std::invalid_argument);
}

TEST_CASE("device stats: normalization invariants across the whole deployment") {
    for (double k_db : {0.0, 6.0}) {
        for (double rho : {0.0, 0.5}) {
            scenario::GridSpec spec;
            spec.rice_k_db = k_db;
            spec.rho = rho;
            const auto dep = scenario::make_grid_deployment(spec);
            for (const auto& d : dep.devices) {
                const auto st = device_stats(dep, d.id);
                const double pn = st.power * dep.array.n_rx;
                const double m2 = st.mean.squaredNorm();
                const double tr = st.covariance.trace().real();
                CHECK(m2 == doctest::Approx(pn * st.rice_k / (st.rice_k + 1.0)).epsilon(1e-10));
                CHECK(tr == doctest::Approx(pn / (st.rice_k + 1.0)).epsilon(1e-10));
                CHECK(m2 + tr == doctest::Approx(pn).epsilon(1e-10));
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(st.covariance);
                CHECK(es.eigenvalues().minCoeff() > -1e-12);
            }
        }
    }
}

TEST_CASE("snr moments: closed forms and MC cross-check") {
    DeviceChannelStats nlos;
    nlos.mean = VectorXcd::Zero(1);
    nlos.covariance = MatrixXcd::Identity(1, 1);
    const auto [m1, v1] = snr_moments(nlos);
    CHECK(m1 == doctest::Approx(1.0));
    CHECK(v1 == doctest::Approx(1.0));

    DeviceChannelStats pure;
    pure.mean = VectorXcd::Constant(3, std::complex<double>(1.0, 1.0));
    pure.covariance = MatrixXcd::Zero(3, 3);
    const auto [m2, v2] = snr_moments(pure);
    CHECK(m2 == doctest::Approx(6.0));
    CHECK(v2 == doctest::Approx(0.0));

    // K=10^0.6, rho=0.5, N=4, P=0.2: frozen analytic values
    auto dep = defaults();
    dep.corr = 0.5;
    dep.pathloss.p0 = 0.2;
    dep.pathloss.exponent = PathLossExponent::beta;
    dep.pathloss.beta = 1e-12;  // P == p0 regardless of distance
    const auto st = stats_for_position({10.0, 10.0}, std::pow(10.0, 0.6), dep);
    CHECK(st.power == doctest::Approx(0.2).epsilon(1e-9));
    const auto [m3, v3] = snr_moments(st);
    CHECK(m3 == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(v3 == doctest::Approx(0.06227072554991819).epsilon(1e-6));

    // MC: mean matches tightly; the printed variance lies within a factor
    // of two below the sampled one (the mean-dependent term enters once).
    ChannelSampler sampler(st);
    std::mt19937_64 rng(123);
    const long n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n; ++i) {
        const double g = sampler.draw(rng).squaredNorm();
        sum += g;
        sum2 += g * g;
    }
    const double mc_mean = sum / n;
    const double mc_var = sum2 / n - mc_mean * mc_mean;
    CHECK(mc_mean == doctest::Approx(m3).epsilon(0.01));
    CHECK(mc_var >= v3 * 0.95);
    CHECK(mc_var <= 2.0 * v3 * 1.05);
}

TEST_CASE("channel sampler: degenerate covariance and sample statistics") {
    DeviceChannelStats pure;
    pure.mean = VectorXcd::Constant(2, std::complex<double>(0.7, -0.2));
    pure.covariance = MatrixXcd::Zero(2, 2);
    ChannelSampler s0(pure);
    std::mt19937_64 rng(5);
    CHECK((s0.draw(rng) - pure.mean).norm() == 0.0);

    const auto dep = defaults();
    const auto st = device_stats(dep, "D7");
    ChannelSampler s(st);
    const long n = 200000;
    double e2 = 0.0;
    std::complex<double> c01 = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto h = s.draw(rng);
        e2 += h.squaredNorm();
        c01 += (h[0] - st.mean[0]) * std::conj(h[1] - st.mean[1]);
    }
    CHECK(e2 / n == doctest::Approx(st.power * dep.array.n_rx).epsilon(0.01));
    CHECK(std::abs(c01 / static_cast<double>(n) - st.covariance(0, 1)) <
          4.0 * st.power / std::sqrt(static_cast<double>(n)));

    // correlated case: off-diagonal matches rho P/(K+1)
    auto depc = defaults();
    depc.corr = 0.5;
    const auto stc = stats_for_position({10.0, 10.0}, depc.rice_k, depc);
    ChannelSampler sc(stc);
    std::complex<double> c = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto h = sc.draw(rng);
        c += (h[0] - stc.mean[0]) * std::conj(h[1] - stc.mean[1]);
    }
    const double expect = 0.5 * stc.power / (depc.rice_k + 1.0);
    CHECK(std::abs(c.real() / n - expect) < 4.0 * stc.power / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("substream seeds are deterministic and distinct") {
    CHECK(substream_seed(42, 0) == substream_seed(42, 0));
    CHECK(substream_seed(42, 0) != substream_seed(42, 1));
    CHECK(substream_seed(42, 0) != substream_seed(43, 0));
}

TEST_CASE("deployment validation") {
    auto dep = defaults();
    dep.devices.push_back({"D1", {1.0, 1.0}});  // duplicate id
    CHECK_THROWS_AS(dep.validate(), std::invalid_argument);

    auto dep2 = defaults();
    dep2.devices.push_back({"DX", {0.0, 0.0}});
    CHECK_THROWS_AS(dep2.validate(), std::invalid_argument);
    CHECK_THROWS_AS(defaults().device("D99"), std::invalid_argument);
}
