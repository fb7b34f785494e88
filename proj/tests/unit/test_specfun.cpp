#include <doctest.h>

#include <cmath>
#include <numbers>
#include <functional>
#include <random>

#include "plaq/specfun.hpp"

using namespace plaq::specfun;

namespace {

// test-only oracle: adaptive Simpson on a finite interval
double simpson(const std::function<double(double)>& f, double a, double b, int depth,
               double whole, double fa, double fb, double fm) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-12 * std::abs(left + right) + 1e-300)
        return left + right;
    return simpson(f, a, m, depth - 1, left, fa, fm, flm) +
           simpson(f, m, b, depth - 1, right, fm, fb, frm);
}

double integrate_simpson(const std::function<double(double)>& f, double a, double b) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, 40, whole, fa, fb, fm);
}

double upper_gamma_quadrature(double s, double x) {
    const auto f = [s](double t) { return std::exp((s - 1.0) * std::log(t) - t); };
    return integrate_simpson(f, x, x + 60.0 + 10.0 * std::abs(s));
}

}  // namespace

TEST_CASE("ln_gamma matches known values and quadrature") {
    CHECK(ln_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(ln_gamma(0.5) == doctest::Approx(std::log(std::sqrt(std::numbers::pi))).epsilon(1e-13));
    CHECK(ln_gamma(7.3) == doctest::Approx(7.147892523022248).epsilon(1e-12));
    // quadrature oracle for Gamma(7.3)
    const auto f = [](double t) { return std::exp(6.3 * std::log(t) - t); };
    const double oracle = integrate_simpson(f, 1e-12, 200.0);
    CHECK(ln_gamma(7.3) == doctest::Approx(std::log(oracle)).epsilon(1e-10));
    CHECK_THROWS_AS(ln_gamma(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ln_gamma(-2.0), std::invalid_argument);
}

TEST_CASE("upper incomplete gamma: anchors and negative parameters") {
    CHECK(upper_incomplete_gamma(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
    CHECK(upper_incomplete_gamma(2.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(upper_incomplete_gamma(-0.5, 1.0) == doctest::Approx(0.1781477117815607).epsilon(1e-11));
    // quadrature oracle at a negative non-integer parameter
    CHECK(upper_incomplete_gamma(-0.5, 1.0) ==
          doctest::Approx(upper_gamma_quadrature(-0.5, 1.0)).epsilon(1e-9));
    CHECK(upper_incomplete_gamma(-3.7, 0.4) ==
          doctest::Approx(upper_gamma_quadrature(-3.7, 0.4)).epsilon(1e-9));
    CHECK(upper_incomplete_gamma(-2.0, 0.7) ==
          doctest::Approx(upper_gamma_quadrature(-2.0, 0.7)).epsilon(1e-9));
    CHECK_THROWS_AS(upper_incomplete_gamma(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(upper_incomplete_gamma(300.0, 0.1), std::overflow_error);
}

TEST_CASE("upper incomplete gamma: recurrence identity") {
    for (double s : {-2.3, -0.5, 0.7, 3.1}) {
        for (double x : {0.1, 1.0, 10.0}) {
            const double lhs = upper_incomplete_gamma(s + 1.0, x);
            const double rhs = s * upper_incomplete_gamma(s, x) + std::pow(x, s) * std::exp(-x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("log_upper_incomplete_gamma consistent with the linear value") {
    for (double s : {-20.5, -4.2, -1.0, 0.0, 0.5, 6.0}) {
        for (double x : {0.05, 0.8, 3.0, 20.0}) {
            const double lin = upper_incomplete_gamma(s, x);
            CHECK(log_upper_incomplete_gamma(s, x) == doctest::Approx(std::log(lin)).epsilon(1e-10));
        }
    }
    // stays finite far beyond double range
    CHECK(std::isfinite(log_upper_incomplete_gamma(-150.5, 0.63)));
    CHECK(std::isfinite(log_upper_incomplete_gamma(400.0, 1.0)));
}

TEST_CASE("chi2_cdf values, bounds and monotonicity") {
    CHECK(chi2_cdf(2, 9.2103404) == doctest::Approx(0.99).epsilon(1e-8));
    CHECK(chi2_cdf(8, 0.0) == 0.0);
    CHECK(chi2_cdf(4, 3.0) == doctest::Approx(0.4421745996289254).epsilon(1e-10));
    // exponential tail closed form for 2 dof
    for (double x : {0.3, 1.0, 4.0, 15.0})
        CHECK(chi2_cdf(2, x) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
    for (int k : {1, 2, 5, 16, 128}) {
        double prev = -1.0;
        for (double x = 0.0; x <= 300.0; x += 2.5) {
            const double v = chi2_cdf(k, x);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(chi2_cdf(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(chi2_cdf(2, -1.0), std::invalid_argument);
}

TEST_CASE("noncentral chi2 cdf: central reduction, frozen value, MC oracle") {
    CHECK(noncentral_chi2_cdf(2, 0.0, 9.2103404) == doctest::Approx(0.99).epsilon(1e-8));
    CHECK(noncentral_chi2_cdf(6, 5.0, 0.0) == 0.0);
    CHECK(noncentral_chi2_cdf(4, 2.0, 5.0) == doctest::Approx(0.48196384244277046).epsilon(1e-10));

    // Monte Carlo oracle: ||z + mu||^2 over 4 standard normals
    std::mt19937_64 rng(99);
    std::normal_distribution<double> normal;
    const long n = 2'000'000;
    long hits = 0;
    const double mu = std::sqrt(2.0 / 4.0);  // nc = 4 mu^2 = 2
    for (long i = 0; i < n; ++i) {
        double q = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double z = normal(rng) + mu;
            q += z * z;
        }
        if (q <= 5.0) ++hits;
    }
    const double mc = static_cast<double>(hits) / n;
    const double se = std::sqrt(mc * (1.0 - mc) / n);
    CHECK(std::abs(noncentral_chi2_cdf(4, 2.0, 5.0) - mc) < 4.0 * se);
}

TEST_CASE("noncentral chi2 cdf: reduction and stochastic dominance on a grid") {
    for (int k : {2, 8, 32}) {
        for (double x : {0.5, 3.0, 10.0, 40.0}) {
            CHECK(noncentral_chi2_cdf(k, 0.0, x) == doctest::Approx(chi2_cdf(k, x)).epsilon(1e-10));
            double prev = 2.0;
            for (double nc : {0.0, 0.5, 2.0, 8.0, 30.0, 120.0, 1000.0}) {
                const double v = noncentral_chi2_cdf(k, nc, x);
                CHECK(v <= prev + 1e-12);
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
                prev = v;
            }
        }
    }
    // deep-tail arguments stay finite and ordered
    const double deep = noncentral_chi2_cdf(8, 900.0, 200.0);
    CHECK(deep > 0.0);
    CHECK(deep < 1e-6);
    CHECK(noncentral_chi2_cdf(4, 3000.0, 30.0) >= 0.0);
    CHECK(noncentral_chi2_cdf(4, 3000.0, 30.0) < 1e-200);
}

TEST_CASE("generalized binomial") {
    CHECK(generalized_binomial(3.0, 2) == doctest::Approx(3.0));
    CHECK(generalized_binomial(-7.3, 0) == 1.0);
    CHECK(generalized_binomial(12.9, 0) == 1.0);
    CHECK(generalized_binomial(1.5, 2) == doctest::Approx(0.375).epsilon(1e-14));
    // poles of the gamma route are regular here
    CHECK(generalized_binomial(-2.0, 3) == doctest::Approx(-4.0).epsilon(1e-13));
    CHECK_THROWS_AS(generalized_binomial(1.0, -1), std::invalid_argument);
    CHECK_THROWS_AS(generalized_binomial(1e8, 400), std::overflow_error);
}

TEST_CASE("poisson binomial pmf: closed forms") {
    const auto sym = poisson_binomial_pmf({0.5, 0.5});
    REQUIRE(sym.size() == 3);
    CHECK(sym[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sym[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sym[2] == doctest::Approx(0.25).epsilon(1e-14));

    const auto single = poisson_binomial_pmf({0.3});
    CHECK(single[0] == doctest::Approx(0.7));
    CHECK(single[1] == doctest::Approx(0.3));

    const auto two = poisson_binomial_pmf({0.1, 0.9});
    CHECK(two[0] == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(two[1] == doctest::Approx(0.82).epsilon(1e-14));
    CHECK(two[2] == doctest::Approx(0.09).epsilon(1e-14));

    CHECK_THROWS_AS(poisson_binomial_pmf({0.5, 1.2}), std::invalid_argument);
    CHECK_THROWS_AS(poisson_binomial_pmf({-0.1}), std::invalid_argument);
}

TEST_CASE("poisson binomial pmf: normalization and brute-force enumeration") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        std::vector<double> probs(n);
        for (auto& p : probs) p = unif(rng);
        const auto pmf = poisson_binomial_pmf(probs);
        REQUIRE(pmf.size() == static_cast<std::size_t>(n + 1));

        double sum = 0.0;
        for (double v : pmf) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        // enumerate all 2^n outcomes
        std::vector<double> brute(n + 1, 0.0);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            double p = 1.0;
            int k = 0;
            for (int i = 0; i < n; ++i) {
                if (mask & (1u << i)) {
                    p *= probs[i];
                    ++k;
                } else {
                    p *= 1.0 - probs[i];
                }
            }
            brute[k] += p;
        }
        for (int k = 0; k <= n; ++k) CHECK(pmf[k] == doctest::Approx(brute[k]).epsilon(1e-10));
    }
}

TEST_CASE("RealTolerance validation") {
    const RealTolerance zero{0.0, 100};
    const RealTolerance loose{0.5, 100};
    const RealTolerance short_cap{1e-9, 8};
    CHECK_THROWS_AS(zero.validate(), std::invalid_argument);
    CHECK_THROWS_AS(loose.validate(), std::invalid_argument);
    CHECK_THROWS_AS(short_cap.validate(), std::invalid_argument);
    CHECK_NOTHROW(RealTolerance{}.validate());
}
