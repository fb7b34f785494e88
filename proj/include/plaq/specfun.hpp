#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

// Special functions backing the detection formulas and the Mellin-transform
// series: incomplete gamma (including negative parameter), central and
// noncentral chi-square CDFs, generalized binomial coefficients and the
// Poisson-binomial pmf. All functions are pure and thread-safe.

namespace plaq::specfun {

// Truncation control for infinite series evaluations.
struct RealTolerance {
    double rel_tol = 1e-9;
    std::size_t max_terms = 200;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol < 1e-2))
            throw std::invalid_argument("RealTolerance: rel_tol must be in (0, 1e-2)");
        if (max_terms < 16)
            throw std::invalid_argument("RealTolerance: max_terms must be >= 16");
    }
};

// Thrown when a series hits max_terms without meeting its stop criterion.
class NonConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// ln Gamma(x), x > 0.
double ln_gamma(double x);

// Regularized incomplete gamma P(a,x) and Q(a,x) = 1 - P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper incomplete gamma Gamma(s,x) = int_x^inf t^{s-1} e^{-t} dt for any
// real s and x > 0. Negative s is reached by the downward recurrence
// Gamma(s,x) = (Gamma(s+1,x) - x^s e^{-x}) / s from a positive anchor when x
// is small, and by the continued fraction otherwise. Overflow throws.
double upper_incomplete_gamma(double s, double x);

// ln Gamma(s,x); the value itself is positive for all real s, x > 0. Stays
// finite where upper_incomplete_gamma would over- or underflow.
double log_upper_incomplete_gamma(double s, double x);

// CDF of a central chi-square with k_dof degrees of freedom.
double chi2_cdf(int k_dof, double x);

// CDF of a noncentral chi-square (k_dof, noncentrality nc >= 0), evaluated
// as the Poisson-weighted mixture of central CDFs expanded outward from the
// Poisson mode. Falls back to a log-domain accumulation when the weights
// underflow. Reduces exactly to chi2_cdf at nc = 0.
double noncentral_chi2_cdf(int k_dof, double nc, double x);

// Generalized binomial coefficient C(a,m) = a(a-1)...(a-m+1)/m! by product
// recurrence (no gamma-function poles at negative integers).
double generalized_binomial(double a, int m);

// Poisson-binomial pmf over {0..n} by iterative convolution of the Bernoulli
// factors. Entries sum to 1 within 1e-12.
std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs);

}  // namespace plaq::specfun
