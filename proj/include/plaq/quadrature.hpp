#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

// Adaptive Gauss-Kronrod (G7/K15) quadrature on a finite interval with a
// worst-panel-first refinement queue and a hard work budget.

namespace plaq::quadrature {

namespace detail {

// 15-point Kronrod nodes/weights on [-1,1]; odd indices and the center form
// the embedded 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
};

template <typename F>
Panel gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int j = 0; j < 8; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double fsum = (j == 7) ? f1 : f1 + f(c + dx);
        resk += kWgk[j] * fsum;
        if (j == 7)
            resg += kWg[3] * fsum;
        else if (j % 2 == 1)
            resg += kWg[j / 2] * fsum;
    }
    return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

// Integrates f over [a,b] to roughly the requested relative tolerance.
// Throws only if the error estimate stays far above target after the budget
// is spent.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10, int max_panels = 4000) {
    const auto worse = [](const detail::Panel& x, const detail::Panel& y) {
        return x.error < y.error;
    };
    std::vector<detail::Panel> heap;  // max-heap on the error estimate
    double value = 0.0, error = 0.0;
    const auto push = [&](const detail::Panel& p) {
        value += p.value;
        error += p.error;
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end(), worse);
    };
    // seed with a few panels so a single sharp peak cannot hide from the rule
    constexpr int kSeed = 16;
    for (int i = 0; i < kSeed; ++i) {
        const double pa = a + (b - a) * i / kSeed;
        const double pb = a + (b - a) * (i + 1) / kSeed;
        push(detail::gk15(f, pa, pb));
    }
    while (static_cast<int>(heap.size()) < max_panels &&
           error > rel_tol * std::max(std::abs(value), 1e-280)) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        const detail::Panel split = heap.back();
        heap.pop_back();
        if (split.b - split.a < 1e-280) break;
        value -= split.value;
        error -= split.error;
        const double mid = 0.5 * (split.a + split.b);
        push(detail::gk15(f, split.a, mid));
        push(detail::gk15(f, mid, split.b));
    }
    // accumulated subtraction noise: recompute the totals once at the end
    value = 0.0;
    error = 0.0;
    for (const auto& p : heap) {
        value += p.value;
        error += p.error;
    }
    if (error > 1e3 * rel_tol * std::max(std::abs(value), 1e-280) &&
        error > 1e-12 * std::abs(value))
        throw std::runtime_error("quadrature: failed to reach requested accuracy");
    return value;
}

}  // namespace plaq::quadrature
