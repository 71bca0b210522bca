#pragma once

// Globally adaptive 7-15 point Gauss-Kronrod integration on a finite interval.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

namespace hestonlt::quad {

struct Estimate {
    double value = 0.0;
    double abs_error = 0.0;
};

struct AdaptiveResult {
    double value = 0.0;
    double abs_error = 0.0;
    int subdivisions = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    Estimate estimate;
    bool operator<(const Panel& other) const { return estimate.abs_error < other.estimate.abs_error; }
};

}  // namespace detail

// Single G7/K15 panel; the error is |K15 - G7|.
template <class F>
Estimate gauss_kronrod15(F&& f, double a, double b) {
    using namespace detail;
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Bisects the panel with the largest error estimate until the summed error is
// below max(abs_tol, rel_tol * |value|) or the panel budget is spent.
// `breakpoints` must be sorted and contain at least two entries.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, std::span<const double> breakpoints, double abs_tol, double rel_tol,
                                  int max_subdivisions) {
    std::priority_queue<detail::Panel> heap;
    AdaptiveResult out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(b > a)) continue;
        detail::Panel panel{a, b, gauss_kronrod15(f, a, b)};
        out.value += panel.estimate.value;
        out.abs_error += panel.estimate.abs_error;
        heap.push(panel);
    }
    while (!heap.empty()) {
        if (out.abs_error <= std::max(abs_tol, rel_tol * std::abs(out.value))) {
            out.converged = true;
            return out;
        }
        if (out.subdivisions >= max_subdivisions) {
            return out;
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const detail::Panel left{worst.a, mid, gauss_kronrod15(f, worst.a, mid)};
        const detail::Panel right{mid, worst.b, gauss_kronrod15(f, mid, worst.b)};
        out.value += left.estimate.value + right.estimate.value - worst.estimate.value;
        out.abs_error += left.estimate.abs_error + right.estimate.abs_error - worst.estimate.abs_error;
        heap.push(left);
        heap.push(right);
        ++out.subdivisions;
    }
    out.converged = true;
    return out;
}

}  // namespace hestonlt::quad
