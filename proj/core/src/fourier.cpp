#include "hestonlt/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hestonlt/black_scholes.hpp"
#include "hestonlt/errors.hpp"
#include "hestonlt/quadrature.hpp"

namespace hestonlt {

namespace {

constexpr complex kI{0.0, 1.0};
constexpr double kPoleSnap = 1e-9;

// Initial panel boundaries on [0, R]: geometric refinement towards the origin
// so narrow peaks (large t, or alpha close to a pole) are seen by the first pass.
std::vector<double> initial_breakpoints(double alpha, double t, double truncation) {
    const double pole_distance = std::min(std::abs(alpha), std::abs(alpha - 1.0));
    double finest = std::min(0.25, 1.0 / std::sqrt(t));
    if (pole_distance > 0.0) finest = std::min(finest, pole_distance);
    std::vector<double> points{0.0};
    for (double p = 0.25 * finest; p < truncation; p *= 4.0) points.push_back(p);
    points.push_back(truncation);
    return points;
}

}  // namespace

void QuadratureConfig::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(initial_truncation > 0.0) ||
        !(initial_truncation <= max_truncation) || max_subdivisions < 1) {
        throw Error(ErrorCode::InvalidConfig,
                    "tolerances must be positive, initial_truncation <= max_truncation, max_subdivisions >= 1");
    }
}

ContourChoice default_alpha(const HestonParams& params, double x_rate) {
    const double margin = 1e-6 * (params.p_plus() - params.p_minus());
    double alpha = std::clamp(saddlepoint(params, x_rate), params.p_minus() + margin, params.p_plus() - margin);
    if (std::abs(alpha) < kPoleSnap) alpha = 0.0;
    if (std::abs(alpha - 1.0) < kPoleSnap) alpha = 1.0;
    return {alpha, ContourMode::saddlepoint};
}

ContourChoice lee_default_alpha() { return {0.5, ContourMode::lee_default}; }

ContourChoice user_alpha(const HestonParams& params, double alpha) {
    if (!params.in_moment_domain(alpha)) {
        throw Error(ErrorCode::OutsideStrip, "contour level " + std::to_string(alpha) + " outside the moment strip");
    }
    return {alpha, ContourMode::user};
}

double lee_residue(double alpha, double x_total) {
    if (alpha < 0.0) return -std::expm1(x_total);
    if (alpha == 0.0) return 1.0 - 0.5 * std::exp(x_total);
    if (alpha < 1.0) return 1.0;
    if (alpha == 1.0) return 0.5;
    return 0.0;
}

PricingResult lee_call_price_cf(const std::function<complex(complex)>& phi, double x_total, double t,
                                double alpha, const QuadratureConfig& quad) {
    quad.validate();
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be positive");
    }

    // Real part is even in k_r, so integrate 2 Re(.) over k_r >= 0 and fold the
    // e^{x}/(2 pi) prefactor in.
    const double scale = std::exp(x_total) / std::numbers::pi;
    auto integrand = [&](double u) {
        const complex k{u, alpha};
        const complex value = std::exp(kI * k * x_total) * phi(-k) / (kI * k - k * k);
        return scale * value.real();
    };

    PricingResult out;
    out.method = PricingMethod::fourier;
    out.residue_part = lee_residue(alpha, x_total);

    double truncation = quad.initial_truncation;
    const std::vector<double> points = initial_breakpoints(alpha, t, truncation);
    quad::AdaptiveResult body =
        quad::integrate_adaptive(integrand, points, quad.abs_tol, quad.rel_tol, quad.max_subdivisions);
    int used = body.subdivisions;
    if (!body.converged) {
        throw Error(ErrorCode::SubdivisionExhausted, "subdivision budget exhausted on [0, R]");
    }
    double integral = body.value;
    double error = body.abs_error;

    while (true) {
        const double lo = truncation;
        const double hi = 2.0 * truncation;
        const std::array<double, 2> panel{lo, hi};
        const quad::AdaptiveResult tail =
            quad::integrate_adaptive(integrand, panel, quad.abs_tol, quad.rel_tol, quad.max_subdivisions - used);
        used += tail.subdivisions;
        if (!tail.converged) {
            throw Error(ErrorCode::SubdivisionExhausted, "subdivision budget exhausted in the tail");
        }
        integral += tail.value;
        error += tail.abs_error;
        truncation = hi;
        if (std::abs(tail.value) < 0.1 * std::max(quad.abs_tol, quad.rel_tol * std::abs(integral))) {
            break;
        }
        if (truncation >= quad.max_truncation) {
            throw Error(ErrorCode::TruncationFailure,
                        "integrand still significant at truncation " + std::to_string(truncation));
        }
    }

    out.correction_part = integral;
    out.error_estimate = error;
    out.normalized_price = out.residue_part + out.correction_part;
    return out;
}

PricingResult lee_call_price(const HestonParams& params, double x_total, double t, const ContourChoice& contour,
                             const QuadratureConfig& quad) {
    if (!params.in_moment_domain(contour.alpha)) {
        throw Error(ErrorCode::OutsideStrip,
                    "contour level " + std::to_string(contour.alpha) + " outside the moment strip");
    }
    auto phi = [&](complex z) { return char_fn(params, t, z); };
    return lee_call_price_cf(phi, x_total, t, contour.alpha, quad);
}

PricingResult fourier_price(const HestonParams& params, const StrikeSpec& strike, double t,
                            const QuadratureConfig& quad) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be positive");
    }
    const double x_total = strike.total_log_moneyness(t);
    return lee_call_price(params, x_total, t, default_alpha(params, x_total / t), quad);
}

double exact_implied_vol(const HestonParams& params, const StrikeSpec& strike, double t,
                         const QuadratureConfig& quad) {
    const PricingResult price = fourier_price(params, strike, t, quad);
    return implied_vol(price.normalized_price, strike.total_log_moneyness(t), t);
}

}  // namespace hestonlt
