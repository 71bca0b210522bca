#include "hestonlt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hestonlt/black_scholes.hpp"
#include "hestonlt/errors.hpp"

namespace hestonlt {

namespace {

// sgn(x) is +1 for x > 0 and -1 otherwise, including x == 0.
double sgn(double x) { return x > 0.0 ? 1.0 : -1.0; }

void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be positive");
    }
}

// Bracket {-1 - sgn(x) (V'''/(6 V'') - U'(p))} evaluated at the pole p in {0, 1}.
double special_bracket(const HestonParams& params, double p, double x) {
    const CgfDerivatives der = cgf_derivatives(params, p);
    return -1.0 - sgn(x) * (der.third / (6.0 * der.second) - u_prime(params, p));
}

struct SpecialPoint {
    double x;
    double p;
    double sigma_sq;
};

SpecialPoint special_point(const HestonParams& params, SmileRegime regime) {
    if (regime == SmileRegime::special_minus_theta_half) {
        return {params.lower_threshold(), 0.0, params.theta()};
    }
    return {params.upper_threshold(), 1.0, params.theta_bar()};
}

}  // namespace

SmileRegime classify(const HestonParams& params, double x, double* snapped) {
    SmileRegime regime = SmileRegime::general;
    double value = x;
    if (std::abs(x - params.lower_threshold()) < kSpecialPointSnap) {
        regime = SmileRegime::special_minus_theta_half;
        value = params.lower_threshold();
    } else if (std::abs(x - params.upper_threshold()) < kSpecialPointSnap) {
        regime = SmileRegime::special_theta_bar_half;
        value = params.upper_threshold();
    }
    if (snapped != nullptr) *snapped = value;
    return regime;
}

double amplitude_A_general(const HestonParams& params, double x) {
    const RateFunctionPoint rf = rate_function(params, x);
    const double p = rf.p_star;
    return u_fn(params, p) / (p * (p - 1.0)) / std::sqrt(rf.v2);
}

double amplitude_A_special(const HestonParams& params, double x) {
    const double p = saddlepoint(params, x);
    const double v2 = cgf_derivatives(params, p).second;
    return special_bracket(params, p, x) / std::sqrt(v2);
}

double amplitude_A(const HestonParams& params, double x) {
    const SmileRegime regime = classify(params, x);
    if (regime == SmileRegime::general) {
        return amplitude_A_general(params, x);
    }
    const SpecialPoint sp = special_point(params, regime);
    return special_bracket(params, sp.p, sp.x) / std::sqrt(cgf_derivatives(params, sp.p).second);
}

PricingResult call_price_asymptotic(const HestonParams& params, double x, double t) {
    require_positive_time(t);
    double xs = x;
    classify(params, x, &xs);
    const RateFunctionPoint rf = rate_function(params, xs);
    PricingResult out;
    out.method = PricingMethod::asymptotic;
    out.residue_part = indicator_residue(xs, t, params.lower_threshold(), params.upper_threshold()).value;
    out.correction_part = std::exp(-(rf.v_star - xs) * t) / std::sqrt(2.0 * std::numbers::pi * t) *
                          amplitude_A(params, xs);
    out.normalized_price = out.residue_part + out.correction_part;
    return out;
}

PricingResult call_price_fixed_strike_asymptotic(const HestonParams& params, double x_total, double t) {
    require_positive_time(t);
    const RateFunctionPoint rf0 = rate_function(params, 0.0);
    PricingResult out;
    out.method = PricingMethod::asymptotic;
    out.residue_part = 1.0;
    out.correction_part = amplitude_A(params, 0.0) / std::sqrt(2.0 * std::numbers::pi * t) *
                          std::exp((1.0 - rf0.p_star) * x_total - rf0.v_star * t);
    out.normalized_price = out.residue_part + out.correction_part;
    return out;
}

double sigma_inf_sq(const HestonParams& params, double x) {
    const double v = rate_function(params, x).v_star;
    const bool inside = x > params.lower_threshold() && x < params.upper_threshold();
    const double root = std::sqrt(std::max(v * (v - x), 0.0));
    return 2.0 * (2.0 * v - x + (inside ? 2.0 : -2.0) * root);
}

namespace {

double a1_hat_special(const HestonParams& params, const SpecialPoint& sp) {
    const CgfDerivatives der = cgf_derivatives(params, sp.p);
    const double inner = 1.0 + sgn(sp.x) * (der.third / (6.0 * der.second) - u_prime(params, sp.p));
    return 2.0 * (1.0 - std::sqrt(sp.sigma_sq) / std::sqrt(der.second) * inner);
}

double a1_hat_general(const HestonParams& params, double x) {
    const double amp = amplitude_A_general(params, x);
    const double s2 = sigma_inf_sq(params, x);
    const double amp_bs = a_bs(x, std::sqrt(s2), 0.0);
    if (!(amp * amp_bs > 0.0)) {
        throw Error(ErrorCode::AmplitudeRatioNonPositive,
                    "A(x)/A_BS(x) is not positive at x=" + std::to_string(x));
    }
    const double log_ratio = std::log(std::abs(amp)) - std::log(std::abs(amp_bs));
    const double factor = (x - 0.5 * s2) * (x + 0.5 * s2) / (s2 * s2);
    return 2.0 * log_ratio / factor;
}

}  // namespace

double a1_hat(const HestonParams& params, double x) {
    const SmileRegime regime = classify(params, x);
    if (regime != SmileRegime::general) {
        return a1_hat_special(params, special_point(params, regime));
    }

    // The general branch is a 0/0 form at both special points and its rounding
    // error grows like |x - x_special|^{-3}. Close to them, interpolate
    // quadratically through the special value and two samples further out on
    // the same side.
    const double window = std::min(1e-3, 0.1 * (params.upper_threshold() - params.lower_threshold()));
    for (SmileRegime near : {SmileRegime::special_minus_theta_half, SmileRegime::special_theta_bar_half}) {
        const SpecialPoint sp = special_point(params, near);
        const double h = x - sp.x;
        if (std::abs(h) >= window) continue;
        const double step = h > 0.0 ? window : -window;
        const double f0 = a1_hat_special(params, sp);
        const double f1 = a1_hat_general(params, sp.x + step);
        const double f2 = a1_hat_general(params, sp.x + 2.0 * step);
        const double u = h / step;
        return 0.5 * (u - 1.0) * (u - 2.0) * f0 - u * (u - 2.0) * f1 + 0.5 * u * (u - 1.0) * f2;
    }
    return a1_hat_general(params, x);
}

AsymptoticSmilePoint smile_point(const HestonParams& params, double x) {
    AsymptoticSmilePoint out;
    out.x = x;
    out.regime = classify(params, x);
    out.sigma_inf_sq = sigma_inf_sq(params, x);
    out.a1_hat = a1_hat(params, x);
    return out;
}

double implied_var_asymptotic(const HestonParams& params, double x, double t) {
    require_positive_time(t);
    const double value = sigma_inf_sq(params, x) + a1_hat(params, x) / t;
    if (!(value > 0.0)) {
        throw Error(ErrorCode::NonPositiveResult,
                    "two-term implied variance is not positive at x=" + std::to_string(x) +
                        ", t=" + std::to_string(t));
    }
    return value;
}

double fixed_strike_level(const HestonParams& params) { return 8.0 * rate_function(params, 0.0).v_star; }

double a1_fixed(const HestonParams& params, double x_total) {
    const RateFunctionPoint rf0 = rate_function(params, 0.0);
    const double amp0 = amplitude_A(params, 0.0);
    // Matching against the Black-Scholes fixed-strike expansion at variance 8 V*(0)
    // puts sqrt(V*(0)/2) here.
    const double arg = -amp0 * std::sqrt(0.5 * rf0.v_star);
    if (!(arg > 0.0)) {
        throw Error(ErrorCode::AmplitudeRatioNonPositive, "A(0) must be negative");
    }
    return -8.0 * std::log(arg) + 4.0 * (2.0 * rf0.p_star - 1.0) * x_total;
}

FixedStrikeSmilePoint fixed_strike_point(const HestonParams& params, double x_total) {
    return {x_total, fixed_strike_level(params), a1_fixed(params, x_total)};
}

double implied_var_fixed_strike(const HestonParams& params, double x_total, double t) {
    require_positive_time(t);
    const double value = fixed_strike_level(params) + a1_fixed(params, x_total) / t;
    if (!(value > 0.0)) {
        throw Error(ErrorCode::NonPositiveResult, "two-term fixed-strike implied variance is not positive");
    }
    return value;
}

}  // namespace hestonlt
