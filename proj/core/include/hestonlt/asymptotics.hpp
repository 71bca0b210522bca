#pragma once

// Large-maturity expansions of Heston call prices and implied volatility,
// both for maturity-scaled strikes K = S e^{x t} ("rate" convention) and
// for fixed strikes K = S e^{x} ("total" convention).

#include "hestonlt/heston.hpp"

namespace hestonlt {

// Inputs within this distance of -theta/2 or theta_bar/2 are treated as the
// special points themselves; the general branches are 0/0 forms there.
inline constexpr double kSpecialPointSnap = 1e-9;

enum class SmileRegime { general, special_minus_theta_half, special_theta_bar_half };

enum class PricingMethod { asymptotic, fourier };

struct AsymptoticSmilePoint {
    double x = 0.0;
    double sigma_inf_sq = 0.0;
    double a1_hat = 0.0;
    SmileRegime regime = SmileRegime::general;
};

struct FixedStrikeSmilePoint {
    double x_total = 0.0;
    double level = 0.0;  // 8 V*(0)
    double a1 = 0.0;
};

struct PricingResult {
    double normalized_price = 0.0;
    PricingMethod method = PricingMethod::asymptotic;
    double residue_part = 0.0;
    double correction_part = 0.0;
    double error_estimate = 0.0;  // absolute; zero for closed-form expansions
};

// Regime of x after snapping; `snapped` receives the exact special point when one applies.
SmileRegime classify(const HestonParams& params, double x, double* snapped = nullptr);

// Amplitude A(x) of the (2 pi t)^{-1/2} term; special branch at the two thresholds.
double amplitude_A(const HestonParams& params, double x);
// Unsnapped branches, exposed for diagnostics and tests.
double amplitude_A_general(const HestonParams& params, double x);
double amplitude_A_special(const HestonParams& params, double x);

// Residue + (2 pi t)^{-1/2} exp(-(V*(x) - x) t) A(x) for strike S e^{x t}.
PricingResult call_price_asymptotic(const HestonParams& params, double x, double t);

// 1 + A(0) (2 pi t)^{-1/2} exp((1 - p*(0)) x - V*(0) t) for strike S e^{x}.
PricingResult call_price_fixed_strike_asymptotic(const HestonParams& params, double x_total, double t);

// Limiting implied variance for strike S e^{x t}.
double sigma_inf_sq(const HestonParams& params, double x);

// First-order implied variance correction. Throws Error{AmplitudeRatioNonPositive}.
double a1_hat(const HestonParams& params, double x);

AsymptoticSmilePoint smile_point(const HestonParams& params, double x);

// sigma_inf^2(x) + a1_hat(x)/t. Throws Error{NonPositiveResult}.
double implied_var_asymptotic(const HestonParams& params, double x, double t);

// Fixed-strike correction a1(x) = -8 log(-A(0) sqrt(V*(0) / 2)) + 4 (2 p*(0) - 1) x.
double a1_fixed(const HestonParams& params, double x_total);
double fixed_strike_level(const HestonParams& params);
FixedStrikeSmilePoint fixed_strike_point(const HestonParams& params, double x_total);

// 8 V*(0) + a1(x)/t. Throws Error{NonPositiveResult}.
double implied_var_fixed_strike(const HestonParams& params, double x_total, double t);

}  // namespace hestonlt
