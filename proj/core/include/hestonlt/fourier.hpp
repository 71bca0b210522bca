#pragma once

// Reference Heston call pricer: Lee's Fourier inversion along the horizontal
// line Im(k) = alpha inside the moment strip, with the residue terms picked
// by the position of alpha relative to the poles at 0 and 1.

#include <functional>

#include "hestonlt/asymptotics.hpp"
#include "hestonlt/heston.hpp"

namespace hestonlt {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double initial_truncation = 200.0;
    double max_truncation = 1e5;
    int max_subdivisions = 2000;

    // Throws Error{InvalidConfig}.
    void validate() const;
};

enum class ContourMode { saddlepoint, lee_default, user };

struct ContourChoice {
    double alpha = 0.5;
    ContourMode mode = ContourMode::lee_default;
};

enum class StrikeConvention {
    rate,   // K = S e^{x t}
    total,  // K = S e^{x}
};

struct StrikeSpec {
    StrikeConvention convention = StrikeConvention::total;
    double x = 0.0;

    double total_log_moneyness(double t) const { return convention == StrikeConvention::rate ? x * t : x; }
};

// alpha = p*(x_rate) clamped into the strip with margin 1e-6 (p_plus - p_minus);
// values within 1e-9 of a pole land exactly on it.
ContourChoice default_alpha(const HestonParams& params, double x_rate);

// alpha = 1/2, always admissible since p_minus < 0 and p_plus > 1.
ContourChoice lee_default_alpha();

// Throws Error{OutsideStrip}.
ContourChoice user_alpha(const HestonParams& params, double alpha);

// Residue terms of the inversion formula for a given alpha.
double lee_residue(double alpha, double x_total);

// Normalized call price for strike S e^{x_total}.
// Throws Error{OutsideStrip | TruncationFailure | SubdivisionExhausted | NonPositiveInput}.
PricingResult lee_call_price(const HestonParams& params, double x_total, double t, const ContourChoice& contour,
                             const QuadratureConfig& quad = {});

// Same inversion for an arbitrary characteristic function phi(z) = E[exp(i z (X_t - x_0))]
// that is analytic on the line -Im(z) = alpha.
PricingResult lee_call_price_cf(const std::function<complex(complex)>& phi, double x_total, double t,
                                double alpha, const QuadratureConfig& quad = {});

// Saddlepoint contour, default quadrature.
PricingResult fourier_price(const HestonParams& params, const StrikeSpec& strike, double t,
                            const QuadratureConfig& quad = {});

// Black-Scholes implied volatility of the Fourier price.
double exact_implied_vol(const HestonParams& params, const StrikeSpec& strike, double t,
                         const QuadratureConfig& quad = {});

}  // namespace hestonlt
