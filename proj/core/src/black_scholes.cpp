#include "hestonlt/black_scholes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hestonlt/errors.hpp"

namespace hestonlt {

namespace {

void require_positive_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive, got " + std::to_string(sigma));
    }
}

void require_effective_variance(double sigma, double a1, double t) {
    require_positive_sigma(sigma);
    if (!(t > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be positive");
    }
    if (!(sigma * sigma + a1 / t > 0.0)) {
        throw Error(ErrorCode::NonPositiveEffectiveVariance,
                    "sigma^2 + a1/t must be positive at t=" + std::to_string(t));
    }
}

// Normalized call as a function of the total standard deviation sd = vol*sqrt(t).
double call_from_sd(double x, double sd) {
    const double d1 = -x / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    const double ex = std::exp(x);
    if (d2 >= 0.0) {
        // Deep in the money: intrinsic plus two small tails.
        return (1.0 - ex) + (ex * norm_cdf(-d2) - norm_cdf(-d1));
    }
    if (d1 >= 0.0) {
        return 1.0 - norm_cdf(-d1) - ex * norm_cdf(d2);
    }
    return norm_cdf(d1) - ex * norm_cdf(d2);
}

// Out-of-the-money leg: the call for x >= 0, the put otherwise. Both have
// derivative norm_pdf(d1) in sd.
double otm_from_sd(double x, double sd) {
    const double d1 = -x / sd + 0.5 * sd;
    const double d2 = d1 - sd;
    const double ex = std::exp(x);
    if (x >= 0.0) return norm_cdf(d1) - ex * norm_cdf(d2);
    return ex * norm_cdf(-d2) - norm_cdf(-d1);
}

}  // namespace

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double bs_call(double spot, double strike, double t, double vol) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(t > 0.0) || !(vol > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "spot, strike, maturity and volatility must be positive");
    }
    return call_from_sd(std::log(strike / spot), vol * std::sqrt(t));
}

double bs_call_normalized(double x_total, double t, double vol) {
    if (!(t > 0.0) || !(vol > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity and volatility must be positive");
    }
    return call_from_sd(x_total, vol * std::sqrt(t));
}

double bs_vega_normalized(double x_total, double t, double vol) {
    const double sd = vol * std::sqrt(t);
    const double d1 = -x_total / sd + 0.5 * sd;
    return norm_pdf(d1) * std::sqrt(t);
}

double implied_vol(double normalized_price, double x_total, double t, const ImpliedVolConfig& config) {
    if (!(t > 0.0) || !std::isfinite(x_total)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be positive and log-moneyness finite");
    }
    const double intrinsic = std::max(0.0, -std::expm1(x_total));
    if (!(normalized_price > intrinsic && normalized_price < 1.0)) {
        throw Error(ErrorCode::PriceOutOfBounds,
                    "price " + std::to_string(normalized_price) + " outside (" + std::to_string(intrinsic) +
                        ", 1)");
    }

    // Work on the out-of-the-money leg and Newton-step its logarithm, which stays
    // well scaled when the price is exponentially small.
    const double target = x_total >= 0.0 ? normalized_price : normalized_price + std::expm1(x_total);
    if (!(target > 0.0)) {
        throw Error(ErrorCode::PriceOutOfBounds, "time value below double resolution");
    }
    const double log_target = std::log(target);

    double lo = 0.0;
    double hi = 1.0;
    int iterations = 0;
    while (otm_from_sd(x_total, hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (++iterations > 64) {
            throw Error(ErrorCode::NoConvergence, "could not bracket the implied volatility");
        }
    }

    double sd = std::sqrt(2.0 * std::abs(x_total));
    if (!(sd > lo && sd < hi)) sd = 0.5 * (lo + hi);

    for (int it = 0; it < config.max_iterations; ++it) {
        const double value = otm_from_sd(x_total, sd);
        if (std::abs(value - target) <= config.price_rel_tol * target) {
            return sd / std::sqrt(t);
        }
        if (value > target) {
            hi = sd;
        } else {
            lo = sd;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            return 0.5 * (lo + hi) / std::sqrt(t);
        }
        double next = 0.5 * (lo + hi);
        if (value > 0.0) {
            const double slope = norm_pdf(-x_total / sd + 0.5 * sd) / value;
            if (slope > 0.0) next = sd - (std::log(value) - log_target) / slope;
        }
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        sd = next;
    }
    throw Error(ErrorCode::NoConvergence, "implied volatility iteration budget exhausted");
}

PiecewiseResidue indicator_residue(double x, double t, double a, double b) {
    if (!(a < b)) {
        throw Error(ErrorCode::ThresholdOrder, "lower threshold must be below upper threshold");
    }
    PiecewiseResidue out{x, t, a, b, 0.0};
    if (x < a) {
        out.value = -std::expm1(x * t);
    } else if (x == a) {
        // Half the strike residue survives on the lower knife edge (the Fourier
        // contour then passes through the pole at the origin).
        out.value = 1.0 - 0.5 * std::exp(a * t);
    } else if (x < b) {
        out.value = 1.0;
    } else if (x == b) {
        out.value = 0.5;
    } else {
        out.value = 0.0;
    }
    return out;
}

double bs_cgf(double p, double sigma) {
    require_positive_sigma(sigma);
    return 0.5 * p * (p - 1.0) * sigma * sigma;
}

double bs_rate(double x, double sigma) {
    require_positive_sigma(sigma);
    const double s2 = sigma * sigma;
    const double shifted = x + 0.5 * s2;
    return shifted * shifted / (2.0 * s2);
}

double bs_saddle(double x, double sigma) {
    require_positive_sigma(sigma);
    const double s2 = sigma * sigma;
    return (x + 0.5 * s2) / s2;
}

double a_bs(double x, double sigma, double a1) {
    require_positive_sigma(sigma);
    const double half_var = 0.5 * sigma * sigma;
    if (x == half_var || x == -half_var) {
        return (0.5 * a1 - 1.0) / sigma;
    }
    const double s4 = sigma * sigma * sigma * sigma;
    return std::exp(0.125 * a1 * (4.0 * x * x / s4 - 1.0)) * sigma * sigma * sigma /
           ((x - half_var) * (x + half_var));
}

double bs_call_large_time(double x, double t, double sigma, double a1) {
    require_effective_variance(sigma, a1, t);
    const double half_var = 0.5 * sigma * sigma;
    const double residue = indicator_residue(x, t, -half_var, half_var).value;
    const double correction = a_bs(x, sigma, a1) / std::sqrt(2.0 * std::numbers::pi * t) *
                              std::exp(-(bs_rate(x, sigma) - x) * t);
    return residue + correction;
}

double bs_call_large_time(const BsExpansionInput& in, double t) {
    return bs_call_large_time(in.x, t, in.sigma, in.a1);
}

double bs_call_fixed_strike_large_time(double x_total, double t, double sigma, double a1) {
    require_effective_variance(sigma, a1, t);
    return 1.0 - 2.0 * std::numbers::sqrt2 / (sigma * std::sqrt(std::numbers::pi * t)) *
                     std::exp(-sigma * sigma * t / 8.0 + 0.5 * x_total - a1 / 8.0);
}

}  // namespace hestonlt
