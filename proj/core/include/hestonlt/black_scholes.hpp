#pragma once

// Black-Scholes side of the large-maturity analysis: the zero-rate call
// formula, implied volatility inversion, the BS cgf / rate function /
// saddlepoint triple, the amplitude A_BS and the two large-time expansions.
// All prices are normalized by spot.

namespace hestonlt {

// Standard normal cdf via erfc; accurate in both tails.
double norm_cdf(double z);
double norm_pdf(double z);

// Normalized zero-rate call price C/S. Throws Error{NonPositiveInput}.
double bs_call(double spot, double strike, double t, double vol);

// Same, in terms of total log-moneyness x_total = log(K/S).
double bs_call_normalized(double x_total, double t, double vol);

// d C / d vol for the normalized call.
double bs_vega_normalized(double x_total, double t, double vol);

struct ImpliedVolConfig {
    int max_iterations = 200;
    double price_rel_tol = 1e-13;
};

// Volatility reproducing a normalized call price. Bracketing followed by
// safeguarded Newton with bisection fallback.
// Throws Error{PriceOutOfBounds | NoConvergence | NonPositiveInput}.
double implied_vol(double normalized_price, double x_total, double t, const ImpliedVolConfig& config = {});

// Large-time residue I(x, t; a, b).
struct PiecewiseResidue {
    double x = 0.0;
    double t = 0.0;
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
};

// Knife edges x == a and x == b are exact floating comparisons.
// Throws Error{ThresholdOrder} when a >= b.
PiecewiseResidue indicator_residue(double x, double t, double a, double b);

// V_BS(p) = p (p - 1) sigma^2 / 2, V*_BS(x) = (x + sigma^2/2)^2 / (2 sigma^2),
// p*_BS(x) = (x + sigma^2/2) / sigma^2. Throw Error{NonPositiveSigma}.
double bs_cgf(double p, double sigma);
double bs_rate(double x, double sigma);
double bs_saddle(double x, double sigma);

// Amplitude of the (2 pi t)^{-1/2} term in the BS large-time expansion with
// variance sigma^2 + a1/t. Finite special value at x = +-sigma^2/2.
double a_bs(double x, double sigma, double a1);

// Inputs of the two BS expansions; sigma^2 + a1/t must stay positive.
struct BsExpansionInput {
    double x = 0.0;
    double sigma = 0.0;
    double a1 = 0.0;
};

// Residue plus Gaussian-order correction for strike S e^{x t}.
// Throws Error{NonPositiveSigma | NonPositiveEffectiveVariance}.
double bs_call_large_time(double x, double t, double sigma, double a1);
double bs_call_large_time(const BsExpansionInput& in, double t);

// 1 - 2 sqrt(2) / (sigma sqrt(pi t)) exp(-sigma^2 t / 8 + x/2 - a1/8) for strike S e^{x}.
double bs_call_fixed_strike_large_time(double x_total, double t, double sigma, double a1);

}  // namespace hestonlt
