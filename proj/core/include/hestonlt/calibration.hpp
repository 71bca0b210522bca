#pragma once

// Least-squares smile calibration. The closed-form asymptotic smile makes the
// objective cheap enough to fit from scratch; the Fourier mode refines the
// result against exact prices.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hestonlt/fourier.hpp"
#include "hestonlt/heston.hpp"

namespace hestonlt {

enum class QuoteKind { implied_vol, normalized_price };

struct Quote {
    double maturity = 0.0;  // years
    double strike = 0.0;
    double spot = 0.0;
    QuoteKind kind = QuoteKind::implied_vol;
    double value = 0.0;     // implied vol, or call price divided by spot
    double weight = 1.0;

    double total_log_moneyness() const;  // log(K/S)
    double rate_log_moneyness() const;   // log(K/S)/T
};

// Non-empty list of quotes that satisfied the row invariants when loaded.
struct QuoteSet {
    std::vector<Quote> quotes;

    std::size_t size() const noexcept { return quotes.size(); }
    bool empty() const noexcept { return quotes.empty(); }
};

enum class QuoteFormat { csv };

// Header `maturity_years,strike,spot,kind,value,weight`; the weight column (or
// an empty weight field) defaults to 1.
// Throws ParseError(row, column, reason) and Error{EmptyQuoteSet}.
QuoteSet load_quotes(std::istream& in, QuoteFormat format = QuoteFormat::csv);

// Throws ParseError when a quote violates the row invariants; `row` is reported back.
void validate_quote(const Quote& quote, std::size_t row);

// Market implied vol of a quote (price quotes are inverted).
double quote_implied_vol(const Quote& quote);

enum class ModelKind { asymptotic, fourier };

struct ObjectiveBreakdown {
    double value = 0.0;
    std::vector<double> residuals;          // model vol - quote vol
    std::vector<double> effective_weights;  // weight after near-threshold down-weighting
    std::vector<std::size_t> excluded;      // quotes where the model produced no vol
};

// Near -theta/2 and theta_bar/2 the asymptotic smile is not uniformly accurate;
// quotes that close (in log-moneyness per year) get their weight scaled down.
inline constexpr double kThresholdBand = 1e-3;
inline constexpr double kThresholdWeightFactor = 0.1;

// Weighted sum of squared vol residuals. A quote whose model variance is not
// positive (or whose pricing fails) is flagged as excluded and scored with a
// model vol of zero.
ObjectiveBreakdown evaluate_objective(const HestonParams& params, const QuoteSet& quotes, ModelKind model,
                                      const QuadratureConfig& quad = {});
double smile_objective(const HestonParams& params, const QuoteSet& quotes, ModelKind model,
                       const QuadratureConfig& quad = {});

struct CalibrationOptions {
    ModelKind model = ModelKind::asymptotic;
    int budget = 2000;               // optimizer iterations
    double simplex_tol = 1e-7;       // in the unconstrained coordinates
    double initial_step = 0.1;
    QuadratureConfig quad{};
};

struct CalibrationResult {
    HestonParams params;
    double objective_value = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> per_quote_residuals;
    std::vector<std::size_t> excluded_quotes;
    std::vector<double> objective_trace;  // best objective after each accepted iteration
};

// Nelder-Mead on log(kappa, theta, sigma, y0) and a scaled atanh(rho), with a
// weak -log(kappa_bar) barrier. Deterministic; never leaves the valid region.
// Running out of budget returns the best point with converged = false.
CalibrationResult calibrate(const QuoteSet& quotes, const HestonParams& init, const CalibrationOptions& options);
CalibrationResult calibrate(const QuoteSet& quotes, const HestonParams& init, ModelKind model, int budget);

// Asymptotic fit followed by a Fourier-mode polish started from its result.
CalibrationResult calibrate_two_stage(const QuoteSet& quotes, const HestonParams& init, int asymptotic_budget,
                                      int fourier_budget, const QuadratureConfig& quad = {});

}  // namespace hestonlt
