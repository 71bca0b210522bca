#include "hestonlt/calibration.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <execution>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>

#include "hestonlt/asymptotics.hpp"
#include "hestonlt/errors.hpp"

namespace hestonlt {

namespace {

constexpr double kRhoScale = 0.999;
constexpr double kBarrierWeight = 1e-8;
constexpr double kInfeasiblePenalty = 1e10;

double model_vol(const HestonParams& params, const Quote& q, ModelKind model, const QuadratureConfig& quad) {
    if (model == ModelKind::asymptotic) {
        return std::sqrt(implied_var_asymptotic(params, q.rate_log_moneyness(), q.maturity));
    }
    return exact_implied_vol(params, StrikeSpec{StrikeConvention::total, q.total_log_moneyness()}, q.maturity, quad);
}

double effective_weight(const HestonParams& params, const Quote& q, ModelKind model) {
    if (model != ModelKind::asymptotic) return q.weight;
    const double x = q.rate_log_moneyness();
    const bool near = std::abs(x - params.lower_threshold()) < kThresholdBand ||
                      std::abs(x - params.upper_threshold()) < kThresholdBand;
    return near ? kThresholdWeightFactor * q.weight : q.weight;
}

struct Residual {
    double value = 0.0;
    bool excluded = false;
};

ObjectiveBreakdown evaluate(const HestonParams& params, const QuoteSet& quotes, const std::vector<double>& market,
                            ModelKind model, const QuadratureConfig& quad) {
    const std::size_t n = quotes.size();
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), std::size_t{0});
    std::vector<Residual> residuals(n);
    std::for_each(std::execution::par, index.begin(), index.end(), [&](std::size_t i) {
        try {
            residuals[i].value = model_vol(params, quotes.quotes[i], model, quad) - market[i];
        } catch (const Error&) {
            residuals[i] = {-market[i], true};
        }
    });

    ObjectiveBreakdown out;
    out.residuals.reserve(n);
    out.effective_weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = effective_weight(params, quotes.quotes[i], model);
        out.residuals.push_back(residuals[i].value);
        out.effective_weights.push_back(w);
        out.value += w * residuals[i].value * residuals[i].value;
        if (residuals[i].excluded) out.excluded.push_back(i);
    }
    return out;
}

std::vector<double> market_vols(const QuoteSet& quotes) {
    std::vector<double> out;
    out.reserve(quotes.size());
    for (const Quote& q : quotes.quotes) out.push_back(quote_implied_vol(q));
    return out;
}

// z = (log kappa, log theta, log sigma, atanh(rho / 0.999), log y0)
std::array<double, 5> to_unconstrained(const HestonParams& p) {
    return {std::log(p.kappa()), std::log(p.theta()), std::log(p.sigma()), std::atanh(p.rho() / kRhoScale),
            std::log(p.y0())};
}

RawHestonParams from_unconstrained(const gsl_vector* z) {
    return {std::exp(gsl_vector_get(z, 0)), std::exp(gsl_vector_get(z, 1)), std::exp(gsl_vector_get(z, 2)),
            kRhoScale * std::tanh(gsl_vector_get(z, 3)), std::exp(gsl_vector_get(z, 4))};
}

struct Problem {
    const QuoteSet* quotes;
    const std::vector<double>* market;
    ModelKind model;
    QuadratureConfig quad;
};

double penalized(const gsl_vector* z, void* data) {
    const auto* problem = static_cast<const Problem*>(data);
    const RawHestonParams raw = from_unconstrained(z);
    // Checked before validation so an infeasible trial point never raises.
    const double kappa_bar = raw.kappa - raw.rho * raw.sigma;
    if (!(kappa_bar > 0.0) || !std::isfinite(kappa_bar)) return kInfeasiblePenalty;
    try {
        const HestonParams params = validate_params(raw);
        const double value = evaluate(params, *problem->quotes, *problem->market, problem->model, problem->quad).value;
        return std::isfinite(value) ? value - kBarrierWeight * std::log(kappa_bar) : kInfeasiblePenalty;
    } catch (const Error&) {
        return kInfeasiblePenalty;
    }
}

struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* s) const { gsl_multimin_fminimizer_free(s); }
};
struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

ObjectiveBreakdown evaluate_objective(const HestonParams& params, const QuoteSet& quotes, ModelKind model,
                                      const QuadratureConfig& quad) {
    return evaluate(params, quotes, market_vols(quotes), model, quad);
}

double smile_objective(const HestonParams& params, const QuoteSet& quotes, ModelKind model,
                       const QuadratureConfig& quad) {
    return evaluate_objective(params, quotes, model, quad).value;
}

CalibrationResult calibrate(const QuoteSet& quotes, const HestonParams& init, const CalibrationOptions& options) {
    if (quotes.empty()) throw Error(ErrorCode::EmptyQuoteSet, "no quotes to calibrate against");
    if (options.budget < 1) throw Error(ErrorCode::InvalidConfig, "budget must be at least 1");
    if (options.model == ModelKind::fourier) options.quad.validate();

    gsl_set_error_handler_off();
    const std::vector<double> market = market_vols(quotes);
    Problem problem{&quotes, &market, options.model, options.quad};

    const ObjectiveBreakdown at_init = evaluate(init, quotes, market, options.model, options.quad);
    auto finish = [&](const HestonParams& params, const ObjectiveBreakdown& ob, int iterations, bool converged,
                      std::vector<double> trace) {
        return CalibrationResult{params, ob.value, iterations, converged, ob.residuals, ob.excluded, std::move(trace)};
    };

    // A start that already reproduces the quotes is stationary.
    double total_weight = 0.0;
    for (const Quote& q : quotes.quotes) total_weight += q.weight;
    const double stationary = 1e-20 * std::max(total_weight, 1.0);
    if (at_init.value <= stationary) return finish(init, at_init, 0, true, {at_init.value});

    const auto z0 = to_unconstrained(init);
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(5));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(5));
    for (std::size_t i = 0; i < 5; ++i) {
        gsl_vector_set(x.get(), i, z0[i]);
        gsl_vector_set(step.get(), i, options.initial_step);
    }
    gsl_multimin_function fn{&penalized, 5, &problem};
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> solver(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 5));
    gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

    // fval is only written by iterate, so seed the trace from the start point.
    std::vector<double> trace{penalized(x.get(), &problem)};
    int iterations = 0;
    bool converged = false;
    while (iterations < options.budget) {
        const int status = gsl_multimin_fminimizer_iterate(solver.get());
        ++iterations;
        trace.push_back(solver->fval);
        if (status != GSL_SUCCESS) break;
        const double size = gsl_multimin_fminimizer_size(solver.get());
        if (gsl_multimin_test_size(size, options.simplex_tol) == GSL_SUCCESS) {
            converged = true;
            break;
        }
    }

    const HestonParams best = validate_params(from_unconstrained(solver->x));
    const ObjectiveBreakdown at_best = evaluate(best, quotes, market, options.model, options.quad);
    // The barrier can trade a negligible amount of fit; never report a worse point than the start.
    if (at_best.value > at_init.value) return finish(init, at_init, iterations, converged, std::move(trace));
    return finish(best, at_best, iterations, converged, std::move(trace));
}

CalibrationResult calibrate(const QuoteSet& quotes, const HestonParams& init, ModelKind model, int budget) {
    CalibrationOptions options;
    options.model = model;
    options.budget = budget;
    return calibrate(quotes, init, options);
}

CalibrationResult calibrate_two_stage(const QuoteSet& quotes, const HestonParams& init, int asymptotic_budget,
                                      int fourier_budget, const QuadratureConfig& quad) {
    CalibrationOptions options;
    options.model = ModelKind::asymptotic;
    options.budget = asymptotic_budget;
    const CalibrationResult warm = calibrate(quotes, init, options);
    options.model = ModelKind::fourier;
    options.budget = fourier_budget;
    options.quad = quad;
    CalibrationResult polished = calibrate(quotes, warm.params, options);
    polished.iterations += warm.iterations;
    return polished;
}

}  // namespace hestonlt
