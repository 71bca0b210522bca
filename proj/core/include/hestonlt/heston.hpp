#pragma once

// Heston model analytics used by the large-maturity expansions:
// the moment strip, the limiting cumulant generating function V and its
// derivatives, the amplitude factor U, the closed-form saddlepoint p*,
// the rate function V* and the time-t characteristic function.

#include <complex>

namespace hestonlt {

using complex = std::complex<double>;

// Unvalidated parameter bundle, e.g. straight from a JSON file or CLI flags.
struct RawHestonParams {
    double kappa = 0.0;
    double theta = 0.0;
    double sigma = 0.0;
    double rho = 0.0;
    double y0 = 0.0;
};

// Validated Heston parameters with the share-measure quantities derived
// once. Instances only come out of validate_params, so holding one means
// kappa, theta, sigma, y0 > 0, |rho| < 1 and kappa_bar > 0.
class HestonParams {
public:
    double kappa() const noexcept { return kappa_; }
    double theta() const noexcept { return theta_; }
    double sigma() const noexcept { return sigma_; }
    double rho() const noexcept { return rho_; }
    double y0() const noexcept { return y0_; }

    double kappa_bar() const noexcept { return kappa_bar_; }  // kappa - rho*sigma
    double rho_bar() const noexcept { return rho_bar_; }      // sqrt(1 - rho^2)
    double theta_bar() const noexcept { return theta_bar_; }  // kappa*theta/kappa_bar
    double p_minus() const noexcept { return p_minus_; }
    double p_plus() const noexcept { return p_plus_; }

    // Left and right thresholds of the large-time residue: -theta/2 and theta_bar/2.
    double lower_threshold() const noexcept { return -0.5 * theta_; }
    double upper_threshold() const noexcept { return 0.5 * theta_bar_; }

    bool in_moment_domain(double p) const noexcept { return p > p_minus_ && p < p_plus_; }

    RawHestonParams raw() const noexcept { return {kappa_, theta_, sigma_, rho_, y0_}; }

    friend HestonParams validate_params(const RawHestonParams& raw);

private:
    HestonParams() = default;

    double kappa_ = 0.0;
    double theta_ = 0.0;
    double sigma_ = 0.0;
    double rho_ = 0.0;
    double y0_ = 0.0;
    double kappa_bar_ = 0.0;
    double rho_bar_ = 0.0;
    double theta_bar_ = 0.0;
    double p_minus_ = 0.0;
    double p_plus_ = 0.0;
};

// Throws Error{NonPositiveParam | CorrelationOutOfRange | KappaBarNonPositive}.
HestonParams validate_params(const RawHestonParams& raw);
HestonParams validate_params(double kappa, double theta, double sigma, double rho, double y0);

// A complex frequency k with -Im(k) inside (p_minus, p_plus), where Re d(k) > 0.
class StripPoint {
public:
    // Throws Error{OutsideStrip}.
    static StripPoint make(const HestonParams& params, complex k);
    complex value() const noexcept { return k_; }

private:
    explicit StripPoint(complex k) : k_(k) {}
    complex k_;
};

// One evaluation of the rate function together with the cgf curvature at the saddlepoint.
struct RateFunctionPoint {
    double x = 0.0;
    double p_star = 0.0;
    double v_star = 0.0;
    double v2 = 0.0;  // V''(p*)
    double v3 = 0.0;  // V'''(p*)
};

struct CgfDerivatives {
    double first = 0.0;
    double second = 0.0;
    double third = 0.0;
};

// d(k) = sqrt((kappa - i rho sigma k)^2 + sigma^2 (i k + k^2)), principal branch.
complex d_fn(const HestonParams& params, complex k);

// g(k) = (kappa - i rho sigma k - d(k)) / (kappa - i rho sigma k + d(k)).
// Throws Error{DegenerateDenominator}.
complex g_fn(const HestonParams& params, complex k);

// Limiting cgf V(p) = kappa*theta/sigma^2 (kappa - rho sigma p - d(-i p)).
// The real version throws Error{OutsideMomentDomain} outside the open strip.
double limiting_cgf(const HestonParams& params, double p);
complex limiting_cgf_c(const HestonParams& params, complex p);

// Analytic V', V'', V''' on (p_minus, p_plus). Throws Error{OutsideMomentDomain}.
CgfDerivatives cgf_derivatives(const HestonParams& params, double p);

// U(p) = (2 d(-ip) / (kappa - rho sigma p + d(-ip)))^{2 kappa theta / sigma^2} exp(y0 V(p) / (kappa theta)).
double u_fn(const HestonParams& params, double p);
double u_prime(const HestonParams& params, double p);
complex u_fn_c(const HestonParams& params, complex p);

// Closed-form p*(x), the unique solution of V'(p) = x. Total on the reals.
double saddlepoint(const HestonParams& params, double x);

// V*(x) = p*(x) x - V(p*(x)).
RateFunctionPoint rate_function(const HestonParams& params, double x);

// phi_t(k) = E[exp(i k (X_t - x_0))] for -Im(k) in (p_minus, p_plus), t >= 0.
// Throws Error{OutsideStrip | LogBranchFailure | NonPositiveInput}.
complex char_fn(const HestonParams& params, double t, complex k);
complex char_fn(const HestonParams& params, double t, const StripPoint& k);

}  // namespace hestonlt
