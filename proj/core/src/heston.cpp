#include "hestonlt/heston.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "hestonlt/errors.hpp"

namespace hestonlt {

namespace {

constexpr complex kI{0.0, 1.0};

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Pieces of V on the real strip: the radicand D(p) = d(-ip)^2 and its derivatives.
struct RealRadicand {
    double q;    // kappa - rho sigma p
    double D;    // (kappa - rho sigma p)^2 + sigma^2 (p - p^2)
    double D1;
    double D2;
    double s;    // sqrt(D)
};

RealRadicand radicand(const HestonParams& hp, double p) {
    const double k = hp.kappa(), r = hp.rho(), sg = hp.sigma();
    RealRadicand out{};
    out.q = k - r * sg * p;
    // Written as a quadratic with roots p_minus, p_plus so that D >= 0 inside the strip.
    out.D = -sg * sg * hp.rho_bar() * hp.rho_bar() * (p - hp.p_minus()) * (p - hp.p_plus());
    out.D1 = -2.0 * r * sg * out.q + sg * sg * (1.0 - 2.0 * p);
    out.D2 = -2.0 * sg * sg * hp.rho_bar() * hp.rho_bar();
    out.s = std::sqrt(std::max(out.D, 0.0));
    return out;
}

// log(1 + z), keeping the digits of small z.
complex log1p_c(complex z) {
    const complex w = 1.0 + z;
    if (w == complex(1.0, 0.0)) return z;
    return std::log(w) * z / (w - 1.0);
}

// b - d for b = kappa - i rho sigma k, d = d(k). When they nearly cancel use
// b^2 - d^2 = -sigma^2 (i k + k^2).
complex b_minus_d(const HestonParams& hp, complex k, complex b, complex d) {
    const complex diff = b - d;
    if (std::abs(diff) < 0.5 * std::abs(b + d)) {
        return -hp.sigma() * hp.sigma() * (kI * k + k * k) / (b + d);
    }
    return diff;
}

double cgf_scale(const HestonParams& hp) {
    return hp.kappa() * hp.theta() / (hp.sigma() * hp.sigma());
}

// q - sqrt(D). Where q > 0 the difference cancels badly for small sigma, so use
// q^2 - D = sigma^2 p (p - 1) instead.
double q_minus_s(const HestonParams& hp, const RealRadicand& rr, double p) {
    if (rr.q > 0.0) return hp.sigma() * hp.sigma() * p * (p - 1.0) / (rr.q + rr.s);
    return rr.q - rr.s;
}

double cgf_unchecked(const HestonParams& hp, double p) {
    const RealRadicand rr = radicand(hp, p);
    if (rr.q > 0.0) return hp.kappa() * hp.theta() * p * (p - 1.0) / (rr.q + rr.s);
    return cgf_scale(hp) * (rr.q - rr.s);
}

void require_domain(const HestonParams& hp, double p, const char* what) {
    if (!hp.in_moment_domain(p)) {
        throw Error(ErrorCode::OutsideMomentDomain,
                    std::string(what) + ": p=" + fmt_double(p) + " outside (" +
                        fmt_double(hp.p_minus()) + ", " + fmt_double(hp.p_plus()) + ")");
    }
}

CgfDerivatives derivatives_unchecked(const HestonParams& hp, double p) {
    const RealRadicand rr = radicand(hp, p);
    const double c = cgf_scale(hp);
    const double s = rr.s, s3 = s * s * s, s5 = s3 * s * s;
    const double s1 = rr.D1 / (2.0 * s);
    const double s2 = (2.0 * rr.D2 * rr.D - rr.D1 * rr.D1) / (4.0 * s3);
    const double s3d = -3.0 * rr.D1 * rr.D2 / (4.0 * s3) + 3.0 * rr.D1 * rr.D1 * rr.D1 / (8.0 * s5);
    return {c * (-hp.rho() * hp.sigma() - s1), -c * s2, -c * s3d};
}

}  // namespace

HestonParams validate_params(const RawHestonParams& raw) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw Error(ErrorCode::NonPositiveParam,
                        std::string(name) + " must be positive and finite, got " + fmt_double(v));
        }
    };
    positive(raw.kappa, "kappa");
    positive(raw.theta, "theta");
    positive(raw.sigma, "sigma");
    positive(raw.y0, "y0");
    if (!(std::abs(raw.rho) < 1.0)) {
        throw Error(ErrorCode::CorrelationOutOfRange, "|rho| must be < 1, got " + fmt_double(raw.rho));
    }
    const double kappa_bar = raw.kappa - raw.rho * raw.sigma;
    if (!(kappa_bar > 0.0)) {
        throw Error(ErrorCode::KappaBarNonPositive,
                    "kappa - rho*sigma must be positive, got " + fmt_double(kappa_bar));
    }

    HestonParams hp;
    hp.kappa_ = raw.kappa;
    hp.theta_ = raw.theta;
    hp.sigma_ = raw.sigma;
    hp.rho_ = raw.rho;
    hp.y0_ = raw.y0;
    hp.kappa_bar_ = kappa_bar;
    hp.rho_bar_ = std::sqrt((1.0 - raw.rho) * (1.0 + raw.rho));
    hp.theta_bar_ = raw.kappa * raw.theta / kappa_bar;

    const double k = raw.kappa, r = raw.rho, s = raw.sigma;
    const double eta = std::sqrt(s * s + 4.0 * k * k - 4.0 * k * r * s);
    const double denom = 2.0 * s * hp.rho_bar_ * hp.rho_bar_;
    hp.p_minus_ = (s - 2.0 * k * r - eta) / denom;
    hp.p_plus_ = (s - 2.0 * k * r + eta) / denom;
    return hp;
}

HestonParams validate_params(double kappa, double theta, double sigma, double rho, double y0) {
    return validate_params(RawHestonParams{kappa, theta, sigma, rho, y0});
}

StripPoint StripPoint::make(const HestonParams& params, complex k) {
    const double level = -k.imag();
    if (!params.in_moment_domain(level)) {
        throw Error(ErrorCode::OutsideStrip, "-Im(k)=" + fmt_double(level) + " outside (" +
                                                 fmt_double(params.p_minus()) + ", " +
                                                 fmt_double(params.p_plus()) + ")");
    }
    return StripPoint(k);
}

complex d_fn(const HestonParams& params, complex k) {
    const complex b = params.kappa() - kI * params.rho() * params.sigma() * k;
    const double s2 = params.sigma() * params.sigma();
    return std::sqrt(b * b + s2 * (kI * k + k * k));
}

complex g_fn(const HestonParams& params, complex k) {
    const complex b = params.kappa() - kI * params.rho() * params.sigma() * k;
    const complex d = d_fn(params, k);
    const complex den = b + d;
    if (std::abs(den) <= 1e-15 * (std::abs(b) + std::abs(d)) || std::abs(den) == 0.0) {
        throw Error(ErrorCode::DegenerateDenominator, "kappa - i rho sigma k + d(k) vanishes");
    }
    return (b - d) / den;
}

double limiting_cgf(const HestonParams& params, double p) {
    require_domain(params, p, "limiting_cgf");
    return cgf_unchecked(params, p);
}

complex limiting_cgf_c(const HestonParams& params, complex p) {
    const complex k = -kI * p;
    const complex d = d_fn(params, k);
    const complex b = params.kappa() - params.rho() * params.sigma() * p;
    return cgf_scale(params) * b_minus_d(params, k, b, d);
}

CgfDerivatives cgf_derivatives(const HestonParams& params, double p) {
    require_domain(params, p, "cgf_derivatives");
    return derivatives_unchecked(params, p);
}

double u_fn(const HestonParams& params, double p) {
    require_domain(params, p, "u_fn");
    const RealRadicand rr = radicand(params, p);
    const double a = 2.0 * cgf_scale(params);
    const double diff = q_minus_s(params, rr, p);
    const double v = cgf_scale(params) * diff;
    // 2 s / (q + s) = 1 - (q - s) / (q + s)
    return std::exp(a * std::log1p(-diff / (rr.q + rr.s)) + params.y0() * v / (params.kappa() * params.theta()));
}

double u_prime(const HestonParams& params, double p) {
    require_domain(params, p, "u_prime");
    const RealRadicand rr = radicand(params, p);
    const double a = 2.0 * cgf_scale(params);
    const double s1 = rr.D1 / (2.0 * rr.s);
    const double v1 = derivatives_unchecked(params, p).first;
    const double log_derivative = a * (s1 / rr.s - (-params.rho() * params.sigma() + s1) / (rr.q + rr.s)) +
                                  params.y0() / (params.kappa() * params.theta()) * v1;
    return u_fn(params, p) * log_derivative;
}

complex u_fn_c(const HestonParams& params, complex p) {
    const complex d = d_fn(params, -kI * p);
    const complex b = params.kappa() - params.rho() * params.sigma() * p;
    const double a = 2.0 * cgf_scale(params);
    const complex diff = b_minus_d(params, -kI * p, b, d);
    const complex v = cgf_scale(params) * diff;
    // 2 d / (b + d) = 1 - (b - d) / (b + d)
    return std::exp(a * log1p_c(-diff / (b + d)) + params.y0() / (params.kappa() * params.theta()) * v);
}

double saddlepoint(const HestonParams& params, double x) {
    const double k = params.kappa(), th = params.theta(), r = params.rho(), s = params.sigma();
    const double rb = params.rho_bar();
    const double eta2 = s * s + 4.0 * k * k - 4.0 * k * r * s;
    const double shift = x * s + k * th * r;
    // (x sigma + kappa theta rho)^2 + kappa^2 theta^2 (1 - rho^2) is strictly positive.
    const double quad = shift * shift + k * k * th * th * rb * rb;
    return (s - 2.0 * k * r + shift * std::sqrt(eta2 / quad)) / (2.0 * s * rb * rb);
}

RateFunctionPoint rate_function(const HestonParams& params, double x) {
    RateFunctionPoint out;
    out.x = x;
    out.p_star = saddlepoint(params, x);
    out.v_star = out.p_star * x - cgf_unchecked(params, out.p_star);
    const CgfDerivatives der = derivatives_unchecked(params, out.p_star);
    out.v2 = der.second;
    out.v3 = der.third;
    return out;
}

complex char_fn(const HestonParams& params, double t, const StripPoint& point) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw Error(ErrorCode::NonPositiveInput, "maturity must be >= 0, got " + fmt_double(t));
    }
    const complex k = point.value();
    g_fn(params, k);  // rejects a vanishing b + d
    const complex b = params.kappa() - kI * params.rho() * params.sigma() * k;
    const complex d = d_fn(params, k);
    const complex diff = b_minus_d(params, k, b, d);
    const complex g = diff / (b + d);
    const complex decay = std::exp(-d * t);
    complex log_ratio;
    if (std::abs(g) < 0.5) {
        // Both 1 - g e^{-dt} and 1 - g lie in the right half-plane, so the
        // difference of principal logs is the principal log of the ratio.
        log_ratio = log1p_c(-g * decay) - log1p_c(-g);
    } else {
        const complex ratio = (1.0 - g * decay) / (1.0 - g);
        if (std::abs(ratio) < 1e-14 || (ratio.real() < 0.0 && std::abs(ratio.imag()) < 1e-12)) {
            throw Error(ErrorCode::LogBranchFailure, "log argument on or near the principal branch cut");
        }
        log_ratio = std::log(ratio);
    }
    const double a = 2.0 * cgf_scale(params);
    const complex v = cgf_scale(params) * diff;
    const complex exponent = v * t - a * log_ratio +
                             params.y0() / (params.kappa() * params.theta()) * v * (1.0 - decay) /
                                 (1.0 - g * decay);
    return std::exp(exponent);
}

complex char_fn(const HestonParams& params, double t, complex k) {
    return char_fn(params, t, StripPoint::make(params, k));
}

}  // namespace hestonlt
