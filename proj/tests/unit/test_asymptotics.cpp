#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hestonlt/asymptotics.hpp"
#include "hestonlt/black_scholes.hpp"
#include "hestonlt/errors.hpp"
#include "hestonlt/fourier.hpp"
#include "oracles.hpp"

using namespace hestonlt;

namespace {

const HestonParams P = oracle::fitted_params();

std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

bool near_special(double x, double gap) {
    return std::abs(x - P.lower_threshold()) < gap || std::abs(x - P.upper_threshold()) < gap;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidConfig;
}

double exact_var_rate(double x, double t) {
    const double v = exact_implied_vol(P, StrikeSpec{StrikeConvention::rate, x}, t);
    return v * v;
}

double exact_var_total(double x, double t) {
    const double v = exact_implied_vol(P, StrikeSpec{StrikeConvention::total, x}, t);
    return v * v;
}

}  // namespace

TEST_CASE("limiting variance satisfies the quadratic link") {
    for (double x : grid(-0.5, 0.5, 201)) {
        const double s2 = sigma_inf_sq(P, x);
        CHECK(s2 > 0.0);
        const double lhs = rate_function(P, x).v_star - x;
        const double rhs = (x + 0.5 * s2) * (x + 0.5 * s2) / (2.0 * s2) - x;
        CHECK(std::abs(lhs - rhs) < 1e-10);
        if (x > P.upper_threshold()) CHECK(s2 < 2.0 * x);
    }
    CHECK(std::abs(sigma_inf_sq(P, P.upper_threshold()) - P.theta_bar()) < 1e-10);
    CHECK(std::abs(sigma_inf_sq(P, P.lower_threshold()) - P.theta()) < 1e-10);
}

TEST_CASE("limiting variance agrees with a direct root solve") {
    // Solve (x + S/2)^2 / (2S) = V*(x) for S on the branch whose thresholds
    // -S/2, S/2 put x on the same side as -theta/2, theta_bar/2 do.
    for (double x : {-0.3, -0.01, 0.0, 0.01, 0.1, 0.4}) {
        const double target = rate_function(P, x).v_star;
        auto f = [&](double s) { return (x + 0.5 * s) * (x + 0.5 * s) / (2.0 * s) - target; };
        const bool inside = x > P.lower_threshold() && x < P.upper_threshold();
        const double root = inside ? oracle::bisect(f, 2.0 * std::abs(x), 10.0)
                                   : oracle::bisect([&](double s) { return -f(s); }, 1e-12, 2.0 * std::abs(x));
        CHECK(sigma_inf_sq(P, x) == doctest::Approx(root).epsilon(1e-10));
    }
}

TEST_CASE("residue thresholds line up with the limiting variance") {
    for (double x : {-0.5, -0.1, -0.02, 0.0, 0.015, 0.03, 0.2}) {
        const double s2 = sigma_inf_sq(P, x);
        for (double t : {0.5, 3.0, 20.0}) {
            CHECK(indicator_residue(x, t, P.lower_threshold(), P.upper_threshold()).value ==
                  doctest::Approx(indicator_residue(x, t, -0.5 * s2, 0.5 * s2).value).epsilon(1e-14));
        }
    }
    // On the knife edges the limiting variance puts its own threshold on x.
    CHECK(0.5 * sigma_inf_sq(P, P.upper_threshold()) == doctest::Approx(P.upper_threshold()).epsilon(1e-12));
    CHECK(-0.5 * sigma_inf_sq(P, P.lower_threshold()) == doctest::Approx(P.lower_threshold()).epsilon(1e-12));
}

TEST_CASE("amplitude identity") {
    int checked = 0;
    for (double x : grid(-0.4, 0.4, 41)) {
        if (near_special(x, 5e-3)) continue;
        const AsymptoticSmilePoint sp = smile_point(P, x);
        CHECK(sp.regime == SmileRegime::general);
        CHECK(oracle::rel_close(a_bs(x, std::sqrt(sp.sigma_inf_sq), sp.a1_hat), amplitude_A(P, x), 1e-9));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("first-order correction at the money by root finding") {
    const double s = std::sqrt(sigma_inf_sq(P, 0.0));
    const double target = std::log(-amplitude_A(P, 0.0));
    // |A_BS(0, s, a)| decreases in a.
    const double a = oracle::bisect([&](double v) { return target - std::log(-a_bs(0.0, s, v)); }, -50.0, 50.0);
    CHECK(a1_hat(P, 0.0) == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("amplitude branches") {
    CHECK(amplitude_A(P, 0.0) < 0.0);

    const double b = P.upper_threshold();
    const CgfDerivatives d1 = cgf_derivatives(P, 1.0);
    const double expected = -(1.0 + (d1.third / (6.0 * d1.second) - u_prime(P, 1.0))) / std::sqrt(d1.second);
    CHECK(amplitude_A(P, b) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(amplitude_A(P, b + 5e-10) == amplitude_A(P, b));
    CHECK(classify(P, b - 5e-10) == SmileRegime::special_theta_bar_half);
    CHECK(classify(P, P.lower_threshold()) == SmileRegime::special_minus_theta_half);
    CHECK(classify(P, 0.0) == SmileRegime::general);

    // The general branch blows up next to the special points; the special value stays moderate.
    for (double c : {b, P.lower_threshold()}) {
        CHECK(std::abs(amplitude_A_general(P, c + 1e-9)) > 1e6);
        CHECK(std::abs(amplitude_A_general(P, c - 1e-9)) > 1e6);
        CHECK(std::abs(amplitude_A(P, c)) < 1e3);
        CHECK(std::isfinite(amplitude_A_special(P, c)));
    }
}

TEST_CASE("continuity at the special points") {
    for (double c : {P.lower_threshold(), P.upper_threshold()}) {
        const double s0 = sigma_inf_sq(P, c), a0 = a1_hat(P, c);
        double prev_s = 1.0, prev_a = 1.0;
        for (int k = 3; k <= 7; ++k) {
            const double h = std::pow(10.0, -k);
            const double ds = std::max(std::abs(sigma_inf_sq(P, c + h) - s0), std::abs(sigma_inf_sq(P, c - h) - s0));
            const double da = std::max(std::abs(a1_hat(P, c + h) - a0), std::abs(a1_hat(P, c - h) - a0));
            CHECK(ds < h);
            CHECK(da < h);
            CHECK(ds < prev_s);
            CHECK(da < prev_a);
            prev_s = ds;
            prev_a = da;
        }
    }
    const double b = P.upper_threshold();
    CHECK(std::abs(a1_hat(P, b + 1e-4) - a1_hat(P, b)) < 1e-3);
    CHECK(std::abs(a1_hat(P, b - 1e-4) - a1_hat(P, b)) < 1e-3);
}

TEST_CASE("local expansion at the upper special point") {
    const double b = P.upper_threshold(), tb = P.theta_bar();
    const CgfDerivatives d = cgf_derivatives(P, 1.0);
    const double big_theta = std::sqrt(tb / d.second);
    // Second-order coefficient from expanding V* = theta_bar/2 + h + h^2/(2V'') - V''' h^3/(6 V''^3).
    const double c2 = 2.0 / d.second * (1.0 - 1.0 / big_theta + d.third * big_theta / (6.0 * d.second));
    for (double h : {1e-3, -1e-3}) {
        const double quad = tb + 2.0 * (1.0 - big_theta) * h + c2 * h * h;
        CHECK(std::abs(sigma_inf_sq(P, b + h) - quad) < 0.01 * std::abs(c2) * h * h);
    }

    const double slope = (u_prime(P, 1.0) - 1.0 - d.third / (6.0 * d.second) + 1.0 / big_theta) / d.second;
    for (double h : {1e-4, -1e-4}) {
        const double x = b + h;
        const double ratio = amplitude_A_general(P, x) / a_bs(x, std::sqrt(sigma_inf_sq(P, x)), 0.0);
        CHECK((ratio - 1.0) / h == doctest::Approx(slope).epsilon(0.05));
    }
}

TEST_CASE("flat smile in the vanishing vol-of-vol limit") {
    const double theta = 0.04;
    const HestonParams flat = validate_params(1.5, theta, 1e-6, 0.0, theta);
    for (double x : {-0.3, -0.05, 0.0, 0.01, 0.05, 0.3}) {
        CHECK(std::abs(std::sqrt(sigma_inf_sq(flat, x)) - std::sqrt(theta)) < 1e-3);
    }
}

TEST_CASE("asymptotic call price") {
    for (double x : {-0.2, 0.0, 0.05}) {
        for (double t : {2.0, 10.0}) {
            const PricingResult r = call_price_asymptotic(P, x, t);
            CHECK(r.method == PricingMethod::asymptotic);
            CHECK(r.normalized_price == r.residue_part + r.correction_part);
        }
    }

    const PricingResult deep = call_price_asymptotic(P, -1.0, 10.0);
    CHECK(deep.residue_part == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-15));
    CHECK(std::abs(deep.correction_part) < 1e-12 * deep.residue_part);

    const double b = P.upper_threshold(), t = 7.0;
    const PricingResult edge = call_price_asymptotic(P, b, t);
    CHECK(edge.residue_part == 0.5);
    CHECK(edge.correction_part ==
          doctest::Approx(amplitude_A_special(P, b) * std::exp(-(rate_function(P, b).v_star - b) * t) /
                          std::sqrt(2.0 * std::numbers::pi * t))
              .epsilon(1e-12));

    CHECK(code_of([] { call_price_asymptotic(P, 0.0, 0.0); }) == ErrorCode::NonPositiveInput);
}

TEST_CASE("asymptotic correction converges to the Fourier price") {
    auto correction_error = [](double x, double t) {
        const PricingResult a = call_price_asymptotic(P, x, t);
        const double f = fourier_price(P, StrikeSpec{StrikeConvention::rate, x}, t).normalized_price;
        return std::abs(a.correction_part / (f - a.residue_part) - 1.0);
    };
    CHECK(correction_error(0.1, 40.0) <= 0.6 * correction_error(0.1, 20.0));
    CHECK(correction_error(0.1, 20.0) < correction_error(0.1, 10.0));

    // Above theta_bar/2 the whole price is the correction; the log gap shrinks in t.
    double previous = 1e300;
    for (double t : {10.0, 20.0, 40.0, 80.0}) {
        const double f = fourier_price(P, StrikeSpec{StrikeConvention::rate, 0.05}, t).normalized_price;
        const double gap = std::abs(std::log(f / call_price_asymptotic(P, 0.05, t).normalized_price));
        CHECK(gap < previous);
        previous = gap;
    }
}

TEST_CASE("fixed-strike price") {
    const double t = 12.0;
    const RateFunctionPoint rf0 = rate_function(P, 0.0);
    const PricingResult atm = call_price_fixed_strike_asymptotic(P, 0.0, t);
    CHECK(atm.normalized_price ==
          doctest::Approx(1.0 + amplitude_A(P, 0.0) / std::sqrt(2.0 * std::numbers::pi * t) * std::exp(-rf0.v_star * t))
              .epsilon(1e-15));
    CHECK(atm.normalized_price < 1.0);

    // One exponential in x_total: the price moves with the sign of A(0) (1 - p*(0)).
    const double direction = amplitude_A(P, 0.0) * (1.0 - rf0.p_star);
    double previous = call_price_fixed_strike_asymptotic(P, -0.5, t).normalized_price;
    for (double x : {-0.25, 0.0, 0.25, 0.5}) {
        const double now = call_price_fixed_strike_asymptotic(P, x, t).normalized_price;
        CHECK((now - previous) * direction > 0.0);
        previous = now;
    }

    auto gap_error = [](double t) {
        const double f = fourier_price(P, StrikeSpec{StrikeConvention::total, 0.0}, t).normalized_price;
        return std::abs((call_price_fixed_strike_asymptotic(P, 0.0, t).normalized_price - 1.0) / (f - 1.0) - 1.0);
    };
    // The remainder is O(1/(V*(0) t)) and V*(0) is about 0.006 here, so the
    // error only halves per doubling once t is in the hundreds.
    double last = 1e300;
    for (double horizon : {20.0, 40.0, 100.0, 200.0, 400.0}) {
        const double e = gap_error(horizon);
        CHECK(e < last);
        last = e;
    }
    CHECK(gap_error(800.0) <= 0.6 * last);
}

TEST_CASE("implied variance expansions") {
    for (double x : {-0.1, 0.0, 0.1}) {
        CHECK(implied_var_asymptotic(P, x, 1e12) == doctest::Approx(sigma_inf_sq(P, x)).epsilon(1e-10));
        CHECK(implied_var_asymptotic(P, x, 5.0) == sigma_inf_sq(P, x) + a1_hat(P, x) / 5.0);
    }
    CHECK(a1_hat(P, 0.0) < 0.0);
    CHECK(code_of([] { implied_var_asymptotic(P, 0.0, 0.1); }) == ErrorCode::NonPositiveResult);

    // t |exact - two-term| decreases along the maturity ladder.
    for (double x : {-0.05, 0.05, 0.1}) {
        double previous = 1e300;
        for (double t : {5.0, 10.0, 20.0, 40.0}) {
            const double product = t * std::abs(exact_var_rate(x, t) - implied_var_asymptotic(P, x, t));
            CHECK(product < previous);
            previous = product;
        }
    }
}

TEST_CASE("fixed-strike implied variance") {
    const double level = fixed_strike_level(P);
    CHECK(level > 0.0);
    CHECK(level == 8.0 * rate_function(P, 0.0).v_star);

    const double slope = 4.0 * (2.0 * saddlepoint(P, 0.0) - 1.0);
    for (double x : {-0.7, -0.2, 0.3, 1.1}) {
        CHECK(a1_fixed(P, x) - a1_fixed(P, 0.0) == doctest::Approx(slope * x).epsilon(1e-12));
        const FixedStrikeSmilePoint fp = fixed_strike_point(P, x);
        CHECK(fp.level == level);
        CHECK(fp.a1 == a1_fixed(P, x));
        CHECK(implied_var_fixed_strike(P, x, 9.0) == level + a1_fixed(P, x) / 9.0);
    }

    for (double x : {-0.2, 0.0, 0.2}) {
        double previous = 1e300;
        for (double t : {10.0, 20.0, 40.0}) {
            const double product = t * std::abs(exact_var_total(x, t) - implied_var_fixed_strike(P, x, t));
            CHECK(product < previous);
            previous = product;
        }
    }
    CHECK(code_of([] { implied_var_fixed_strike(P, 0.0, -1.0); }) == ErrorCode::NonPositiveInput);
}
