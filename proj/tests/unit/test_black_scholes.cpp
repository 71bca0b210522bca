#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hestonlt/black_scholes.hpp"
#include "hestonlt/errors.hpp"
#include "oracles.hpp"

using namespace hestonlt;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ParseError;
}

double rel_err(double approx, double exact) { return std::abs(approx / exact - 1.0); }

}  // namespace

TEST_CASE("call price limits and a reference value") {
    CHECK(bs_call(100.0, 1e-12, 1.0, 0.2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bs_call(100.0, 120.0, 1.0, 1e-8) < 1e-300);
    // Phi(0.1) = 0.539827837277029 (15 digits)
    CHECK(std::abs(bs_call(1.0, 1.0, 1.0, 0.2) - (2.0 * 0.539827837277029 - 1.0)) < 1e-15);
    CHECK(std::abs(bs_call(1.0, 1.0, 4.0, 0.1) - (2.0 * 0.539827837277029 - 1.0)) < 1e-15);
    CHECK(bs_call(50.0, 60.0, 2.0, 0.3) == doctest::Approx(bs_call_normalized(std::log(1.2), 2.0, 0.3)));
}

TEST_CASE("call price input checks") {
    CHECK(code_of([] { bs_call(0.0, 1.0, 1.0, 0.2); }) == ErrorCode::NonPositiveInput);
    CHECK(code_of([] { bs_call(1.0, -1.0, 1.0, 0.2); }) == ErrorCode::NonPositiveInput);
    CHECK(code_of([] { bs_call(1.0, 1.0, 0.0, 0.2); }) == ErrorCode::NonPositiveInput);
    CHECK(code_of([] { bs_call(1.0, 1.0, 1.0, 0.0); }) == ErrorCode::NonPositiveInput);
}

TEST_CASE("call price lies inside the no-arbitrage band and increases with vol") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> xs(-1.0, 1.0), ts(0.1, 30.0), vs(0.05, 0.8);
    for (int i = 0; i < 200; ++i) {
        const double x = xs(rng), t = ts(rng), v = vs(rng);
        const double c = bs_call_normalized(x, t, v);
        CHECK(c > std::max(0.0, -std::expm1(x)));
        CHECK(c < 1.0);
        CHECK(bs_call_normalized(x, t, 0.9 * v) < c);
        CHECK(c < bs_call_normalized(x, t, 1.1 * v));
    }
}

TEST_CASE("implied vol inverts the call price") {
    CHECK(std::abs(implied_vol(bs_call(1.0, 1.0, 1.0, 0.2), 0.0, 1.0) - 0.2) < 1e-10);
    for (double x : {-1.0, -0.3, 0.0, 0.2, 0.7}) {
        for (double t : {0.25, 1.0, 5.0, 20.0}) {
            for (double v : {0.05, 0.2, 0.5, 1.2}) {
                const double price = bs_call_normalized(x, t, v);
                // Deep in the money the time value can sit below the price's resolution.
                if (price - std::max(0.0, -std::expm1(x)) < 1e-6 * price) continue;
                const double iv = implied_vol(price, x, t);
                CHECK(std::abs(iv - v) < 1e-10);
                CHECK(std::abs(bs_call_normalized(x, t, iv) / price - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("implied vol rejects prices at the bounds") {
    CHECK(code_of([] { implied_vol(0.0, 0.1, 1.0); }) == ErrorCode::PriceOutOfBounds);
    CHECK(code_of([] { implied_vol(-std::expm1(-0.2), -0.2, 1.0); }) == ErrorCode::PriceOutOfBounds);
    CHECK(code_of([] { implied_vol(1.0, 0.0, 1.0); }) == ErrorCode::PriceOutOfBounds);
    CHECK(code_of([] { implied_vol(1.2, 0.0, 1.0); }) == ErrorCode::PriceOutOfBounds);
}

TEST_CASE("indicator residue branches") {
    CHECK(indicator_residue(0.0, 3.0, -0.1, 0.1).value == 1.0);
    CHECK(indicator_residue(0.1, 3.0, -0.1, 0.1).value == 0.5);
    CHECK(indicator_residue(0.3, 3.0, -0.1, 0.1).value == 0.0);
    CHECK(indicator_residue(-0.5, 2.0, -0.1, 0.1).value == doctest::Approx(1.0 - std::exp(-1.0)));
    // Knife edge at the lower threshold carries half of the e^{at} mass.
    CHECK(indicator_residue(-0.1, 2.0, -0.1, 0.1).value == doctest::Approx(1.0 - 0.5 * std::exp(-0.2)).epsilon(1e-15));
    CHECK(code_of([] { indicator_residue(0.0, 1.0, 0.1, 0.1); }) == ErrorCode::ThresholdOrder);
    CHECK(code_of([] { indicator_residue(0.0, 1.0, 0.2, 0.1); }) == ErrorCode::ThresholdOrder);
}

TEST_CASE("Black-Scholes cgf, rate and saddle") {
    const double s = 0.3;
    CHECK(bs_cgf(0.0, s) == 0.0);
    CHECK(bs_cgf(1.0, s) == 0.0);
    CHECK(bs_rate(0.0, s) == doctest::Approx(s * s / 8.0).epsilon(1e-15));
    CHECK(bs_saddle(-s * s / 2.0, s) == 0.0);
    CHECK(bs_saddle(s * s / 2.0, s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(code_of([] { bs_cgf(0.5, 0.0); }) == ErrorCode::NonPositiveSigma);
    CHECK(code_of([] { bs_rate(0.5, -1.0); }) == ErrorCode::NonPositiveSigma);
    CHECK(code_of([] { bs_saddle(0.5, 0.0); }) == ErrorCode::NonPositiveSigma);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> xs(-0.5, 0.5), ss(0.05, 0.8);
    for (int i = 0; i < 100; ++i) {
        const double x = xs(rng), sig = ss(rng);
        const double q = bs_saddle(x, sig);
        CHECK(bs_rate(x, sig) >= 0.0);
        CHECK(std::abs(bs_rate(x, sig) - (x * q - bs_cgf(q, sig))) < 1e-12);
    }
}

TEST_CASE("A_BS branches and the shift identity") {
    const double s = 0.2;
    CHECK(a_bs(s * s / 2.0, s, 0.0) == doctest::Approx(-1.0 / s).epsilon(1e-15));
    CHECK(a_bs(-s * s / 2.0, s, 0.6) == doctest::Approx((0.3 - 1.0) / s).epsilon(1e-15));
    const double x = 0.05;
    CHECK(a_bs(x, s, 0.0) == doctest::Approx(s * s * s / (x * x - s * s * s * s / 4.0)).epsilon(1e-15));
    CHECK(a_bs(x, s, 0.0) > 0.0);

    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> xs(-0.3, 0.3), ss(0.1, 0.6), as(-0.5, 0.5), ds(-0.2, 0.2);
    for (int i = 0; i < 10; ++i) {
        const double xi = xs(rng), si = ss(rng), a1 = as(rng), delta = ds(rng);
        const double eps = (4.0 * xi * xi / std::pow(si, 4) - 1.0) * delta / 16.0;
        CHECK(std::abs(a_bs(xi, si, a1) * std::exp(eps) - a_bs(xi, si, a1 + delta) * std::exp(-eps)) <
              1e-12 * std::abs(a_bs(xi, si, a1)));
    }
}

TEST_CASE("large-time expansion tracks the exact price") {
    const double s = 0.2;
    auto exact = [&](double x, double t, double a1) { return bs_call_normalized(x * t, t, std::sqrt(s * s + a1 / t)); };
    auto correction_error = [&](double x, double t, double a1) {
        const double residue = indicator_residue(x, t, -s * s / 2.0, s * s / 2.0).value;
        return rel_err(bs_call_large_time(x, t, s, a1) - residue, exact(x, t, a1) - residue);
    };

    CHECK(rel_err(bs_call_large_time(0.1, 40.0, s, 0.0), exact(0.1, 40.0, 0.0)) <
          0.6 * rel_err(bs_call_large_time(0.1, 20.0, s, 0.0), exact(0.1, 20.0, 0.0)));
    CHECK(correction_error(0.1, 40.0, 0.3) < 0.6 * correction_error(0.1, 20.0, 0.3));
    for (double x : {-0.1, 0.05}) CHECK(correction_error(x, 40.0, 0.0) < 0.6 * correction_error(x, 20.0, 0.0));

    // Both knife edges. sigma^2 t has to be several units before the tail term is small, hence 0.5.
    const double w = 0.5;
    auto exact_w = [&](double x, double t) { return bs_call_normalized(x * t, t, w); };
    for (double x : {w * w / 2.0, -w * w / 2.0}) {
        auto edge_error = [&](double t) {
            const double residue = indicator_residue(x, t, -w * w / 2.0, w * w / 2.0).value;
            return rel_err(bs_call_large_time(x, t, w, 0.0) - residue, exact_w(x, t) - residue);
        };
        CHECK(edge_error(50.0) < 0.6 * edge_error(25.0));
        CHECK(edge_error(25.0) < 0.2);
    }
    // A full e^{at} residue at the lower edge would miss by a term larger than the whole correction.
    {
        const double t = 25.0, a = -w * w / 2.0;
        const double ours = std::abs(bs_call_large_time(a, t, w, 0.0) - exact_w(a, t));
        const double full = std::abs(bs_call_large_time(a, t, w, 0.0) - 0.5 * std::exp(a * t) - exact_w(a, t));
        CHECK(ours * 10.0 < full);
    }
    const double t = 25.0;
    CHECK(bs_call_large_time(s * s / 2.0, t, s, 0.0) ==
          doctest::Approx(0.5 - 1.0 / (s * std::sqrt(2.0 * std::numbers::pi * t))).epsilon(1e-14));

    // Inside the band the price tends to 1 at rate sigma^2 / 8.
    double previous = 1.0;
    for (double horizon : {400.0, 1600.0, 4000.0}) {
        const double gap = std::abs(bs_call_large_time(0.0, horizon, s, 0.0) - 1.0);
        CHECK(gap < previous);
        previous = gap;
    }
    CHECK(previous < 1e-9);

    // a1 = 0 reduces to the plain Black-Scholes expansion.
    for (double x : {-0.05, 0.01, 0.08}) {
        const double plain = indicator_residue(x, 30.0, -s * s / 2.0, s * s / 2.0).value +
                             a_bs(x, s, 0.0) / std::sqrt(2.0 * std::numbers::pi * 30.0) *
                                 std::exp(-(bs_rate(x, s) - x) * 30.0);
        CHECK(bs_call_large_time(x, 30.0, s, 0.0) == doctest::Approx(plain).epsilon(1e-14));
        CHECK(bs_call_large_time(BsExpansionInput{x, s, 0.0}, 30.0) == bs_call_large_time(x, 30.0, s, 0.0));
    }
    CHECK(code_of([&] { bs_call_large_time(0.0, 1.0, s, -0.05); }) == ErrorCode::NonPositiveEffectiveVariance);
}

TEST_CASE("fixed-strike expansion") {
    const double s = 0.2;
    CHECK(bs_call_fixed_strike_large_time(0.0, 50.0, s, 0.0) ==
          doctest::Approx(1.0 - 2.0 * std::sqrt(2.0) / (0.2 * std::sqrt(50.0 * std::numbers::pi)) * std::exp(-0.25))
              .epsilon(1e-15));
    auto err = [&](double x, double t, double vol) {
        const double exact = bs_call_normalized(x, t, vol);
        return rel_err(1.0 - bs_call_fixed_strike_large_time(x, t, vol, 0.0), 1.0 - exact);
    };
    // The error ratio approaches 1/2 from above (the next tail term has the opposite sign),
    // and only once vol*sqrt(t)/2 is well past 1.
    for (double x : {-0.2, 0.0, 0.3}) {
        CHECK(err(x, 100.0, 0.5) <= 0.6 * err(x, 50.0, 0.5));
        CHECK(err(x, 400.0, s) <= 0.6 * err(x, 200.0, s));
        CHECK(err(x, 400.0, s) > 0.5 * err(x, 200.0, s));
    }

    const double c0 = 1.0 - bs_call_fixed_strike_large_time(0.1, 40.0, s, 0.0);
    const double c1 = 1.0 - bs_call_fixed_strike_large_time(0.1, 40.0, s, 0.8);
    CHECK(c1 / c0 == doctest::Approx(std::exp(-0.1)).epsilon(1e-14));
    CHECK(code_of([&] { bs_call_fixed_strike_large_time(0.0, 1.0, s, -0.05); }) ==
          ErrorCode::NonPositiveEffectiveVariance);
}

TEST_CASE("Gaussian tail ratio approaches one like 1/z^2") {
    double previous = 0.0;
    for (double z : {4.0, 6.0, 8.0}) {
        const double ratio = norm_cdf(-z) * z * std::sqrt(2.0 * std::numbers::pi) * std::exp(z * z / 2.0);
        const double c = std::abs(ratio - 1.0) * z * z;
        CHECK(c > 0.5);
        CHECK(c < 1.0);
        CHECK(c > previous);  // c(z) = 1 - 3/z^2 + ... climbs towards 1
        previous = c;
    }
    CHECK(norm_cdf(-37.0) > 0.0);
    CHECK(norm_cdf(-37.0) == doctest::Approx(5.725571222524e-300).epsilon(1e-10));
}
