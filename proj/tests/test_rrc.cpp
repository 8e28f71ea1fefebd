#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "twrn/rrc.hpp"

using Catch::Matchers::WithinAbs;
using twrn::rrc_pulse;
using twrn::rrc_pulse_deriv;

namespace {

constexpr double kSpan = 6.0;

// Closed form straight from the definition, no singularity handling; valid
// away from t = 0 and t = 1/(4 beta). Used as the oracle for the branch
// points below.
double closed_form(double t, double beta) {
    const double pi = std::numbers::pi;
    const double num =
        std::sin(pi * (1.0 - beta) * t) + 4.0 * beta * t * std::cos(pi * (1.0 + beta) * t);
    const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
    return num / den;
}

} // namespace

TEST_CASE("peak value is the analytic limit") {
    const double beta = 0.3;
    const double expected = 1.0 - beta + 4.0 * beta / std::numbers::pi;
    REQUIRE_THAT(rrc_pulse(0.0, beta, kSpan), WithinAbs(expected, 1e-14));
    // and it dominates the rest of the pulse
    for (double t = 0.05; t <= kSpan; t += 0.05)
        REQUIRE(rrc_pulse(t, beta, kSpan) < expected);
}

TEST_CASE("support is truncated beyond the span") {
    REQUIRE(rrc_pulse(kSpan + 1.0, 0.3, kSpan) == 0.0);
    REQUIRE(rrc_pulse(-kSpan - 0.25, 0.3, kSpan) == 0.0);
    REQUIRE(rrc_pulse_deriv(kSpan + 1.0, 0.3, kSpan) == 0.0);
}

TEST_CASE("removable singularity matches the centered limit of the closed form") {
    const double beta = 0.3;
    const double t0 = 1.0 / (4.0 * beta);
    const double h = 1e-6;
    const double limit = 0.5 * (closed_form(t0 - h, beta) + closed_form(t0 + h, beta));
    REQUIRE_THAT(rrc_pulse(t0, beta, kSpan), WithinAbs(limit, 1e-9));
    REQUIRE_THAT(rrc_pulse(-t0, beta, kSpan), WithinAbs(limit, 1e-9));
}

TEST_CASE("branch seams are continuous") {
    for (double beta : {0.22, 0.3, 1.0}) {
        const double t0 = 1.0 / (4.0 * beta);
        for (double seam : {1e-3, t0 - 1e-4, t0 + 1e-4}) {
            const double lo = rrc_pulse(seam - 1e-9, beta, kSpan);
            const double hi = rrc_pulse(seam + 1e-9, beta, kSpan);
            REQUIRE_THAT(lo, WithinAbs(hi, 1e-8));
        }
    }
}

TEST_CASE("pulse has unit energy up to truncation") {
    const double beta = 0.3;
    const double dt = 1e-3;
    double energy = 0.0;
    for (double t = -kSpan; t <= kSpan; t += dt) {
        const double g = rrc_pulse(t, beta, kSpan);
        energy += g * g * dt;
    }
    REQUIRE_THAT(energy, WithinAbs(1.0, 1e-3));
}

TEST_CASE("pulse is even, derivative odd") {
    for (double t : {0.17, 0.5, 0.834, 2.3}) {
        REQUIRE_THAT(rrc_pulse(t, 0.3, kSpan), WithinAbs(rrc_pulse(-t, 0.3, kSpan), 1e-14));
        REQUIRE_THAT(rrc_pulse_deriv(t, 0.3, kSpan),
                     WithinAbs(-rrc_pulse_deriv(-t, 0.3, kSpan), 1e-14));
    }
    REQUIRE(rrc_pulse_deriv(0.0, 0.3, kSpan) == 0.0);
}

TEST_CASE("derivative matches a centered finite difference") {
    const double h = 1e-6;
    for (double beta : {0.22, 0.3, 0.5}) {
        const double t0 = 1.0 / (4.0 * beta);
        for (double t : {0.013, 0.21, 0.77, t0 + 1e-3, t0 - 3e-5, 1.93, 4.55}) {
            const double fd =
                (rrc_pulse(t + h, beta, kSpan) - rrc_pulse(t - h, beta, kSpan)) / (2.0 * h);
            REQUIRE_THAT(rrc_pulse_deriv(t, beta, kSpan), WithinAbs(fd, 1e-6));
        }
    }
}

TEST_CASE("rolloff outside (0, 1] is rejected") {
    REQUIRE_THROWS_AS(rrc_pulse(0.1, 0.0, kSpan), twrn::ConfigError);
    REQUIRE_THROWS_AS(rrc_pulse(0.1, -0.2, kSpan), twrn::ConfigError);
    REQUIRE_THROWS_AS(rrc_pulse(0.1, 1.2, kSpan), twrn::ConfigError);
    REQUIRE_THROWS_AS(rrc_pulse(0.1, 0.3, 0.5), twrn::ConfigError);
    REQUIRE_NOTHROW(rrc_pulse(0.1, 1.0, kSpan));
}
