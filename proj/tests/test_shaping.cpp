#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "twrn/rng.hpp"
#include "twrn/rrc.hpp"
#include "twrn/shaping.hpp"

using Catch::Matchers::WithinAbs;
using namespace twrn;

namespace {

constexpr double kBeta = 0.3;
constexpr double kSpan = 6.0;

Eigen::VectorXcd random_symbols(int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXcd v(n);
    for (int k = 0; k < n; ++k) v[k] = rng.complex_gaussian(1.0);
    return v;
}

} // namespace

TEST_CASE("pulse peak lands on the matching sample") {
    const int length = 20, q = 2;
    const double peak = rrc_pulse(0.0, kBeta, kSpan);

    SECTION("zero offset: peak at sample 2n") {
        const auto m = build_shaping_matrix(0.0, length, q, kBeta, kSpan);
        for (int n = 0; n < length; ++n)
            REQUIRE_THAT(m.entries(q * n, n), WithinAbs(peak, 1e-14));
    }
    SECTION("half-symbol offset: peak moves one sample") {
        const auto m = build_shaping_matrix(0.5, length, q, kBeta, kSpan);
        for (int n = 0; n < length; ++n)
            REQUIRE_THAT(m.entries(q * n + 1, n), WithinAbs(peak, 1e-14));
    }
}

TEST_CASE("interior column energy equals the directly summed pulse energy") {
    const int length = 24, q = 2;
    const double tau = 0.23;
    const auto m = build_shaping_matrix(tau, length, q, kBeta, kSpan);

    // Independent of the matrix: sum the truncated pulse over the sample grid.
    double direct = 0.0;
    for (int d = -2 * q * static_cast<int>(kSpan); d <= 2 * q * static_cast<int>(kSpan); ++d) {
        const double g = rrc_pulse(static_cast<double>(d) / q - tau, kBeta, kSpan);
        direct += g * g;
    }

    const int margin = static_cast<int>(kSpan) + 1;
    for (int n = margin; n < length - margin; ++n)
        REQUIRE_THAT(m.entries.col(n).squaredNorm(), WithinAbs(direct, 1e-6));
}

TEST_CASE("entries are pulse translates across an offset grid") {
    const int length = 10, q = 2;
    for (double tau : {-0.37, -0.11, 0.0, 0.23, 0.49}) {
        const auto m = build_shaping_matrix(tau, length, q, kBeta, kSpan);
        for (int i = 0; i < length * q; i += 3)
            for (int n = 0; n < length; ++n)
                REQUIRE_THAT(m.entries(i, n),
                             WithinAbs(rrc_pulse(static_cast<double>(i) / q - n - tau,
                                                 kBeta, kSpan),
                                       1e-15));
    }
}

TEST_CASE("derivative matrix matches finite differences of the shaping matrix") {
    const int length = 6, q = 2;
    const double tau = 0.3, h = 1e-6;
    const auto r = build_derivative_matrix(tau, length, q, kBeta, kSpan);
    const auto plus = build_shaping_matrix(tau + h, length, q, kBeta, kSpan);
    const auto minus = build_shaping_matrix(tau - h, length, q, kBeta, kSpan);
    const Eigen::MatrixXd fd = (plus.entries - minus.entries) / (2.0 * h);
    REQUIRE((r - fd).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("derivative vanishes at the pulse peak samples") {
    const int length = 8, q = 2;
    const auto r = build_derivative_matrix(0.0, length, q, kBeta, kSpan);
    for (int n = 0; n < length; ++n) REQUIRE_THAT(r(q * n, n), WithinAbs(0.0, 1e-14));
}

TEST_CASE("carrier offset diagonal") {
    SECTION("zero offset gives the identity") {
        const auto d = build_cfo_matrix(0.0, 4, 2);
        for (int i = 0; i < d.size(); ++i) REQUIRE_THAT(std::abs(d[i] - 1.0), WithinAbs(0.0, 1e-15));
    }
    SECTION("a full cycle per sample aliases to the identity") {
        const auto d = build_cfo_matrix(2.0, 4, 2);  // nu = Q
        for (int i = 0; i < d.size(); ++i) REQUIRE_THAT(std::abs(d[i] - 1.0), WithinAbs(0.0, 1e-12));
    }
    SECTION("entry matches the scalar exponential") {
        const auto d = build_cfo_matrix(0.1, 4, 2);
        const std::complex<double> expected =
            std::polar(1.0, 2.0 * std::numbers::pi * 0.15);
        REQUIRE_THAT(std::abs(d[3] - expected), WithinAbs(0.0, 1e-15));
    }
    SECTION("rotation is unitary") {
        const auto d = build_cfo_matrix(0.37, 16, 2);
        for (int i = 0; i < d.size(); ++i)
            REQUIRE_THAT(std::norm(d[i]), WithinAbs(1.0, 1e-14));
    }
}

TEST_CASE("support-aware products agree with the dense matrix") {
    const int length = 14, q = 2;
    const double tau = -0.31;
    const auto symbols = random_symbols(length, 11);
    const auto g = build_shaping_matrix(tau, length, q, kBeta, kSpan);
    const auto r = build_derivative_matrix(tau, length, q, kBeta, kSpan);

    SECTION("shaped_vector") {
        const Eigen::VectorXcd fast = shaped_vector(symbols, tau, q, kBeta, kSpan);
        const Eigen::VectorXcd dense = g.entries * symbols;
        REQUIRE((fast - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("shaped_deriv_vector") {
        const Eigen::VectorXcd fast = shaped_deriv_vector(symbols, tau, q, kBeta, kSpan);
        const Eigen::VectorXcd dense = r * symbols;
        REQUIRE((fast - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("shaped_adjoint") {
        const auto samples = random_symbols(length * q, 13);
        const Eigen::VectorXcd fast = shaped_adjoint(samples, tau, length, q, kBeta, kSpan);
        const Eigen::VectorXcd dense = g.entries.transpose() * samples;
        REQUIRE((fast - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("shaping_gram") {
        const Eigen::MatrixXd fast = shaping_gram(tau, length, q, kBeta, kSpan);
        const Eigen::MatrixXd dense = g.entries.transpose() * g.entries;
        REQUIRE((fast - dense).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("geometry preconditions") {
    REQUIRE_THROWS_AS(build_shaping_matrix(0.0, 0, 2, kBeta, kSpan), ConfigError);
    REQUIRE_THROWS_AS(build_shaping_matrix(0.0, 8, 1, kBeta, kSpan), ConfigError);
    Eigen::VectorXcd v = random_symbols(4, 3);
    REQUIRE_THROWS_AS(shaped_adjoint(v, 0.0, 4, 2, kBeta, kSpan), ConfigError);
}
