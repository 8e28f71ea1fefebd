#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "twrn/estimators.hpp"
#include "twrn/rng.hpp"
#include "twrn/signal_model.hpp"

using Catch::Matchers::WithinAbs;
using namespace twrn;

TEST_CASE("combine_params folds the cascade correctly") {
    SECTION("unit gains, unit variances: alpha_1 = 1/sqrt(3)") {
        const NoiseModel nm = NoiseModel::from_variances(1.0, 1.0, 1.0);
        HopParams hop;  // all gains one, all offsets zero
        const CombinedParams p = combine_params(hop, nm);
        REQUIRE_THAT(p.alpha_1.real(), WithinAbs(1.0 / std::sqrt(3.0), 1e-14));
        REQUIRE_THAT(p.alpha_1.imag(), WithinAbs(0.0, 1e-14));
    }
    SECTION("own-path carrier offset cancels") {
        const NoiseModel nm = NoiseModel::from_variances(0.1, 0.1, 1.0);
        HopParams hop;
        hop.nu_sr_1 = 0.2;
        hop.nu_rs_1 = -0.2;
        hop.nu_sr_2 = 0.3;
        const CombinedParams p = combine_params(hop, nm);
        REQUIRE_THAT(p.nu_2, WithinAbs(0.1, 1e-14));
        // a mismatched oscillator pair is rejected
        hop.nu_sr_1 = 0.25;
        REQUIRE_THROWS_AS(combine_params(hop, nm), ConfigError);
    }
    SECTION("cross-path carrier offsets add") {
        const NoiseModel nm = NoiseModel::from_variances(0.1, 0.1, 1.0);
        HopParams hop;
        hop.nu_sr_2 = 0.1;
        hop.nu_rs_1 = 0.05;
        hop.nu_sr_1 = -0.05;
        REQUIRE_THAT(combine_params(hop, nm).nu_2, WithinAbs(0.15, 1e-14));
    }
    SECTION("gain phase carries the relay-leg delay") {
        const NoiseModel nm = NoiseModel::from_variances(0.1, 0.1, 1.0);
        HopParams hop;
        hop.nu_sr_2 = 0.25;
        hop.nu_rs_1 = -0.05;
        hop.nu_sr_1 = 0.05;
        hop.tau_rs_1 = 0.2;
        const CombinedParams p = combine_params(hop, nm);
        const cxd expected =
            nm.zeta * std::polar(1.0, -2.0 * std::numbers::pi * 0.25 * 0.2);
        REQUIRE_THAT(std::abs(p.alpha_2 - expected), WithinAbs(0.0, 1e-14));
    }
    SECTION("combined offsets outside the admissible box are rejected") {
        const NoiseModel nm = NoiseModel::from_variances(0.1, 0.1, 1.0);
        HopParams hop;
        hop.tau_sr_1 = 0.4;
        hop.tau_rs_1 = 0.2;
        REQUIRE_THROWS_AS(combine_params(hop, nm), ConfigError);
    }
}

TEST_CASE("noise model derived quantities") {
    const NoiseModel nm = NoiseModel::from_variances(0.5, 0.25, 2.0);
    REQUIRE_THAT(nm.zeta, WithinAbs(1.0 / std::sqrt(4.5), 1e-14));
    REQUIRE_THAT(nm.sigma_u2, WithinAbs(nm.zeta * nm.zeta * 2.0 * 0.5 + 0.25, 1e-14));
    const NoiseModel snr = NoiseModel::from_snr_db(10.0);
    REQUIRE_THAT(snr.sigma_n2, WithinAbs(0.1, 1e-14));
    REQUIRE_THAT(snr.sigma_w2, WithinAbs(0.1, 1e-14));
    REQUIRE_THROWS_AS(NoiseModel::from_variances(-0.1, 0.1, 1.0), ConfigError);
}

TEST_CASE("training sequences are unit modulus, reproducible, independent") {
    const auto [t1, t2] = generate_training(80, 12345);
    REQUIRE(t1.size() == 80);
    for (int n = 0; n < 80; ++n) {
        REQUIRE_THAT(std::abs(t1[n]), WithinAbs(1.0, 1e-14));
        REQUIRE_THAT(std::abs(t2[n]), WithinAbs(1.0, 1e-14));
    }
    const auto [u1, u2] = generate_training(80, 12345);
    REQUIRE((t1 - u1).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((t2 - u2).cwiseAbs().maxCoeff() == 0.0);

    const double cross = std::abs(t1.dot(t2)) / 80.0;
    REQUIRE(cross < 1.0);

    REQUIRE_THROWS_AS(generate_training(1, 1), ConfigError);
}

TEST_CASE("data generation: Gray map, unit energy, balanced bits") {
    const Frame f = generate_data(400, 99);
    REQUIRE(f.data.size() == 400);
    REQUIRE(f.data_bits.size() == 800);
    REQUIRE_THAT(std::abs(qpsk_symbol(0, 0) - cxd(1.0, 1.0) / std::sqrt(2.0)),
                 WithinAbs(0.0, 1e-15));
    std::size_t ones = 0;
    for (int n = 0; n < 400; ++n) {
        REQUIRE_THAT(std::norm(f.data[n]), WithinAbs(1.0, 1e-12));
        const cxd expected = qpsk_symbol(f.data_bits[2 * n], f.data_bits[2 * n + 1]);
        REQUIRE(f.data[n] == expected);
        const auto sliced = qpsk_slice(f.data[n]);
        REQUIRE(sliced[0] == f.data_bits[2 * n]);
        REQUIRE(sliced[1] == f.data_bits[2 * n + 1]);
    }
    // bit balance over a batch of frames
    std::size_t total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Frame g = generate_data(400, seed);
        for (auto b : g.data_bits) ones += b;
        total += g.data_bits.size();
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(total);
    REQUIRE(freq > 0.45);
    REQUIRE(freq < 0.55);
}

namespace {

struct Scenario {
    HopParams hop;
    NoiseModel noise = NoiseModel::from_variances(0.1, 0.1, 1.0);
    ModelGeometry geom;
    Eigen::VectorXcd s1, s2;
};

Scenario make_scenario(int length, std::uint64_t seed) {
    Scenario sc;
    sc.hop.h_sr_1 = {0.9, 0.3};
    sc.hop.h_sr_2 = {-0.6, 0.7};
    sc.hop.h_rs_1 = {1.1, -0.2};
    sc.hop.tau_sr_1 = 0.11;
    sc.hop.tau_sr_2 = -0.27;
    sc.hop.tau_rs_1 = 0.08;
    sc.hop.nu_rs_1 = -0.06;
    sc.hop.nu_sr_1 = 0.06;
    sc.hop.nu_sr_2 = 0.23;
    Rng rng(seed);
    sc.s1.resize(length);
    sc.s2.resize(length);
    for (int n = 0; n < length; ++n) {
        sc.s1[n] = rng.complex_gaussian(1.0);
        sc.s2[n] = rng.complex_gaussian(1.0);
    }
    return sc;
}

} // namespace

TEST_CASE("noiseless round reduces to a single shaped term when alpha_2 = 0") {
    Scenario sc = make_scenario(12, 21);
    sc.hop.h_sr_2 = {0.0, 0.0};
    const CombinedParams p = combine_params(sc.hop, sc.noise);
    const Eigen::VectorXcd y = simulate_round(sc.s1, sc.s2, sc.hop, sc.noise, nullptr, sc.geom);
    const Eigen::VectorXcd expected =
        p.alpha_1 * (build_shaping_matrix(p.tau_1, 12, 2, sc.geom.rolloff, sc.geom.span).entries *
                     sc.s1);
    REQUIRE((y - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noiseless round at zero offsets equals direct convolution") {
    Scenario sc = make_scenario(16, 22);
    sc.hop.tau_sr_1 = sc.hop.tau_sr_2 = sc.hop.tau_rs_1 = 0.0;
    sc.hop.nu_sr_1 = sc.hop.nu_sr_2 = sc.hop.nu_rs_1 = 0.0;
    const CombinedParams p = combine_params(sc.hop, sc.noise);
    const Eigen::VectorXcd y = simulate_round(sc.s1, sc.s2, sc.hop, sc.noise, nullptr, sc.geom);

    for (int i = 0; i < 32; ++i) {
        cxd direct{0.0, 0.0};
        for (int n = 0; n < 16; ++n) {
            const double g = rrc_pulse(i / 2.0 - n, sc.geom.rolloff, sc.geom.span);
            direct += (p.alpha_1 * sc.s1[n] + p.alpha_2 * sc.s2[n]) * g;
        }
        REQUIRE_THAT(std::abs(y[i] - direct), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("noiseless round lies in the training basis column space") {
    const auto [t1, t2] = generate_training(20, 5);
    Scenario sc = make_scenario(20, 23);
    const CombinedParams p = combine_params(sc.hop, sc.noise);
    const Eigen::VectorXcd y = simulate_round(t1, t2, sc.hop, sc.noise, nullptr, sc.geom);

    const OmegaBuilder builder(t1, t2, sc.geom);
    const Eigen::MatrixXcd omega = builder.build(p.tau_1, p.tau_2, p.nu_2);
    const Eigen::Vector2cd alpha(p.alpha_1, p.alpha_2);
    REQUIRE((y - omega * alpha).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("aggregate noise is white with the effective variance") {
    Scenario sc = make_scenario(8, 24);
    sc.hop.h_rs_1 = {1.0, 0.0};  // |h_rs_1|^2 = sigma_h2 so the formula applies exactly
    const Eigen::VectorXcd mean =
        simulate_round(sc.s1, sc.s2, sc.hop, sc.noise, nullptr, sc.geom);

    const int n_draws = 10000, dim = 16;
    Rng rng(777);
    Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < n_draws; ++k) {
        const Eigen::VectorXcd u =
            simulate_round(sc.s1, sc.s2, sc.hop, sc.noise, &rng, sc.geom) - mean;
        cov += u * u.adjoint();
    }
    cov /= static_cast<double>(n_draws);

    double pooled = 0.0;
    double max_offdiag = 0.0;
    for (int i = 0; i < dim; ++i) {
        pooled += cov(i, i).real();
        for (int j = 0; j < dim; ++j)
            if (i != j) max_offdiag = std::max(max_offdiag, std::abs(cov(i, j)));
    }
    pooled /= dim;
    REQUIRE_THAT(pooled, WithinAbs(sc.noise.sigma_u2, 0.05 * sc.noise.sigma_u2));
    REQUIRE(max_offdiag < 0.02);
}

TEST_CASE("simulate_round validates symbol lengths") {
    Scenario sc = make_scenario(8, 25);
    Eigen::VectorXcd wrong = sc.s2.head(4);
    REQUIRE_THROWS_AS(simulate_round(sc.s1, wrong, sc.hop, sc.noise, nullptr, sc.geom),
                      ConfigError);
}
