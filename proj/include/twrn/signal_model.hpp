#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twrn/errors.hpp"
#include "twrn/rng.hpp"
#include "twrn/shaping.hpp"

namespace twrn {

using cxd = std::complex<double>;

/// Pulse and sampling geometry shared by every stage of the link.
struct ModelGeometry {
    int oversampling = 2;  // samples per symbol
    double rolloff = 0.3;  // RRC excess bandwidth
    double span = 6.0;     // pulse truncation half-width in symbols
};

/// Per-hop impairments of the two-phase relay round as seen by terminal 1.
/// Timing offsets are in symbol periods, carrier offsets in cycles per
/// symbol. The same oscillator serves both directions at terminal 1, so
/// nu_sr_1 must equal -nu_rs_1.
struct HopParams {
    cxd h_sr_1{1.0, 0.0};
    cxd h_sr_2{1.0, 0.0};
    cxd h_rs_1{1.0, 0.0};
    double tau_sr_1 = 0.0, tau_sr_2 = 0.0, tau_rs_1 = 0.0;
    double nu_sr_1 = 0.0, nu_sr_2 = 0.0, nu_rs_1 = 0.0;
};

/// End-to-end quantities observable at terminal 1: cascade gains, summed
/// timing offsets, and the single residual carrier offset. The own-signal
/// carrier offset cancels exactly and is therefore not a field.
struct CombinedParams {
    cxd alpha_1{0.0, 0.0};
    cxd alpha_2{0.0, 0.0};
    double tau_1 = 0.0;
    double tau_2 = 0.0;
    double nu_2 = 0.0;
};

/// Noise configuration. zeta is the relay power-constraint factor and
/// sigma_u2 the effective variance of the aggregate receive noise.
struct NoiseModel {
    double sigma_n2 = 0.0;  // relay receiver noise variance
    double sigma_w2 = 0.0;  // terminal receiver noise variance
    double sigma_h2 = 1.0;  // channel gain variance
    double zeta = 0.0;
    double sigma_u2 = 0.0;

    static NoiseModel from_variances(double sn2, double sw2, double sh2) {
        if (!(sn2 >= 0.0) || !(sw2 >= 0.0) || !(sh2 > 0.0))
            throw ConfigError("noise variances must be non-negative, sigma_h2 positive");
        NoiseModel m;
        m.sigma_n2 = sn2;
        m.sigma_w2 = sw2;
        m.sigma_h2 = sh2;
        m.zeta = 1.0 / std::sqrt(2.0 * sh2 + sn2);
        m.sigma_u2 = m.zeta * m.zeta * sh2 * sn2 + sw2;
        return m;
    }

    /// Both receiver noise variances set to 1/SNR (SNR given in dB).
    static NoiseModel from_snr_db(double snr_db, double sh2 = 1.0) {
        double snr = std::pow(10.0, snr_db / 10.0);
        return from_variances(1.0 / snr, 1.0 / snr, sh2);
    }
};

/// One user's transmit frame: unit-modulus training, unit-energy QPSK data.
struct Frame {
    Eigen::VectorXcd training;
    Eigen::VectorXcd data;
    std::vector<std::uint8_t> data_bits;  // 2 bits per data symbol
};

/// Gray-mapped QPSK: bit pair (b0, b1) -> ((1-2*b0) + j(1-2*b1)) / sqrt(2),
/// so 00 maps to the first-quadrant symbol. Slicing inverts it by sign.
inline cxd qpsk_symbol(std::uint8_t b0, std::uint8_t b1) {
    const double s = 1.0 / std::numbers::sqrt2;
    return {s * (1.0 - 2.0 * b0), s * (1.0 - 2.0 * b1)};
}

inline std::array<std::uint8_t, 2> qpsk_slice(cxd symbol) {
    return {static_cast<std::uint8_t>(symbol.real() < 0.0),
            static_cast<std::uint8_t>(symbol.imag() < 0.0)};
}

/// Folds the per-hop impairments into the estimable end-to-end parameters:
///   alpha_k = zeta h_sr_k h_rs_1 exp(-j 2 pi nu_sr_k tau_rs_1)
///   tau_k   = tau_sr_k + tau_rs_1
///   nu_2    = nu_sr_2 + nu_rs_1      (nu_1 cancels by the shared oscillator)
inline CombinedParams combine_params(const HopParams& hop, const NoiseModel& noise) {
    if (std::abs(hop.nu_sr_1 + hop.nu_rs_1) > 1e-12)
        throw ConfigError("combine_params: nu_sr_1 must equal -nu_rs_1");
    CombinedParams p;
    const double two_pi = 2.0 * std::numbers::pi;
    p.alpha_1 = noise.zeta * hop.h_sr_1 * hop.h_rs_1 *
                std::polar(1.0, -two_pi * hop.nu_sr_1 * hop.tau_rs_1);
    p.alpha_2 = noise.zeta * hop.h_sr_2 * hop.h_rs_1 *
                std::polar(1.0, -two_pi * hop.nu_sr_2 * hop.tau_rs_1);
    p.tau_1 = hop.tau_sr_1 + hop.tau_rs_1;
    p.tau_2 = hop.tau_sr_2 + hop.tau_rs_1;
    p.nu_2 = hop.nu_sr_2 + hop.nu_rs_1;
    for (double v : {p.tau_1, p.tau_2, p.nu_2})
        if (!(v > -0.5 && v < 0.5))
            throw ConfigError("combine_params: combined offset outside (-0.5, 0.5)");
    return p;
}

namespace detail {

/// Smallest-to-largest singular value ratio of the two shaped training
/// columns, via the 2x2 Gram eigenvalues.
inline double training_basis_ratio(const Eigen::VectorXcd& c1, const Eigen::VectorXcd& c2) {
    const double a = c1.squaredNorm();
    const double b = c2.squaredNorm();
    const cxd c = c1.dot(c2);  // c1^H c2
    const double tr = a + b;
    const double det = a * b - std::norm(c);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double emax = tr / 2.0 + disc;
    const double emin = tr / 2.0 - disc;
    if (emax <= 0.0) return 0.0;
    return std::sqrt(std::max(0.0, emin) / emax);
}

} // namespace detail

/// Two seeded unit-modulus QPSK-phase training sequences. The pair is
/// accepted only if the shaped training basis keeps numerical rank 2 across
/// probe offsets spanning the admissible box (worst case: equal delays and
/// zero carrier offset); otherwise a fresh pair is drawn, up to a bounded
/// retry budget.
inline std::pair<Eigen::VectorXcd, Eigen::VectorXcd>
generate_training(int length, std::uint64_t seed, const ModelGeometry& geom = {}) {
    if (length < 2) throw ConfigError("generate_training: length must be >= 2");
    Rng rng(derive_seed(seed, {0x7261696Eull}));
    constexpr int kMaxRetries = 16;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        Eigen::VectorXcd t1(length), t2(length);
        for (int n = 0; n < length; ++n) {
            auto phase = [&] {
                int k = static_cast<int>(rng.next_u64() & 3ull);
                return std::numbers::pi * (0.25 + 0.5 * k);
            };
            t1[n] = std::polar(1.0, phase());
            t2[n] = std::polar(1.0, phase());
        }
        const double probes[][3] = {{0.0, 0.0, 0.0},   {0.49, 0.49, 0.0},
                                    {-0.49, -0.49, 0.0}, {0.25, 0.25, 0.0},
                                    {-0.49, 0.49, 0.0},  {0.0, 0.0, 0.49}};
        bool ok = true;
        for (const auto& p : probes) {
            Eigen::VectorXcd c1 =
                shaped_vector(t1, p[0], geom.oversampling, geom.rolloff, geom.span);
            Eigen::VectorXcd c2 =
                shaped_vector(t2, p[1], geom.oversampling, geom.rolloff, geom.span);
            c2.array() *= build_cfo_matrix(p[2], length, geom.oversampling).array();
            if (detail::training_basis_ratio(c1, c2) < 1e-3) {
                ok = false;
                break;
            }
        }
        if (ok) return {std::move(t1), std::move(t2)};
    }
    throw NumericalError("generate_training: no admissible pair within retry budget");
}

/// Uniform random bits Gray-mapped onto unit-energy QPSK.
inline Frame generate_data(int length, std::uint64_t seed) {
    if (length < 1) throw ConfigError("generate_data: length must be >= 1");
    Rng rng(derive_seed(seed, {0x64617461ull}));
    Frame f;
    f.data.resize(length);
    f.data_bits.resize(2 * static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) {
        auto b0 = static_cast<std::uint8_t>(rng.next_u64() & 1ull);
        auto b1 = static_cast<std::uint8_t>(rng.next_u64() & 1ull);
        f.data_bits[2 * static_cast<std::size_t>(n)] = b0;
        f.data_bits[2 * static_cast<std::size_t>(n) + 1] = b1;
        f.data[n] = qpsk_symbol(b0, b1);
    }
    return f;
}

/// One two-phase relay round observed at terminal 1:
///   y = alpha_1 G(tau_1) s1 + alpha_2 Lambda(nu_2) G(tau_2) s2
///       + zeta h_rs_1 Lambda(nu_rs_1) n + w
/// With rng == nullptr the noiseless mean is returned. Relay noise is drawn
/// before terminal noise so a given stream always reproduces the same round.
inline Eigen::VectorXcd simulate_round(const Eigen::VectorXcd& symbols_1,
                                       const Eigen::VectorXcd& symbols_2,
                                       const HopParams& hop, const NoiseModel& noise,
                                       Rng* rng, const ModelGeometry& geom = {}) {
    if (symbols_1.size() != symbols_2.size())
        throw ConfigError("simulate_round: symbol vectors must have equal length");
    const int length = static_cast<int>(symbols_1.size());
    const CombinedParams p = combine_params(hop, noise);

    Eigen::VectorXcd y =
        p.alpha_1 *
        shaped_vector(symbols_1, p.tau_1, geom.oversampling, geom.rolloff, geom.span);
    Eigen::VectorXcd other =
        shaped_vector(symbols_2, p.tau_2, geom.oversampling, geom.rolloff, geom.span);
    other.array() *= build_cfo_matrix(p.nu_2, length, geom.oversampling).array();
    y += p.alpha_2 * other;

    if (rng != nullptr) {
        const int n_samples = length * geom.oversampling;
        const Eigen::VectorXcd relay_rotation =
            build_cfo_matrix(hop.nu_rs_1, length, geom.oversampling);
        const cxd relay_gain = noise.zeta * hop.h_rs_1;
        for (int i = 0; i < n_samples; ++i)
            y[i] += relay_gain * relay_rotation[i] * rng->complex_gaussian(noise.sigma_n2);
        for (int i = 0; i < n_samples; ++i)
            y[i] += rng->complex_gaussian(noise.sigma_w2);
    }
    return y;
}

} // namespace twrn
