#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twrn/errors.hpp"
#include "twrn/estimators.hpp"
#include "twrn/signal_model.hpp"

namespace twrn {

struct DetectionResult {
    Eigen::VectorXcd soft_symbols;
    std::vector<std::uint8_t> hard_bits;  // Gray-sliced, 2 bits per symbol
    double residual_energy = 0.0;         // || z - Phi * soft ||^2
};

/// Removes the terminal's own contribution from the data-period reception:
/// z = y - alpha_1 G(tau_1) d_self.
inline Eigen::VectorXcd cancel_self_interference(const Eigen::VectorXcd& y_dtp,
                                                 const Eigen::VectorXcd& d_self,
                                                 cxd alpha_hat_1, double tau_hat_1,
                                                 const ModelGeometry& geom = {}) {
    if (y_dtp.size() != d_self.size() * geom.oversampling)
        throw ConfigError("cancel_self_interference: sample/symbol length mismatch");
    return y_dtp - alpha_hat_1 * shaped_vector(d_self, tau_hat_1, geom.oversampling,
                                               geom.rolloff, geom.span);
}

/// Linear MMSE detection of the opposing user's QPSK stream:
///   soft = (Phi^H Phi + sigma_u^2 I)^-1 Phi^H z,  Phi = alpha_2 Lambda G.
/// The carrier rotation drops out of the normal matrix (Lambda is unitary),
/// leaving a real banded Gram, so the solve runs on a real Cholesky factor
/// applied to the real and imaginary parts of the rotated right-hand side.
inline DetectionResult mmse_detect(const Eigen::VectorXcd& z, cxd alpha_hat_2,
                                   double tau_hat_2, double nu_hat_2, double sigma_u2,
                                   const ModelGeometry& geom = {}) {
    if (!(sigma_u2 > 0.0)) throw ConfigError("mmse_detect: sigma_u2 must be positive");
    if (z.size() % geom.oversampling != 0)
        throw ConfigError("mmse_detect: sample count not divisible by oversampling");
    const int length = static_cast<int>(z.size()) / geom.oversampling;

    Eigen::MatrixXd normal =
        std::norm(alpha_hat_2) *
        shaping_gram(tau_hat_2, length, geom.oversampling, geom.rolloff, geom.span);
    normal.diagonal().array() += sigma_u2;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success)
        throw NumericalError("mmse_detect: regularized normal matrix is not positive definite");

    const Eigen::VectorXcd rotation = build_cfo_matrix(nu_hat_2, length, geom.oversampling);
    const Eigen::VectorXcd rotated = (rotation.conjugate().array() * z.array()).matrix();
    const Eigen::VectorXcd rhs =
        std::conj(alpha_hat_2) * shaped_adjoint(rotated, tau_hat_2, length,
                                                geom.oversampling, geom.rolloff, geom.span);

    DetectionResult r;
    const Eigen::VectorXd soft_re = llt.solve(rhs.real());
    const Eigen::VectorXd soft_im = llt.solve(rhs.imag());
    r.soft_symbols.resize(length);
    r.soft_symbols.real() = soft_re;
    r.soft_symbols.imag() = soft_im;

    Eigen::VectorXcd model = shaped_vector(r.soft_symbols, tau_hat_2, geom.oversampling,
                                           geom.rolloff, geom.span);
    model.array() *= rotation.array();
    r.residual_energy = (z - alpha_hat_2 * model).squaredNorm();

    r.hard_bits.resize(2 * static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) {
        const auto bits = qpsk_slice(r.soft_symbols[n]);
        r.hard_bits[2 * static_cast<std::size_t>(n)] = bits[0];
        r.hard_bits[2 * static_cast<std::size_t>(n) + 1] = bits[1];
    }
    return r;
}

/// Detection with perfect knowledge of the impairments; same filter, true
/// parameters.
inline DetectionResult benchmark_detect(const Eigen::VectorXcd& z,
                                        const CombinedParams& truth, double sigma_u2,
                                        const ModelGeometry& geom = {}) {
    return mmse_detect(z, truth.alpha_2, truth.tau_2, truth.nu_2, sigma_u2, geom);
}

/// Hamming distance plus total bit count.
inline std::pair<std::size_t, std::size_t>
count_bit_errors(const std::vector<std::uint8_t>& hard_bits,
                 const std::vector<std::uint8_t>& truth_bits) {
    if (hard_bits.size() != truth_bits.size())
        throw ConfigError("count_bit_errors: bit vector length mismatch");
    std::size_t errors = 0;
    for (std::size_t k = 0; k < hard_bits.size(); ++k)
        errors += (hard_bits[k] != truth_bits[k]) ? 1u : 0u;
    return {errors, hard_bits.size()};
}

} // namespace twrn
