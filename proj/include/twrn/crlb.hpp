#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "twrn/errors.hpp"
#include "twrn/signal_model.hpp"

namespace twrn {

/// Everything the Fisher information of the training-period model depends
/// on: the true end-to-end parameters, the two training sequences, the
/// effective noise variance, and the pulse geometry.
struct FimInputs {
    CombinedParams params;
    Eigen::VectorXcd training_1;
    Eigen::VectorXcd training_2;
    double sigma_u2 = 0.0;
    ModelGeometry geom;
};

/// 7x7 Fisher information over [Re a1, Re a2, Im a1, Im a2, nu2, tau1, tau2]
/// plus the extracted estimation bounds. The gain bounds sum the real and
/// imaginary diagonal entries of the inverse.
struct FimReport {
    Eigen::Matrix<double, 7, 7> fim;
    double crlb_alpha_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_alpha_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_nu_2 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_1 = std::numeric_limits<double>::quiet_NaN();
    double crlb_tau_2 = std::numeric_limits<double>::quiet_NaN();
    double condition_number = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

struct FimVectors {
    Eigen::VectorXcd omega_1, omega_2;  // shaped training columns
    Eigen::VectorXcd gamma_1, gamma_2;  // their tau-derivatives
    Eigen::VectorXd ramp;               // 2 pi i / Q sample phase ramp
};

inline FimVectors fim_vectors(const FimInputs& in) {
    const auto& g = in.geom;
    const int length = static_cast<int>(in.training_1.size());
    FimVectors v;
    v.omega_1 = shaped_vector(in.training_1, in.params.tau_1, g.oversampling, g.rolloff, g.span);
    v.gamma_1 =
        shaped_deriv_vector(in.training_1, in.params.tau_1, g.oversampling, g.rolloff, g.span);
    const Eigen::VectorXcd rot = build_cfo_matrix(in.params.nu_2, length, g.oversampling);
    v.omega_2 =
        shaped_vector(in.training_2, in.params.tau_2, g.oversampling, g.rolloff, g.span);
    v.omega_2.array() *= rot.array();
    v.gamma_2 =
        shaped_deriv_vector(in.training_2, in.params.tau_2, g.oversampling, g.rolloff, g.span);
    v.gamma_2.array() *= rot.array();
    const int n_samples = length * g.oversampling;
    v.ramp.resize(n_samples);
    for (int i = 0; i < n_samples; ++i)
        v.ramp[i] = 2.0 * std::numbers::pi * i / g.oversampling;
    return v;
}

/// Mean-derivative route: F = (2/sigma_u^2) Re{J^H J} with J the Jacobian of
/// the noiseless mean with respect to the seven real parameters.
inline Eigen::Matrix<double, 7, 7> fim_from_jacobian(const FimInputs& in) {
    const FimVectors v = fim_vectors(in);
    const int n_samples = static_cast<int>(v.omega_1.size());
    const cxd j_unit{0.0, 1.0};

    Eigen::MatrixXcd jac(n_samples, 7);
    jac.col(0) = v.omega_1;
    jac.col(1) = v.omega_2;
    jac.col(2) = j_unit * v.omega_1;
    jac.col(3) = j_unit * v.omega_2;
    jac.col(4) = j_unit * (v.ramp.array() * (in.params.alpha_2 * v.omega_2).array()).matrix();
    jac.col(5) = in.params.alpha_1 * v.gamma_1;
    jac.col(6) = in.params.alpha_2 * v.gamma_2;

    return (2.0 / in.sigma_u2) * (jac.adjoint() * jac).real();
}

/// Block route: assembles the same matrix from the structured pieces
/// (training basis, its derivative basis, the sample ramp, and the gain
/// diagonal), computed with dense shaping matrices. The carrier-offset
/// exponent uses the oversampled-sample convention i/Q throughout, and the
/// bottom-right block carries the conjugated gain diagonal on the left, as
/// the mean-derivative identity requires.
inline Eigen::Matrix<double, 7, 7> fim_from_blocks(const FimInputs& in) {
    const auto& g = in.geom;
    const int length = static_cast<int>(in.training_1.size());
    const int n_samples = length * g.oversampling;

    const Eigen::MatrixXd g1 =
        build_shaping_matrix(in.params.tau_1, length, g.oversampling, g.rolloff, g.span).entries;
    const Eigen::MatrixXd g2 =
        build_shaping_matrix(in.params.tau_2, length, g.oversampling, g.rolloff, g.span).entries;
    const Eigen::MatrixXd r1 =
        build_derivative_matrix(in.params.tau_1, length, g.oversampling, g.rolloff, g.span);
    const Eigen::MatrixXd r2 =
        build_derivative_matrix(in.params.tau_2, length, g.oversampling, g.rolloff, g.span);
    const Eigen::VectorXcd rot = build_cfo_matrix(in.params.nu_2, length, g.oversampling);

    Eigen::MatrixXcd omega(n_samples, 2);
    omega.col(0) = g1 * in.training_1;
    omega.col(1) = (rot.array() * (g2 * in.training_2).array()).matrix();

    Eigen::MatrixXcd gamma(n_samples, 2);
    gamma.col(0) = r1 * in.training_1;
    gamma.col(1) = (rot.array() * (r2 * in.training_2).array()).matrix();

    Eigen::VectorXd ramp(n_samples);
    for (int i = 0; i < n_samples; ++i)
        ramp[i] = 2.0 * std::numbers::pi * i / g.oversampling;

    const Eigen::VectorXcd phi_t2 = in.params.alpha_2 * omega.col(1);  // Phi t2
    const Eigen::VectorXcd ramp_phi = (ramp.array() * phi_t2.array()).matrix();

    Eigen::Matrix2cd gain_diag = Eigen::Matrix2cd::Zero();
    gain_diag(0, 0) = in.params.alpha_1;
    gain_diag(1, 1) = in.params.alpha_2;

    const Eigen::Matrix2cd a = omega.adjoint() * omega;
    const Eigen::Vector2cd v = omega.adjoint() * ramp_phi;
    const Eigen::Matrix2cd b = omega.adjoint() * gamma * gain_diag;
    const double s = ramp_phi.squaredNorm();
    const Eigen::RowVector2cd w = ramp_phi.adjoint() * gamma * gain_diag;
    const Eigen::Matrix2cd c = gain_diag.adjoint() * (gamma.adjoint() * gamma) * gain_diag;

    Eigen::Matrix<double, 7, 7> f;
    f.block<2, 2>(0, 0) = a.real();
    f.block<2, 2>(0, 2) = -a.imag();
    f.block<2, 1>(0, 4) = -v.imag();
    f.block<2, 2>(0, 5) = b.real();
    f.block<2, 2>(2, 0) = a.imag();
    f.block<2, 2>(2, 2) = a.real();
    f.block<2, 1>(2, 4) = v.real();
    f.block<2, 2>(2, 5) = b.imag();
    f.block<1, 2>(4, 0) = -v.imag().transpose();
    f.block<1, 2>(4, 2) = v.real().transpose();
    f(4, 4) = s;
    f.block<1, 2>(4, 5) = w.imag();
    f.block<2, 2>(5, 0) = b.real().transpose();
    f.block<2, 2>(5, 2) = b.imag().transpose();
    f.block<2, 1>(5, 4) = w.imag().transpose();
    f.block<2, 2>(5, 5) = c.real();
    return (2.0 / in.sigma_u2) * f;
}

inline void validate_fim_inputs(const FimInputs& in) {
    if (!(in.sigma_u2 > 0.0)) throw ConfigError("assemble_fim: sigma_u2 must be positive");
    if (in.training_1.size() != in.training_2.size() || in.training_1.size() < 2)
        throw ConfigError("assemble_fim: training sequences must share length >= 2");
    for (double v : {in.params.tau_1, in.params.tau_2, in.params.nu_2})
        if (!(v > -0.5 && v < 0.5))
            throw ConfigError("assemble_fim: offsets outside (-0.5, 0.5)");
}

} // namespace detail

/// Assembles the 7x7 Fisher information matrix. The structured block build
/// and the mean-derivative Jacobian build are both evaluated and must agree;
/// a persistent disagreement is reported as a numerical failure rather than
/// patched over.
inline FimReport assemble_fim(const FimInputs& inputs) {
    detail::validate_fim_inputs(inputs);
    const Eigen::Matrix<double, 7, 7> f_blocks = detail::fim_from_blocks(inputs);
    const Eigen::Matrix<double, 7, 7> f_jac = detail::fim_from_jacobian(inputs);

    const double scale = f_jac.cwiseAbs().maxCoeff();
    const double diff = (f_blocks - f_jac).cwiseAbs().maxCoeff();
    if (diff > 1e-9 * scale + 1e-30)
        throw NumericalError("assemble_fim: block and mean-derivative constructions disagree");

    FimReport report;
    report.fim = f_blocks;
    return report;
}

/// Inverts the FIM through a symmetric eigendecomposition and extracts the
/// per-parameter bounds; gain bounds sum their real and imaginary parts.
/// Signals when the matrix is numerically singular or its condition number
/// exceeds the cap.
inline FimReport crlb_from_fim(FimReport report, double condition_cap = 1e12) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 7, 7>> eig(report.fim);
    if (eig.info() != Eigen::Success)
        throw NumericalError("crlb_from_fim: eigendecomposition failed");
    const auto& values = eig.eigenvalues();
    const double min_eig = values.minCoeff();
    const double max_eig = values.maxCoeff();
    if (!(min_eig > 0.0))
        throw NumericalError("crlb_from_fim: FIM is singular or indefinite");
    report.condition_number = max_eig / min_eig;
    if (report.condition_number > condition_cap)
        throw NumericalError("crlb_from_fim: FIM condition number exceeds cap");

    const Eigen::Matrix<double, 7, 7> inv =
        eig.eigenvectors() * values.cwiseInverse().asDiagonal() *
        eig.eigenvectors().transpose();
    report.crlb_alpha_1 = inv(0, 0) + inv(2, 2);
    report.crlb_alpha_2 = inv(1, 1) + inv(3, 3);
    report.crlb_nu_2 = inv(4, 4);
    report.crlb_tau_1 = inv(5, 5);
    report.crlb_tau_2 = inv(6, 6);
    return report;
}

/// Convenience pipeline: assemble, invert, extract.
inline FimReport compute_crlb(const FimInputs& inputs, double condition_cap = 1e12) {
    return crlb_from_fim(assemble_fim(inputs), condition_cap);
}

} // namespace twrn
