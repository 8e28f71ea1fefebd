#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "twrn/errors.hpp"
#include "twrn/rrc.hpp"

namespace twrn {

/// Oversampled pulse-shaping matrix: entry (i, n) is the pulse sampled at
/// i/Q - n - tau, so the product with a length-L symbol vector yields the
/// LQ-sample shaped waveform. Symbols near the frame edges lose their pulse
/// tails; no cyclic extension is applied.
struct ShapingMatrix {
    Eigen::MatrixXd entries; // LQ x L
    double tau = 0.0;
    double rolloff = 0.0;
    double span = 0.0;
};

namespace detail {

inline void check_geometry(int length, int oversampling) {
    if (length < 1) throw ConfigError("symbol count must be positive");
    if (oversampling < 2)
        throw ConfigError("oversampling factor must be at least 2");
}

/// Pulse samples on the T/Q grid shifted by tau, covering the truncated
/// support (padded one sample each side so floor/ceil rounding can never
/// drop a boundary sample).
struct PulseTable {
    int dmin, dmax;
    std::vector<double> values;

    PulseTable(double tau, int oversampling, double rolloff, double span, bool derivative) {
        dmin = static_cast<int>(std::floor(oversampling * (tau - span))) - 1;
        dmax = static_cast<int>(std::ceil(oversampling * (tau + span))) + 1;
        values.resize(static_cast<std::size_t>(dmax - dmin + 1));
        for (int d = dmin; d <= dmax; ++d) {
            double arg = static_cast<double>(d) / oversampling - tau;
            values[static_cast<std::size_t>(d - dmin)] =
                derivative ? -rrc_pulse_deriv(arg, rolloff, span)
                           : rrc_pulse(arg, rolloff, span);
        }
    }

    double at(int d) const { return values[static_cast<std::size_t>(d - dmin)]; }
};

template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic>
shaped_product(const Eigen::Vector<Scalar, Eigen::Dynamic>& symbols, double tau,
               int oversampling, double rolloff, double span, bool derivative) {
    const int length = static_cast<int>(symbols.size());
    check_geometry(length, oversampling);
    const PulseTable table(tau, oversampling, rolloff, span, derivative);
    const int n_samples = length * oversampling;
    Eigen::Vector<Scalar, Eigen::Dynamic> out =
        Eigen::Vector<Scalar, Eigen::Dynamic>::Zero(n_samples);
    for (int n = 0; n < length; ++n) {
        const int base = n * oversampling;
        for (int d = table.dmin; d <= table.dmax; ++d) {
            const int i = base + d;
            if (i >= 0 && i < n_samples) out[i] += symbols[n] * table.at(d);
        }
    }
    return out;
}

} // namespace detail

/// Dense LQ x L pulse-shaping matrix G(tau).
inline ShapingMatrix build_shaping_matrix(double tau, int length, int oversampling,
                                          double rolloff, double span) {
    detail::check_geometry(length, oversampling);
    ShapingMatrix m{Eigen::MatrixXd(length * oversampling, length), tau, rolloff, span};
    for (int i = 0; i < length * oversampling; ++i)
        for (int n = 0; n < length; ++n)
            m.entries(i, n) =
                rrc_pulse(static_cast<double>(i) / oversampling - n - tau, rolloff, span);
    return m;
}

/// Entrywise derivative of G with respect to tau (the pulse argument carries
/// -tau, so each entry is the negated pulse slope at the same argument).
inline Eigen::MatrixXd build_derivative_matrix(double tau, int length, int oversampling,
                                               double rolloff, double span) {
    detail::check_geometry(length, oversampling);
    Eigen::MatrixXd r(length * oversampling, length);
    for (int i = 0; i < length * oversampling; ++i)
        for (int n = 0; n < length; ++n)
            r(i, n) = -rrc_pulse_deriv(static_cast<double>(i) / oversampling - n - tau,
                                       rolloff, span);
    return r;
}

/// Diagonal of the carrier-offset rotation matrix: entry i is
/// exp(j 2 pi nu i / Q) with nu in cycles per symbol.
inline Eigen::VectorXcd build_cfo_matrix(double nu, int length, int oversampling) {
    detail::check_geometry(length, oversampling);
    const int n_samples = length * oversampling;
    Eigen::VectorXcd d(n_samples);
    const double step = 2.0 * std::numbers::pi * nu / oversampling;
    for (int i = 0; i < n_samples; ++i)
        d[i] = std::polar(1.0, step * i);
    return d;
}

/// G(tau) * symbols without forming the dense matrix; exploits the truncated
/// pulse support, giving O(L Q span) work.
inline Eigen::VectorXcd shaped_vector(const Eigen::VectorXcd& symbols, double tau,
                                      int oversampling, double rolloff, double span) {
    return detail::shaped_product<std::complex<double>>(symbols, tau, oversampling,
                                                        rolloff, span, false);
}

/// R(tau) * symbols, the tau-derivative counterpart of shaped_vector.
inline Eigen::VectorXcd shaped_deriv_vector(const Eigen::VectorXcd& symbols, double tau,
                                            int oversampling, double rolloff, double span) {
    return detail::shaped_product<std::complex<double>>(symbols, tau, oversampling,
                                                        rolloff, span, true);
}

/// G(tau)^T * samples (G is real, so transpose equals adjoint).
inline Eigen::VectorXcd shaped_adjoint(const Eigen::VectorXcd& samples, double tau,
                                       int length, int oversampling, double rolloff,
                                       double span) {
    detail::check_geometry(length, oversampling);
    const int n_samples = length * oversampling;
    if (samples.size() != n_samples)
        throw ConfigError("shaped_adjoint: sample vector length mismatch");
    const detail::PulseTable table(tau, oversampling, rolloff, span, false);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(length);
    for (int n = 0; n < length; ++n) {
        const int base = n * oversampling;
        std::complex<double> acc{0.0, 0.0};
        for (int d = table.dmin; d <= table.dmax; ++d) {
            const int i = base + d;
            if (i >= 0 && i < n_samples) acc += samples[i] * table.at(d);
        }
        out[n] = acc;
    }
    return out;
}

/// G(tau)^T G(tau), a banded symmetric L x L matrix (bandwidth 2*span
/// symbols). Computed through the pulse table rather than a dense product.
inline Eigen::MatrixXd shaping_gram(double tau, int length, int oversampling,
                                    double rolloff, double span) {
    detail::check_geometry(length, oversampling);
    const detail::PulseTable table(tau, oversampling, rolloff, span, false);
    const int n_samples = length * oversampling;
    const int band = static_cast<int>(std::ceil(2.0 * span)) + 1;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(length, length);
    for (int n = 0; n < length; ++n) {
        for (int m = n; m < std::min(length, n + band + 1); ++m) {
            const int lo = std::max({0, n * oversampling + table.dmin,
                                     m * oversampling + table.dmin});
            const int hi = std::min({n_samples - 1, n * oversampling + table.dmax,
                                     m * oversampling + table.dmax});
            double acc = 0.0;
            for (int i = lo; i <= hi; ++i)
                acc += table.at(i - n * oversampling) * table.at(i - m * oversampling);
            gram(n, m) = acc;
            gram(m, n) = acc;
        }
    }
    return gram;
}

} // namespace twrn
