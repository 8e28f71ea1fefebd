#pragma once

#include <cmath>
#include <numbers>

#include "twrn/errors.hpp"

namespace twrn {
namespace detail {

// The pulse is the ratio N(t)/D(t) with
//   N(t) = sin(a t) + 4 b4 t cos(b t),   a = pi (1 - beta), b = pi (1 + beta)
//   D(t) = pi t (1 - (4 beta t)^2)
// Both N and D have simple zeros at t = 0 and t = +-1/(4 beta), so the ratio
// is evaluated by local series division inside a small radius around each of
// those points and by the closed form elsewhere.

struct RrcEval {
    double value;
    double slope;
};

inline RrcEval rrc_eval(double t, double beta) {
    const double pi = std::numbers::pi;
    const double a = pi * (1.0 - beta);
    const double b = pi * (1.0 + beta);
    const double t0 = 1.0 / (4.0 * beta);

    if (std::abs(t) < 1e-3) {
        // Odd/odd series around the origin, three terms each.
        const double n1 = a + 4.0 * beta;
        const double n3 = -(a * a * a / 6.0 + 2.0 * beta * b * b);
        const double n5 = a * a * a * a * a / 120.0 + beta * b * b * b * b / 6.0;
        const double d1 = pi;
        const double d3 = -16.0 * pi * beta * beta;
        const double c0 = n1 / d1;
        const double c2 = (n3 - c0 * d3) / d1;
        const double c4 = (n5 - c2 * d3) / d1;
        const double t2 = t * t;
        return {c0 + c2 * t2 + c4 * t2 * t2, (2.0 * c2 + 4.0 * c4 * t2) * t};
    }

    const double s = (t > 0.0) ? t0 : -t0;
    if (std::abs(t - s) < 1e-4) {
        // N and D share a simple zero at +-t0; divide it out analytically and
        // expand the remaining ratio to second order in d = t - s.
        const double sa = std::sin(a * s), ca = std::cos(a * s);
        const double sb = std::sin(b * s), cb = std::cos(b * s);
        const double dN1 = a * ca + 4.0 * beta * cb - 4.0 * beta * b * s * sb;
        const double dN2 = -a * a * sa - 8.0 * beta * b * sb - 4.0 * beta * b * b * s * cb;
        const double dN3 = -a * a * a * ca - 12.0 * beta * b * b * cb + 4.0 * beta * b * b * b * s * sb;
        const double dD1 = pi - 48.0 * pi * beta * beta * s * s;
        const double dD2 = -96.0 * pi * beta * beta * s;
        const double dD3 = -96.0 * pi * beta * beta;
        const double num0 = dN1, num1 = dN2 / 2.0, num2 = dN3 / 6.0;
        const double den0 = dD1, den1 = dD2 / 2.0, den2 = dD3 / 6.0;
        const double e0 = num0 / den0;
        const double e1 = (num1 - e0 * den1) / den0;
        const double e2 = (num2 - e0 * den2 - e1 * den1) / den0;
        const double d = t - s;
        return {e0 + (e1 + e2 * d) * d, e1 + 2.0 * e2 * d};
    }

    const double num = std::sin(a * t) + 4.0 * beta * t * std::cos(b * t);
    const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
    const double dnum = a * std::cos(a * t) + 4.0 * beta * std::cos(b * t) -
                        4.0 * beta * b * t * std::sin(b * t);
    const double dden = pi - 48.0 * pi * beta * beta * t * t;
    return {num / den, (dnum * den - num * dden) / (den * den)};
}

inline void check_pulse_args(double rolloff, double span) {
    if (!(rolloff > 0.0) || rolloff > 1.0)
        throw ConfigError("rrc rolloff must lie in (0, 1]");
    if (!(span >= 1.0))
        throw ConfigError("rrc span must be at least one symbol");
}

} // namespace detail

/// Unit-energy root-raised-cosine pulse, truncated to |t| <= span symbols.
/// Time is in symbol periods; the peak value is 1 - rolloff + 4 rolloff / pi.
inline double rrc_pulse(double t, double rolloff, double span) {
    detail::check_pulse_args(rolloff, span);
    if (std::abs(t) > span) return 0.0;
    return detail::rrc_eval(t, rolloff).value;
}

/// Time derivative of rrc_pulse, with the same truncated support.
inline double rrc_pulse_deriv(double t, double rolloff, double span) {
    detail::check_pulse_args(rolloff, span);
    if (std::abs(t) > span) return 0.0;
    return detail::rrc_eval(t, rolloff).slope;
}

} // namespace twrn
