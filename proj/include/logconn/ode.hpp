#pragma once

// Adaptive Dormand-Prince 5(4) integration of matrix linear ODEs
// F'(t) = G(t) F(t). The coefficient G is supplied as a callback so the
// same core serves z d/dz systems, spiral arrows, and rational systems.

#include <algorithm>
#include <cmath>
#include <functional>

#include "logconn/errors.hpp"
#include "logconn/types.hpp"

namespace logconn {
namespace detail {

using OdeCoeff = std::function<CMatrix(double)>;

inline CMatrix integrate_linear(const OdeCoeff& G, double t0, double t1, Eigen::Index n,
                                double rtol) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                        e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                        e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    const double span = t1 - t0;
    CMatrix F = cidentity(n);
    if (span == 0.0) return F;

    double t = t0;
    double h = span / 64.0;
    const double hmin = std::abs(span) * 1e-14;
    CMatrix k1 = G(t) * F;
    long steps = 0;
    while ((span > 0 && t < t1) || (span < 0 && t > t1)) {
        if (++steps > 4000000) throw StepFailure("integrate_linear: step budget exhausted");
        if ((span > 0 && t + h > t1) || (span < 0 && t + h < t1)) h = t1 - t;

        CMatrix k2 = G(t + c2 * h) * (F + h * a21 * k1);
        CMatrix k3 = G(t + c3 * h) * (F + h * (a31 * k1 + a32 * k2));
        CMatrix k4 = G(t + c4 * h) * (F + h * (a41 * k1 + a42 * k2 + a43 * k3));
        CMatrix k5 = G(t + c5 * h) * (F + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        CMatrix k6 = G(t + h) * (F + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        CMatrix Fnew = F + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        CMatrix k7 = G(t + h) * Fnew;

        const double sc = rtol * std::max({1.0, fnorm(F), fnorm(Fnew)});
        const double err =
            std::abs(h) *
            fnorm(e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7) / sc;
        if (err <= 1.0) {
            t += h;
            F = std::move(Fnew);
            k1 = std::move(k7);  // first-same-as-last
        }
        const double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) < hmin)
            throw StepFailure("integrate_linear: step size underflow, rtol unattainable");
    }
    require_finite(F, "integrate_linear");
    return F;
}

} // namespace detail
} // namespace logconn
