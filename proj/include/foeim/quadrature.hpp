// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "foeim/types.hpp"

namespace foeim {

/// One-dimensional quadrature rule on the reference interval [0, 1].
struct QuadratureRule1D {
    Vector points;
    Vector weights; // sum to 1
};

/// n-point Gauss-Legendre rule on [0, 1]; exact for polynomials of degree 2n-1.
inline QuadratureRule1D gauss_legendre(int n) {
    FOEIM_REQUIRE(n >= 1, "gauss_legendre: need at least one point, got " << n);
    QuadratureRule1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev initial guess, on [-1, 1].
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pm = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.points(n - 1 - i) = 0.5 * (x + 1.0);
        rule.weights(n - 1 - i) = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

/// Values (and optionally derivatives) of the degree-p nodal Lagrange basis on
/// equispaced nodes {j/p} of [0, 1], evaluated at xi. Output arrays hold p+1 entries.
inline void lagrange_eval(int p, double xi, double* vals, double* derivs = nullptr) {
    if (p == 0) {
        vals[0] = 1.0;
        if (derivs) derivs[0] = 0.0;
        return;
    }
    for (int j = 0; j <= p; ++j) {
        const double xj = static_cast<double>(j) / p;
        double v = 1.0;
        for (int k = 0; k <= p; ++k) {
            if (k == j) continue;
            const double xk = static_cast<double>(k) / p;
            v *= (xi - xk) / (xj - xk);
        }
        vals[j] = v;
        if (derivs) {
            double d = 0.0;
            for (int m = 0; m <= p; ++m) {
                if (m == j) continue;
                const double xm = static_cast<double>(m) / p;
                double term = 1.0 / (xj - xm);
                for (int k = 0; k <= p; ++k) {
                    if (k == j || k == m) continue;
                    const double xk = static_cast<double>(k) / p;
                    term *= (xi - xk) / (xj - xk);
                }
                d += term;
            }
            derivs[j] = d;
        }
    }
}

} // namespace foeim
