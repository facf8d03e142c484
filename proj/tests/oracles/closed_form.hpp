#pragma once

// Closed-form and quadrature references, written independently of the library.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline double ncdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Black call on a lognormal forward F with total variance v = sigma^2 T.
inline double black_call(double f, double k, double v) {
    if (v <= 0.0) return std::max(f - k, 0.0);
    const double s = std::sqrt(v);
    const double d1 = (std::log(f / k) + 0.5 * v) / s;
    return f * ncdf(d1) - k * ncdf(d1 - s);
}

inline double black_put(double f, double k, double v) { return black_call(f, k, v) - (f - k); }

/// E[max(X1 - X2, 0)] with ln X_i ~ N(m_i, v_i) and correlation r.
inline double margrabe(double m1, double v1, double m2, double v2, double r) {
    const double f1 = std::exp(m1 + 0.5 * v1), f2 = std::exp(m2 + 0.5 * v2);
    const double v = v1 + v2 - 2.0 * r * std::sqrt(v1 * v2);
    return f2 * black_call(f1 / f2, 1.0, v);
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// E[f(X)] for a standard normal X, Gauss-Legendre on [-L, kink] and [kink, L].
inline double gaussian_expectation_1d(const std::function<double(double)>& f, double kink = 0.0, int n = 200,
                                      double l = 10.0) {
    const auto [x, w] = gauss_legendre(n);
    double s = 0.0;
    for (auto [a, b] : {std::pair{-l, kink}, std::pair{kink, l}}) {
        const double h = 0.5 * (b - a), c = 0.5 * (b + a);
        for (int i = 0; i < n; ++i) {
            const double t = c + h * x[i];
            s += h * w[i] * std::exp(-0.5 * t * t) * f(t);
        }
    }
    return s / std::sqrt(2.0 * std::numbers::pi);
}

/// E[f(X, Y)] for independent standard normals, Gauss-Legendre on [-L, L]^2.
inline double gaussian_expectation_2d(const std::function<double(double, double)>& f, int n = 200, double l = 9.0) {
    const auto [x, w] = gauss_legendre(n);
    const double c = 1.0 / (2.0 * std::numbers::pi);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = l * x[i];
        const double pa = w[i] * std::exp(-0.5 * a * a);
        for (int j = 0; j < n; ++j) {
            const double b = l * x[j];
            s += pa * w[j] * std::exp(-0.5 * b * b) * f(a, b);
        }
    }
    return s * c * l * l;
}

/// Solution of u_tau = lambda/2 u_zz with u(z, 0) = exp(-z^2 / (2 s^2)).
inline double heat_gaussian(double z, double tau, double lambda, double s) {
    const double v = s * s + lambda * tau;
    return s / std::sqrt(v) * std::exp(-z * z / (2.0 * v));
}

}  // namespace oracle
