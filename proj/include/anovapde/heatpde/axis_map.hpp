#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/model.hpp"

namespace anovapde {

/// y(z) = arctan(gamma z + shift) / pi + 1/2, taking the real line onto (0, 1).
struct AxisMap {
    double gamma = 1.0;
    double shift = 0.0;

    double y(double z) const { return std::atan(gamma * z + shift) / std::numbers::pi + 0.5; }

    /// Inverse map; y is pulled inside [eps, 1 - eps] so the edges give large finite z.
    double z(double y, double eps = 1e-12) const {
        const double yc = std::clamp(y, eps, 1.0 - eps);
        return (std::tan(std::numbers::pi * (yc - 0.5)) - shift) / gamma;
    }

    double dy_dz(double z) const {
        const double x = gamma * z + shift;
        return gamma / (std::numbers::pi * (1.0 + x * x));
    }

    /// Map that sends [center - width, center + width] to [0.1, 0.9].
    static AxisMap centered(double center, double width) {
        if (!(width > 0.0)) throw DomainError("axis map width must be positive");
        AxisMap m;
        m.gamma = std::tan(0.4 * std::numbers::pi) / width;
        m.shift = -m.gamma * center;
        return m;
    }
};

/// Half-width in z of the box whose image spans rates in [rate_lo, rate_hi],
/// floored at three standard deviations of the diffusion up to maturity.
inline double axis_half_width(const Spectrum& spec, int i, double lambda_i, double maturity,
                              double rate_lo = 0.02, double rate_hi = 0.5) {
    if (!(rate_lo > 0.0 && rate_lo < rate_hi)) throw ConfigError("need 0 < L_lo < L_hi");
    const double proj = std::abs(spec.q.col(i).sum());
    const double w = 0.5 * proj * (std::log(rate_hi) - std::log(rate_lo));
    return std::max(w, 3.0 * std::sqrt(std::max(lambda_i, 0.0) * maturity));
}

inline AxisMap calibrate_axis_map(const Spectrum& spec, int i, double lambda_i, double anchor_i,
                                  double maturity, double rate_lo = 0.02, double rate_hi = 0.5) {
    return AxisMap::centered(anchor_i,
                             axis_half_width(spec, i, lambda_i, maturity, rate_lo, rate_hi));
}

/// Coefficients of u_tau = a(y) u_yy + b(y) u_y, the image of u_tau = lambda/2 u_zz.
struct MappedCoefficients {
    std::vector<double> a;
    std::vector<double> b;
};

inline double mapped_a(const AxisMap& m, double lambda, double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    const double c = std::cos(std::numbers::pi * (y - 0.5));
    const double g = m.gamma / std::numbers::pi;
    return 0.5 * lambda * g * g * c * c * c * c;
}

inline double mapped_b(const AxisMap& m, double lambda, double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    const double th = std::numbers::pi * (y - 0.5);
    const double c = std::cos(th);
    return -0.5 * lambda * (2.0 * m.gamma * m.gamma / std::numbers::pi) * std::sin(th) * c * c * c;
}

inline MappedCoefficients transformed_coefficients(const AxisMap& m, double lambda, int points) {
    MappedCoefficients out{std::vector<double>(static_cast<std::size_t>(points)),
                           std::vector<double>(static_cast<std::size_t>(points))};
    for (int k = 0; k < points; ++k) {
        const double y = static_cast<double>(k) / (points - 1);
        out.a[static_cast<std::size_t>(k)] = mapped_a(m, lambda, y);
        out.b[static_cast<std::size_t>(k)] = mapped_b(m, lambda, y);
    }
    return out;
}

}  // namespace anovapde
