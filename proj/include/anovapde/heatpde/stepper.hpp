#pragma once

#include <cstddef>
#include <vector>

#include "anovapde/heatpde/axis_map.hpp"
#include "anovapde/heatpde/tridiag.hpp"

namespace anovapde {

/// Crank-Nicolson in one mapped direction: (I - dt/2 A) u' = (I + dt/2 A) u.
class CnStepper1D {
public:
    CnStepper1D(Tridiagonal op, double dt) : op_(std::move(op)), half_(0.5 * dt), lu_(op_, half_), tmp_(op_.size()) {
        if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    }

    CnStepper1D(const AxisMap& map, double lambda, int points, double dt)
        : CnStepper1D(make_op(map, lambda, points), dt) {}

    std::size_t points() const { return op_.size(); }

    void step(double* u) {
        op_.apply_shifted(half_, u, tmp_.data());
        lu_.solve(tmp_.data());
        std::copy(tmp_.begin(), tmp_.end(), u);
    }

    const Tridiagonal& op() const { return op_; }

private:
    static Tridiagonal make_op(const AxisMap& map, double lambda, int points) {
        auto c = transformed_coefficients(map, lambda, points);
        return diffusion_operator(c.a, c.b);
    }

    Tridiagonal op_;
    double half_;
    TridiagonalLU lu_;
    std::vector<double> tmp_;
};

/// Peaceman-Rachford splitting on a row-major n1 x n2 array (axis 2 contiguous):
///   (I - dt/2 A1) u* = (I + dt/2 A2) u,   (I - dt/2 A2) u' = (I + dt/2 A1) u*.
class AdiStepper2D {
public:
    AdiStepper2D(Tridiagonal op1, Tridiagonal op2, double dt)
        : op1_(std::move(op1)), op2_(std::move(op2)), half_(0.5 * dt),
          lu1_(op1_, half_), lu2_(op2_, half_), work_(op1_.size() * op2_.size()) {
        if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    }

    std::size_t n1() const { return op1_.size(); }
    std::size_t n2() const { return op2_.size(); }

    void step(double* u) {
        const std::size_t n1 = op1_.size(), n2 = op2_.size();
        double* w = work_.data();
        for (std::size_t i = 0; i < n1; ++i) op2_.apply_shifted(half_, u + i * n2, w + i * n2);
        lu1_.solve_rows(w, n2);

        // u = (I + dt/2 A1) w, row by row so the inner loop is contiguous
        std::copy(w, w + n2, u);
        for (std::size_t i = 1; i + 1 < n1; ++i) {
            const double lo = half_ * op1_.lower[i];
            const double di = 1.0 + half_ * op1_.diag[i];
            const double up = half_ * op1_.upper[i];
            const double* wm = w + (i - 1) * n2;
            const double* w0 = w + i * n2;
            const double* wp = w + (i + 1) * n2;
            double* out = u + i * n2;
            for (std::size_t j = 0; j < n2; ++j) out[j] = lo * wm[j] + di * w0[j] + up * wp[j];
        }
        std::copy(w + (n1 - 1) * n2, w + n1 * n2, u + (n1 - 1) * n2);

        for (std::size_t i = 0; i < n1; ++i) lu2_.solve(u + i * n2);
    }

private:
    Tridiagonal op1_, op2_;
    double half_;
    TridiagonalLU lu1_, lu2_;
    std::vector<double> work_;
};

}  // namespace anovapde
