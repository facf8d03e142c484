#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "anovapde/error.hpp"

namespace anovapde {

/// Three-band matrix; row k holds lower[k] (column k-1), diag[k], upper[k] (column k+1).
struct Tridiagonal {
    std::vector<double> lower, diag, upper;

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}

    std::size_t size() const { return diag.size(); }

    /// out = (I + s * this) x, contiguous.
    void apply_shifted(double s, const double* x, double* out) const {
        const std::size_t n = size();
        if (n == 1) {
            out[0] = x[0] + s * diag[0] * x[0];
            return;
        }
        out[0] = x[0] + s * (diag[0] * x[0] + upper[0] * x[1]);
        for (std::size_t k = 1; k + 1 < n; ++k)
            out[k] = x[k] + s * (lower[k] * x[k - 1] + diag[k] * x[k] + upper[k] * x[k + 1]);
        out[n - 1] = x[n - 1] + s * (lower[n - 1] * x[n - 2] + diag[n - 1] * x[n - 1]);
    }
};

/// Discretized a u_yy + b u_y on the equidistant grid y_k = k/(n-1), central differences.
/// Boundary rows are zero because a and b vanish there.
inline Tridiagonal diffusion_operator(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    Tridiagonal op(n);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double d2 = a[k] / (h * h);
        const double d1 = b[k] / (2.0 * h);
        op.lower[k] = d2 - d1;
        op.diag[k] = -2.0 * d2;
        op.upper[k] = d2 + d1;
    }
    return op;
}

/// LU factors of I - s * A, computed once and reused for every right-hand side.
class TridiagonalLU {
public:
    TridiagonalLU() = default;

    TridiagonalLU(const Tridiagonal& a, double s) {
        const std::size_t n = a.size();
        mult_.assign(n, 0.0);
        inv_pivot_.assign(n, 0.0);
        upper_.assign(n, 0.0);
        double prev_pivot = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = 1.0 - s * a.diag[k];
            const double l = -s * a.lower[k];
            upper_[k] = -s * a.upper[k];
            double piv = d;
            if (k > 0) {
                mult_[k] = l / prev_pivot;
                piv = d - mult_[k] * upper_[k - 1];
            }
            if (!(std::abs(piv) > 1e-14)) {
                std::ostringstream msg;
                msg << "tridiagonal factorization hit pivot " << piv << " at row " << k;
                throw NumericalError(msg.str());
            }
            inv_pivot_[k] = 1.0 / piv;
            prev_pivot = piv;
        }
    }

    std::size_t size() const { return inv_pivot_.size(); }

    /// In-place solve for one contiguous right-hand side.
    void solve(double* x) const {
        const std::size_t n = size();
        for (std::size_t k = 1; k < n; ++k) x[k] -= mult_[k] * x[k - 1];
        x[n - 1] *= inv_pivot_[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) x[k] = (x[k] - upper_[k] * x[k + 1]) * inv_pivot_[k];
    }

    /// In-place solve for `width` right-hand sides stored as rows: element k of
    /// system j lives at x[k * width + j]. The inner loop runs over j.
    void solve_rows(double* x, std::size_t width) const {
        const std::size_t n = size();
        for (std::size_t k = 1; k < n; ++k) {
            const double m = mult_[k];
            double* row = x + k * width;
            const double* prev = row - width;
            for (std::size_t j = 0; j < width; ++j) row[j] -= m * prev[j];
        }
        {
            const double ip = inv_pivot_[n - 1];
            double* row = x + (n - 1) * width;
            for (std::size_t j = 0; j < width; ++j) row[j] *= ip;
        }
        for (std::size_t k = n - 1; k-- > 0;) {
            const double ip = inv_pivot_[k];
            const double up = upper_[k];
            double* row = x + k * width;
            const double* next = row + width;
            for (std::size_t j = 0; j < width; ++j) row[j] = (row[j] - up * next[j]) * ip;
        }
    }

private:
    std::vector<double> mult_;
    std::vector<double> inv_pivot_;
    std::vector<double> upper_;
};

}  // namespace anovapde
