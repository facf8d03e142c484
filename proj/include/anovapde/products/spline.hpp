#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "anovapde/error.hpp"

namespace anovapde {

/// Natural cubic spline on fixed nodes. The tridiagonal system for the second
/// derivatives is factored once; each data set then costs one forward/backward pass.
class NaturalSpline {
public:
    explicit NaturalSpline(std::vector<double> nodes) : x_(std::move(nodes)) {
        const std::size_t n = x_.size();
        if (n < 2) throw ConfigError("spline needs at least 2 nodes");
        for (std::size_t k = 1; k < n; ++k)
            if (!(x_[k] > x_[k - 1])) throw ConfigError("spline nodes must be strictly increasing");
        h_.resize(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) h_[k] = x_[k + 1] - x_[k];
        // interior unknowns m_1..m_{n-2}; row k: h_{k-1} m_{k-1} + 2(h_{k-1}+h_k) m_k + h_k m_{k+1}
        const std::size_t m = n >= 2 ? n - 2 : 0;
        mult_.assign(m, 0.0);
        inv_piv_.assign(m, 0.0);
        double prev = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t k = r + 1;
            double piv = 2.0 * (h_[k - 1] + h_[k]);
            if (r > 0) {
                mult_[r] = h_[k - 1] / prev;
                piv -= mult_[r] * h_[k - 1];
            }
            inv_piv_[r] = 1.0 / piv;
            prev = piv;
        }
    }

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& nodes() const { return x_; }

    /// Second derivatives at the nodes for data y (zero at both ends).
    void second_derivatives(const double* y, double* m2) const {
        const std::size_t n = x_.size();
        m2[0] = 0.0;
        m2[n - 1] = 0.0;
        const std::size_t m = n - 2;
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t k = r + 1;
            double rhs = 6.0 * ((y[k + 1] - y[k]) / h_[k] - (y[k] - y[k - 1]) / h_[k - 1]);
            if (r > 0) rhs -= mult_[r] * m2[k - 1];
            m2[k] = rhs;
        }
        for (std::size_t r = m; r-- > 0;) {
            const std::size_t k = r + 1;
            double v = m2[k];
            if (r + 1 < m) v -= h_[k] * m2[k + 1];
            m2[k] = v * inv_piv_[r];
        }
    }

    std::size_t interval(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(k, x_.size() - 2);
    }

    double eval(const double* y, const double* m2, double x) const {
        const std::size_t k = interval(x);
        const double h = h_[k];
        const double a = (x_[k + 1] - x) / h;
        const double b = (x - x_[k]) / h;
        return a * y[k] + b * y[k + 1] +
               ((a * a * a - a) * m2[k] + (b * b * b - b) * m2[k + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> x_;
    std::vector<double> h_;
    std::vector<double> mult_;
    std::vector<double> inv_piv_;
};

}  // namespace anovapde
