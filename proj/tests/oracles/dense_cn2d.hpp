#pragma once

// Unsplit 2D Crank-Nicolson on the mapped grid, (I - dt/2 (A1 + A2)) u' = (I + dt/2 (A1 + A2)) u,
// with one sparse LU of the full n1 n2 x n1 n2 system. Reference for the ADI stepper.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <stdexcept>
#include <vector>

#include "anovapde/heatpde/tridiag.hpp"

namespace oracle {

class DenseCn2D {
public:
    DenseCn2D(const anovapde::Tridiagonal& a1, const anovapde::Tridiagonal& a2, double dt)
        : n1_(a1.size()), n2_(a2.size()) {
        const auto n = static_cast<Eigen::Index>(n1_ * n2_);
        std::vector<Eigen::Triplet<double>> tl, tr;
        auto at = [&](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>(i * n2_ + j); };
        const double h = 0.5 * dt;
        for (std::size_t i = 0; i < n1_; ++i) {
            for (std::size_t j = 0; j < n2_; ++j) {
                const Eigen::Index p = at(i, j);
                double d = a1.diag[i] + a2.diag[j];
                tl.emplace_back(p, p, 1.0 - h * d);
                tr.emplace_back(p, p, 1.0 + h * d);
                auto off = [&](Eigen::Index q, double c) {
                    if (c == 0.0) return;
                    tl.emplace_back(p, q, -h * c);
                    tr.emplace_back(p, q, h * c);
                };
                if (i > 0) off(at(i - 1, j), a1.lower[i]);
                if (i + 1 < n1_) off(at(i + 1, j), a1.upper[i]);
                if (j > 0) off(at(i, j - 1), a2.lower[j]);
                if (j + 1 < n2_) off(at(i, j + 1), a2.upper[j]);
            }
        }
        lhs_.resize(n, n);
        rhs_.resize(n, n);
        lhs_.setFromTriplets(tl.begin(), tl.end());
        rhs_.setFromTriplets(tr.begin(), tr.end());
        lu_.analyzePattern(lhs_);
        lu_.factorize(lhs_);
        if (lu_.info() != Eigen::Success) throw std::runtime_error("sparse LU failed");
    }

    void step(std::vector<double>& u) {
        Eigen::Map<Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
        const Eigen::VectorXd b = rhs_ * v;
        v = lu_.solve(b);
    }

private:
    std::size_t n1_, n2_;
    Eigen::SparseMatrix<double> lhs_, rhs_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

}  // namespace oracle
