#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "anovapde/heatpde/axis_map.hpp"
#include "anovapde/heatpde/grid.hpp"
#include "anovapde/heatpde/stepper.hpp"
#include "anovapde/heatpde/tridiag.hpp"
#include "oracles/closed_form.hpp"
#include "support/solver_cases.hpp"

using namespace anovapde;

TEST(AxisMap, InverseAndCentering) {
    const AxisMap m = AxisMap::centered(-2.3, 1.5);
    EXPECT_NEAR(m.y(-2.3), 0.5, 1e-15);
    EXPECT_NEAR(m.y(-0.8), 0.9, 1e-14);
    EXPECT_NEAR(m.y(-3.8), 0.1, 1e-14);
    for (double y = 0.01; y < 1.0; y += 0.07) EXPECT_NEAR(m.y(m.z(y)), y, 1e-14);
    EXPECT_TRUE(std::isfinite(m.z(0.0)));
    EXPECT_TRUE(std::isfinite(m.z(1.0)));
    EXPECT_THROW(AxisMap::centered(0.0, 0.0), DomainError);
}

TEST(AxisMap, DerivativeMatchesDifferenceQuotient) {
    const AxisMap m = AxisMap::centered(0.4, 0.8);
    for (double z : {-1.0, 0.0, 0.4, 1.3}) {
        const double h = 1e-6;
        EXPECT_NEAR(m.dy_dz(z), (m.y(z + h) - m.y(z - h)) / (2 * h), 1e-8);
    }
}

TEST(AxisMap, MappedCoefficientsFromChainRule) {
    // a = lambda/2 y'(z)^2 and b = lambda/2 y''(z) with y'' from differentiating y' by hand
    const AxisMap m = AxisMap::centered(0.3, 1.1);
    const double lambda = 0.05;
    for (double z : {-1.5, -0.2, 0.3, 0.9, 2.5}) {
        const double x = m.gamma * z + m.shift;
        const double y1 = m.gamma / (std::numbers::pi * (1 + x * x));
        const double y2 = -2.0 * m.gamma * m.gamma * x / (std::numbers::pi * (1 + x * x) * (1 + x * x));
        const double y = m.y(z);
        EXPECT_NEAR(mapped_a(m, lambda, y), 0.5 * lambda * y1 * y1, 1e-15);
        EXPECT_NEAR(mapped_b(m, lambda, y), 0.5 * lambda * y2, 1e-15);
    }
    EXPECT_EQ(mapped_a(m, lambda, 0.0), 0.0);
    EXPECT_EQ(mapped_b(m, lambda, 1.0), 0.0);
}

TEST(Operator, ReproducesHeatOperatorOnPolynomialsInZ) {
    // lambda/2 d^2/dz^2 sends z to 0 and z^2 to lambda
    const int n = 2001;
    const double lambda = 0.04;
    const AxisMap m = AxisMap::centered(0.0, 1.0);
    const auto c = transformed_coefficients(m, lambda, n);
    const Tridiagonal op = diffusion_operator(c.a, c.b);
    std::vector<double> lin(n), quad(n), out_l(n), out_q(n);
    for (int k = 0; k < n; ++k) {
        const double z = m.z(static_cast<double>(k) / (n - 1));
        lin[k] = z;
        quad[k] = z * z;
    }
    // (I + s A) x - x = s A x with s = 1
    op.apply_shifted(1.0, lin.data(), out_l.data());
    op.apply_shifted(1.0, quad.data(), out_q.data());
    for (int k = n / 5; k <= 4 * n / 5; ++k) {
        EXPECT_NEAR(out_l[k] - lin[k], 0.0, 1e-5) << k;
        EXPECT_NEAR(out_q[k] - quad[k], lambda, 1e-5 * lambda * 100) << k;
    }
    EXPECT_EQ(op.diag[0], 0.0);
    EXPECT_EQ(op.upper[0], 0.0);
    EXPECT_EQ(op.lower[n - 1], 0.0);
}

TEST(Tridiagonal, LuMatchesDenseSolve) {
    const int n = 37;
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Tridiagonal a(n);
    for (int k = 0; k < n; ++k) {
        a.diag[k] = -2.0 + 0.3 * d(gen);
        if (k > 0) a.lower[k] = 1.0 + 0.2 * d(gen);
        if (k + 1 < n) a.upper[k] = 1.0 + 0.2 * d(gen);
    }
    const double s = 0.37;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) {
        dense(k, k) -= s * a.diag[k];
        if (k > 0) dense(k, k - 1) -= s * a.lower[k];
        if (k + 1 < n) dense(k, k + 1) -= s * a.upper[k];
    }
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) rhs(k) = d(gen);
    const Eigen::VectorXd ref = dense.partialPivLu().solve(rhs);
    std::vector<double> x(rhs.data(), rhs.data() + n);
    TridiagonalLU lu(a, s);
    lu.solve(x.data());
    for (int k = 0; k < n; ++k) EXPECT_NEAR(x[k], ref(k), 1e-13);

    // several right-hand sides stored as rows
    const std::size_t w = 5;
    std::vector<double> rows(n * w), cols(n * w);
    for (int k = 0; k < n; ++k)
        for (std::size_t j = 0; j < w; ++j) rows[k * w + j] = cols[j * n + k] = d(gen);
    lu.solve_rows(rows.data(), w);
    for (std::size_t j = 0; j < w; ++j) {
        lu.solve(cols.data() + j * n);
        for (int k = 0; k < n; ++k) EXPECT_DOUBLE_EQ(rows[k * w + j], cols[j * n + k]);
    }
}

TEST(Tridiagonal, SingularPivotReported) {
    Tridiagonal a(3);
    a.diag = {1.0, 0.0, 0.0};
    EXPECT_THROW(TridiagonalLU(a, 1.0), NumericalError);
}

namespace {

double heat_kernel_error(int n, int steps) {
    const double lambda = 0.04, s = 0.5, tau = 2.5;
    const AxisMap m = AxisMap::centered(0.0, 1.6);
    std::vector<double> u(n);
    for (int k = 0; k < n; ++k) u[k] = oracle::heat_gaussian(m.z(static_cast<double>(k) / (n - 1)), 0.0, lambda, s);
    CnStepper1D cn(m, lambda, n, tau / steps);
    for (int k = 0; k < steps; ++k) cn.step(u.data());
    double worst = 0.0;
    for (int k = n / 10; k <= 9 * n / 10; ++k) {
        const double z = m.z(static_cast<double>(k) / (n - 1));
        worst = std::max(worst, std::abs(u[k] - oracle::heat_gaussian(z, tau, lambda, s)));
    }
    return worst;
}

}  // namespace

TEST(CrankNicolson, GaussianHeatKernelSecondOrder) {
    const double coarse = heat_kernel_error(401, 100);
    const double fine = heat_kernel_error(801, 200);
    EXPECT_LT(fine, 1e-5);
    EXPECT_GT(coarse / fine, 3.0);
    EXPECT_LT(coarse / fine, 5.0);
}

TEST(CrankNicolson, LognormalCall) {
    for (int j : {401, 601}) {
        const auto c = cases::lognormal_call_1d(j, 10);
        EXPECT_LT(c.rel_error(), 1e-4) << "J=" << j << " pde " << c.numeric << " exact " << c.reference;
    }
}

TEST(CrankNicolson, BlackMatchesQuadrature) {
    // the closed form itself, against Gauss-Legendre integration of the payoff
    const double v = 0.2, l0 = 0.1, k = 0.1;
    const double q = oracle::gaussian_expectation_1d(
        [&](double x) { return std::max(l0 * std::exp(std::sqrt(v) * x) - k, 0.0); }, std::log(k / l0) / std::sqrt(v));
    EXPECT_NEAR(q, oracle::black_call(l0 * std::exp(0.5 * v), k, v), 1e-14);
    // two-dimensional rule on a smooth integrand: E[exp(aX + bY)] = exp((a^2 + b^2) / 2)
    const double e2 = oracle::gaussian_expectation_2d([](double x, double y) { return std::exp(0.3 * x - 0.2 * y); }, 60);
    EXPECT_NEAR(e2, std::exp(0.5 * (0.09 + 0.04)), 1e-13);
}

TEST(Adi, MatchesUnsplitCrankNicolson) {
    const auto r = cases::adi_vs_dense(101, 40, 0.025, 0.07, 0.012, 0.09);
    EXPECT_LT(r.anchor_rel_error(), 1e-5);
    EXPECT_LT(r.grid_rel_error(), 1e-5);
}

TEST(Adi, ConvergesToUnsplitAsTimeStepShrinks) {
    const auto coarse = cases::adi_vs_dense(61, 10, 0.1);
    const auto fine = cases::adi_vs_dense(61, 40, 0.025);
    EXPECT_LT(fine.max_abs_diff, coarse.max_abs_diff);
}

TEST(TimeGrid, EventsOnGrid) {
    const TimeGrid tg{10, 4, 0.25};
    EXPECT_DOUBLE_EQ(tg.dt(), 0.025);
    EXPECT_EQ(tg.total_steps(), 40);
    EXPECT_EQ(tg.event_step(0.5), 20);
    EXPECT_THROW(tg.event_step(0.51), ConfigError);
    EXPECT_THROW(tg.event_step(1.25), ConfigError);
}

TEST(Interpolation, CubicExactOnCubics) {
    const std::size_t n = 21;
    auto f = [](double y) { return 1.0 - 2.0 * y + 3.0 * y * y - 4.0 * y * y * y; };
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = f(static_cast<double>(k) / (n - 1));
    for (double y : {0.0, 0.013, 0.5, 0.77, 0.999}) EXPECT_NEAR(interpolate_cubic(u.data(), n, 1, y, 0.0), f(y), 1e-13);

    auto g = [](double a, double b) { return a * a * b - b * b * b + 2.0 * a * b + 1.0; };
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = g(i / 20.0, j / 20.0);
    EXPECT_NEAR(interpolate_cubic(v.data(), n, n, 0.33, 0.71), g(0.33, 0.71), 1e-13);
    EXPECT_NEAR(interpolate_cubic(v.data(), n, n, 0.5, 0.5), g(0.5, 0.5), 1e-14);
    EXPECT_THROW(cubic_stencil(0.5, 3), ConfigError);
}

TEST(PdeConfig, Validation) {
    PdeConfig c;
    EXPECT_NO_THROW(c.validate());
    c.points = 9;
    EXPECT_THROW(c.validate(), ConfigError);
    c = PdeConfig{};
    c.steps_per_alpha = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}
