#pragma once

// LIBOR market model data: correlation, covariance, principal components,
// frozen drift and the coordinate change between log-LIBORs and the
// decoupled heat-equation coordinates z.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "anovapde/error.hpp"

namespace anovapde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Equidistant tenor structure T_i = alpha * (i - 1), flat volatility,
/// exponential correlation, terminal-bond numeraire P(T_{N+1}).
struct LmmConfig {
    int n = 0;
    double alpha = 0.25;
    double phi = 0.0413;
    double vol = 0.2;
    std::vector<double> initial_rates;

    static LmmConfig flat(int n, double level, double alpha = 0.25, double phi = 0.0413,
                          double vol = 0.2) {
        return LmmConfig{n, alpha, phi, vol, std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), level)};
    }

    void validate() const {
        if (n < 2) throw ConfigError("model.N must be >= 2, got " + std::to_string(n));
        if (!(alpha > 0.0)) throw ConfigError("model.alpha must be > 0");
        if (!(phi > 0.0)) throw ConfigError("model.phi must be > 0");
        if (!(vol > 0.0)) throw ConfigError("model.c must be > 0");
        if (static_cast<int>(initial_rates.size()) != n)
            throw ConfigError("model.L0 must hold N = " + std::to_string(n) + " rates, got " +
                              std::to_string(initial_rates.size()));
        for (double l : initial_rates)
            if (!(l > 0.0)) throw ConfigError("model.L0 entries must be > 0");
    }

    /// Fixing date of rate i (0-based), i.e. T_{i+1} in one-based tenor notation.
    double fixing_time(int i) const { return alpha * i; }
    /// Last fixing date T_N; every product here matures there.
    double maturity() const { return alpha * (n - 1); }
};

inline Matrix build_correlation(double phi, int n) {
    if (!(phi > 0.0) || n < 2) throw ConfigError("correlation needs phi > 0 and N >= 2");
    Matrix rho(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rho(i, j) = std::exp(-phi * std::abs(i - j));
    return rho;
}

inline Matrix build_covariance(double vol, const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw DomainError("correlation matrix must be square");
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(rho(i, j) - rho(j, i)) > 1e-12)
                throw DomainError("correlation matrix is not symmetric");
    return vol * vol * rho;
}

/// Eigenvalues in descending order, eigenvectors as the matching columns of q.
struct Spectrum {
    Vector lambda;
    Matrix q;

    int size() const { return static_cast<int>(lambda.size()); }
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm drops
/// below 1e-14 of the matrix norm.
inline Spectrum eigendecompose(const Matrix& sigma, int max_sweeps = 100) {
    const Eigen::Index n = sigma.rows();
    if (n == 0 || sigma.cols() != n) throw DomainError("eigendecompose needs a square matrix");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(sigma(i, j) - sigma(j, i)) > 1e-12)
                throw DomainError("eigendecompose needs a symmetric matrix");

    Matrix a = sigma;
    Matrix v = Matrix::Identity(n, n);
    const double norm = std::max(sigma.norm(), std::numeric_limits<double>::min());
    const double tol = 1e-14 * norm;

    int sweep = 0;
    for (; sweep < max_sweeps && detail::off_diagonal_norm(a) > tol; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    const double residual = detail::off_diagonal_norm(a);
    if (residual > tol) {
        std::ostringstream msg;
        msg << "Jacobi eigensolver did not converge after " << sweep
            << " sweeps; off-diagonal norm " << residual << " vs tolerance " << tol;
        throw NumericalError(msg.str());
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

    Spectrum out;
    out.lambda.resize(n);
    out.q.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double l = a(order[k], order[k]);
        if (l < 0.0) {
            if (l < -1e-10 * norm) throw DomainError("matrix is not positive semi-definite");
            l = 0.0;
        }
        out.lambda(k) = l;
        Vector col = v.col(order[k]);
        Eigen::Index big = 0;
        col.cwiseAbs().maxCoeff(&big);
        if (col(big) < 0.0) col = -col;
        out.q.col(k) = col;
    }
    return out;
}

/// Drift of log-rates under the terminal measure, evaluated at the initial curve.
struct FrozenDrift {
    Vector mu;
};

inline FrozenDrift freeze_drift(const LmmConfig& cfg, const Matrix& rho) {
    cfg.validate();
    const int n = cfg.n;
    FrozenDrift d{Vector::Zero(n)};
    const double c2 = cfg.vol * cfg.vol;
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double al = cfg.alpha * cfg.initial_rates[static_cast<std::size_t>(j)];
            s += al / (1.0 + al) * c2 * rho(i, j);
        }
        d.mu(i) = -s;
    }
    return d;
}

/// z = Q^T ln L + beta(tau) with beta(tau) = -tau Q^T (c^2/2 - mu).
///
/// With this shift the frozen-drift log-rate dynamics become a driftless
/// Brownian motion with independent components of variance lambda_i.
class ZTransform {
public:
    ZTransform(Spectrum spectrum, FrozenDrift drift, double vol, double maturity)
        : spectrum_(std::move(spectrum)), drift_(std::move(drift)), vol_(vol), maturity_(maturity) {
        const Vector growth = Vector::Constant(drift_.mu.size(), 0.5 * vol_ * vol_) - drift_.mu;
        beta_rate_ = -(spectrum_.q.transpose() * growth);
    }

    const Spectrum& spectrum() const { return spectrum_; }
    const FrozenDrift& drift() const { return drift_; }
    double vol() const { return vol_; }
    double maturity() const { return maturity_; }
    int size() const { return spectrum_.size(); }

    /// d beta / d tau, constant in tau.
    const Vector& beta_rate() const { return beta_rate_; }
    Vector beta(double tau) const { return tau * beta_rate_; }

    Vector z_from_libor(const Vector& rates, double tau) const {
        check_tau(tau);
        if (rates.size() != size()) throw DomainError("rate vector has wrong length");
        Vector lg(rates.size());
        for (Eigen::Index i = 0; i < rates.size(); ++i) {
            if (!(rates(i) > 0.0)) throw DomainError("z_from_libor needs strictly positive rates");
            lg(i) = std::log(rates(i));
        }
        return spectrum_.q.transpose() * lg + beta(tau);
    }

    Vector log_libor_from_z(const Vector& z, double tau) const {
        check_tau(tau);
        return spectrum_.q * (z - beta(tau));
    }

    Vector libor_from_z(const Vector& z, double tau) const {
        return log_libor_from_z(z, tau).array().exp().matrix();
    }

private:
    void check_tau(double tau) const {
        if (tau < -1e-12 || tau > maturity_ + 1e-12)
            throw DomainError("time to maturity outside [0, T]");
    }

    Spectrum spectrum_;
    FrozenDrift drift_;
    double vol_;
    double maturity_;
    Vector beta_rate_;
};

/// Everything the pricers need about the market, built once and shared read-only.
struct LmmModel {
    LmmConfig config;
    Matrix rho;
    Matrix sigma;
    ZTransform transform;
    Vector anchor;  // z at t = 0 for the initial curve

    explicit LmmModel(const LmmConfig& cfg)
        : config(checked(cfg)),
          rho(build_correlation(cfg.phi, cfg.n)),
          sigma(build_covariance(cfg.vol, rho)),
          transform(eigendecompose(sigma), freeze_drift(cfg, rho), cfg.vol, cfg.maturity()),
          anchor(transform.z_from_libor(initial_rates(), cfg.maturity())) {}

    int n() const { return config.n; }
    double maturity() const { return config.maturity(); }
    const Spectrum& spectrum() const { return transform.spectrum(); }

    Vector initial_rates() const {
        return Eigen::Map<const Vector>(config.initial_rates.data(),
                                        static_cast<Eigen::Index>(config.initial_rates.size()));
    }

    /// P(0, T_{N+1}): converts terminal-bond units into units of P(T_1) = 1 at t = 0.
    double terminal_discount() const {
        double d = 1.0;
        for (double l : config.initial_rates) d /= 1.0 + config.alpha * l;
        return d;
    }

private:
    static const LmmConfig& checked(const LmmConfig& cfg) {
        cfg.validate();
        return cfg;
    }
};

}  // namespace anovapde
