#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/mcbench/rng.hpp"
#include "anovapde/model.hpp"

namespace anovapde {

enum class DriftMode { full, frozen };

inline DriftMode parse_drift_mode(const std::string& s) {
    if (s == "full") return DriftMode::full;
    if (s == "frozen") return DriftMode::frozen;
    throw ConfigError("mc.mode must be 'full' or 'frozen', got '" + s + "'");
}

inline const char* to_string(DriftMode m) { return m == DriftMode::full ? "full" : "frozen"; }

struct McConfig {
    long policy_paths = 1000000;     // N_1
    long valuation_paths = 10000000; // N_2
    long outer_paths = 5000;
    long inner_paths = 1000;
    int substeps = 5;                // M_MC per accrual period
    DriftMode mode = DriftMode::full;
    std::uint64_t seed = 20100101;
    int threads = 1;

    void validate() const {
        if (policy_paths < 1 || valuation_paths < 1 || outer_paths < 1 || inner_paths < 1)
            throw ConfigError("mc path counts must be >= 1");
        if (substeps < 1) throw ConfigError("mc.M must be >= 1");
    }
};

/// Stream tags: every random number is keyed by (seed, tag, path, ...).
enum StreamTag : std::uint64_t {
    kTagPolicy = 1,
    kTagValuation = 2,
    kTagOuter = 3,
    kTagInner = 4,
    kTagPricing = 5,
    kTagTerms = 6,
};

/// Log-Euler stepping of all N log-rates under the terminal measure.
///
/// Each accrual period consumes one N-vector of normals from the main stream for
/// the total Brownian increment; the sub-steps are filled in from a second stream
/// so that their sum reproduces that increment. With frozen drift the sub-steps
/// add up to a single exact step, which is taken directly, so results do not
/// depend on the sub-step count.
class LmmSimulator {
public:
    LmmSimulator(const LmmModel& model, int substeps, DriftMode mode)
        : n_(model.n()), alpha_(model.config.alpha), vol_(model.config.vol), substeps_(substeps),
          mode_(mode), rho_(model.rho), frozen_mu_(model.transform.drift().mu) {
        if (substeps < 1) throw ConfigError("substeps must be >= 1");
        Eigen::LLT<Matrix> llt(model.rho);
        if (llt.info() != Eigen::Success) throw NumericalError("correlation matrix is not positive definite");
        chol_ = llt.matrixL();
        initial_log_.resize(n_);
        for (int i = 0; i < n_; ++i) initial_log_(i) = std::log(model.config.initial_rates[static_cast<std::size_t>(i)]);
        xi_.resize(n_);
        eta_.resize(static_cast<Eigen::Index>(n_) * substeps_);
        inc_.resize(n_);
        drift_.resize(n_);
        mean_.resize(n_);
        w_.resize(n_);
        dw_.resize(n_);
    }

    int n() const { return n_; }
    int substeps() const { return substeps_; }
    const Vector& initial_log_rates() const { return initial_log_; }

    /// Advance log-rates `x` by one accrual period.
    void step_period(Vector& x, NormalStream& main, NormalStream& sub) {
        main.fill(xi_.data(), static_cast<std::size_t>(n_));
        if (mode_ == DriftMode::frozen) {
            // constant drift: the sub-steps telescope to one exact lognormal step
            inc_.noalias() = chol_.triangularView<Eigen::Lower>() * xi_;
            x += (frozen_mu_.array() - 0.5 * vol_ * vol_).matrix() * alpha_ + vol_ * std::sqrt(alpha_) * inc_;
            return;
        }
        const double dt = alpha_ / substeps_;
        const double sq_dt = std::sqrt(dt);
        const double sq_alpha = std::sqrt(alpha_);
        if (substeps_ > 1) sub.fill(eta_.data(), static_cast<std::size_t>(eta_.size()));
        mean_.setZero();
        if (substeps_ > 1) {
            for (int k = 0; k < substeps_; ++k) mean_ += eta_.segment(static_cast<Eigen::Index>(k) * n_, n_);
            mean_ /= substeps_;
        }
        for (int k = 0; k < substeps_; ++k) {
            // independent N(0, dt) increments summing to sqrt(alpha) xi
            w_ = sq_alpha / substeps_ * xi_;
            if (substeps_ > 1) w_ += sq_dt * (eta_.segment(static_cast<Eigen::Index>(k) * n_, n_) - mean_);
            inc_.noalias() = chol_.triangularView<Eigen::Lower>() * w_;
            drift(x);
            x += (drift_.array() - 0.5 * vol_ * vol_).matrix() * dt + vol_ * inc_;
        }
    }

    /// Simulate from tenor `start` (log-rates `x0` there) up to tenor `end` (default: the
    /// last) and write rates L_m(T_j) into out[j * N + m] for j = start..end.
    void run(int start, const Vector& x0, NormalStream& main, NormalStream& sub, double* out, int end = -1) {
        if (end < 0) end = n_ - 1;
        Vector x = x0;
        write(x, out + static_cast<std::size_t>(start) * n_);
        for (int j = start + 1; j <= end; ++j) {
            step_period(x, main, sub);
            write(x, out + static_cast<std::size_t>(j) * n_);
        }
    }

    /// Log-rates at every tenor date, in the same layout as `run`.
    void run_log(int start, const Vector& x0, NormalStream& main, NormalStream& sub, double* out, int end = -1) {
        if (end < 0) end = n_ - 1;
        Vector x = x0;
        for (int m = 0; m < n_; ++m) out[static_cast<std::size_t>(start) * n_ + m] = x(m);
        for (int j = start + 1; j <= end; ++j) {
            step_period(x, main, sub);
            for (int m = 0; m < n_; ++m) out[static_cast<std::size_t>(j) * n_ + m] = x(m);
        }
    }

private:
    void write(const Vector& x, double* dst) const {
        for (int m = 0; m < n_; ++m) dst[m] = std::exp(x(m));
    }

    /// mu_i = -sum_{j>i} alpha L_j / (1 + alpha L_j) c^2 rho_ij, evaluated at x or frozen.
    void drift(const Vector& x) {
        if (mode_ == DriftMode::frozen) {
            drift_ = frozen_mu_;
            return;
        }
        const double c2 = vol_ * vol_;
        for (int j = 0; j < n_; ++j) {
            const double al = alpha_ * std::exp(x(j));
            dw_(j) = al / (1.0 + al) * c2;
        }
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = i + 1; j < n_; ++j) s += dw_(j) * rho_(i, j);
            drift_(i) = -s;
        }
    }

    int n_;
    double alpha_;
    double vol_;
    int substeps_;
    DriftMode mode_;
    Matrix rho_;
    Matrix chol_;
    Vector frozen_mu_;
    Vector initial_log_;
    Vector xi_, eta_, inc_, drift_, mean_, w_, dw_;
};

}  // namespace anovapde
