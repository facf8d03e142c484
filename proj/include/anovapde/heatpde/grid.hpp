#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/heatpde/axis_map.hpp"
#include "anovapde/model.hpp"

namespace anovapde {

struct PdeConfig {
    int points = 601;          // grid points per mapped axis
    int steps_per_alpha = 10;  // Crank-Nicolson steps between tenor dates
    double g_max = 1000.0;     // payoff cutoff
    double rate_lo = 0.02;     // rates mapped to y = 0.1 / 0.9 on the first axis
    double rate_hi = 0.5;

    void validate() const {
        if (points < 17) throw ConfigError("pde.J must be >= 17, got " + std::to_string(points));
        if (steps_per_alpha < 1) throw ConfigError("pde.M must be >= 1");
        if (!(g_max > 0.0)) throw ConfigError("pde.g_max must be > 0");
        if (!(rate_lo > 0.0 && rate_lo < rate_hi)) throw ConfigError("pde rate box needs 0 < L_lo < L_hi");
    }
};

/// Backward time grid: M steps per accrual period; tenor dates at multiples of M.
struct TimeGrid {
    int steps_per_alpha = 10;
    int intervals = 1;
    double alpha = 0.25;

    double dt() const { return alpha / steps_per_alpha; }
    int total_steps() const { return steps_per_alpha * intervals; }
    double tau(int step) const { return alpha * step / steps_per_alpha; }

    /// Step index of an event at backward time tau; it must sit on the grid.
    int event_step(double tau) const {
        const double x = tau / dt();
        const double r = std::round(x);
        if (std::abs(x - r) > 1e-9 || r < 0 || r > total_steps())
            throw ConfigError("event time " + std::to_string(tau) + " is not on the time grid");
        return static_cast<int>(r);
    }
};

/// Which z-directions diffuse in one term, their maps and node offsets from the anchor.
struct TermGeometry {
    std::vector<int> axes;
    std::vector<double> lambda;
    std::vector<AxisMap> maps;
    std::vector<std::vector<double>> dz;  // z_k - z0 per axis
    int points = 1;

    int dims() const { return static_cast<int>(axes.size()); }
    std::size_t n1() const { return dims() >= 1 ? static_cast<std::size_t>(points) : 1; }
    std::size_t n2() const { return dims() >= 2 ? static_cast<std::size_t>(points) : 1; }
    std::size_t nodes() const { return n1() * n2(); }

    static TermGeometry build(const LmmModel& model, const Vector& lambda_prime, const PdeConfig& cfg) {
        TermGeometry g;
        g.points = cfg.points;
        for (Eigen::Index i = 0; i < lambda_prime.size(); ++i) {
            if (lambda_prime(i) < 0.0) throw DomainError("negative eigenvalue in term");
            if (lambda_prime(i) > 0.0) g.axes.push_back(static_cast<int>(i));
        }
        if (g.dims() > 2)
            throw ConfigError("PDE terms support at most two active directions, got " +
                              std::to_string(g.dims()));
        for (int a : g.axes) {
            const double lam = lambda_prime(a);
            const AxisMap m = calibrate_axis_map(model.spectrum(), a, lam, model.anchor(a),
                                                 model.maturity(), cfg.rate_lo, cfg.rate_hi);
            std::vector<double> d(static_cast<std::size_t>(cfg.points));
            for (int k = 0; k < cfg.points; ++k)
                d[static_cast<std::size_t>(k)] = m.z(static_cast<double>(k) / (cfg.points - 1)) - model.anchor(a);
            g.lambda.push_back(lam);
            g.maps.push_back(m);
            g.dz.push_back(std::move(d));
        }
        return g;
    }
};

/// Log-rates at every grid node at one backward time. Inactive directions sit at the anchor.
class RateField {
public:
    static constexpr double kLogMin = -20.0;
    static constexpr double kLogMax = 8.0;

    RateField(const LmmModel& model, const TermGeometry& g, double tau, double payoff_cap)
        : n_(model.n()), n2_(g.n2()), nodes_(g.nodes()), cap_(payoff_cap), alpha_(model.config.alpha) {
        const Vector base = model.transform.log_libor_from_z(model.anchor, tau);
        base_.assign(base.data(), base.data() + base.size());
        const Matrix& q = model.spectrum().q;
        coef_.assign(2, std::vector<double>(static_cast<std::size_t>(n_), 0.0));
        dz_.assign(2, std::vector<double>(1, 0.0));
        for (int d = 0; d < g.dims(); ++d) {
            for (int m = 0; m < n_; ++m) coef_[d][static_cast<std::size_t>(m)] = q(m, g.axes[d]);
            dz_[d] = g.dz[static_cast<std::size_t>(d)];
        }
    }

    int rates() const { return n_; }
    std::size_t nodes() const { return nodes_; }
    double payoff_cap() const { return cap_; }
    double alpha() const { return alpha_; }

    double log_rate(std::size_t p, int m) const {
        const std::size_t i1 = p / n2_, i2 = p % n2_;
        const auto mi = static_cast<std::size_t>(m);
        const double x = base_[mi] + coef_[0][mi] * dz_[0][dz_[0].size() == 1 ? 0 : i1] +
                         coef_[1][mi] * dz_[1][dz_[1].size() == 1 ? 0 : i2];
        return std::clamp(x, kLogMin, kLogMax);
    }

    double rate(std::size_t p, int m) const { return std::exp(log_rate(p, m)); }

private:
    int n_;
    std::size_t n2_;
    std::size_t nodes_;
    double cap_;
    double alpha_;
    std::vector<double> base_;
    std::vector<std::vector<double>> coef_;
    std::vector<std::vector<double>> dz_;
};

/// Four-point Lagrange stencil on y_k = k/(n-1) around y.
struct CubicStencil {
    std::array<std::size_t, 4> idx{};
    std::array<double, 4> w{};
};

inline CubicStencil cubic_stencil(double y, std::size_t n) {
    if (n < 4) throw ConfigError("cubic interpolation needs at least 4 nodes");
    const double h = 1.0 / static_cast<double>(n - 1);
    auto k = static_cast<long>(std::floor(y / h)) - 1;
    k = std::clamp<long>(k, 0, static_cast<long>(n) - 4);
    CubicStencil s;
    for (int a = 0; a < 4; ++a) {
        s.idx[a] = static_cast<std::size_t>(k + a);
        const double ya = static_cast<double>(k + a) * h;
        double w = 1.0;
        for (int b = 0; b < 4; ++b) {
            if (b == a) continue;
            const double yb = static_cast<double>(k + b) * h;
            w *= (y - yb) / (ya - yb);
        }
        s.w[a] = w;
    }
    return s;
}

/// Value at (y1, y2) of a row-major n1 x n2 array (n2 == 1 for 1D, n1 == n2 == 1 for 0D).
inline double interpolate_cubic(const double* u, std::size_t n1, std::size_t n2, double y1, double y2) {
    if (n1 == 1 && n2 == 1) return u[0];
    if (n2 == 1) {
        const auto s = cubic_stencil(y1, n1);
        double v = 0.0;
        for (int a = 0; a < 4; ++a) v += s.w[a] * u[s.idx[a]];
        return v;
    }
    const auto s1 = cubic_stencil(y1, n1);
    const auto s2 = cubic_stencil(y2, n2);
    double v = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) v += s1.w[a] * s2.w[b] * u[s1.idx[a] * n2 + s2.idx[b]];
    return v;
}

}  // namespace anovapde
