#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/heatpde/grid.hpp"
#include "anovapde/products/spline.hpp"

namespace anovapde {

struct RatchetCoefficients {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;

    bool is_identity() const { return a == 0.0 && b == 1.0 && c == 0.0; }
};

/// K_next = max(a L_prev + b K_prev + c, 0).
inline double ratchet_strike_update(double k_prev, double l_prev, const RatchetCoefficients& r) {
    return std::max(r.a * l_prev + r.b * k_prev + r.c, 0.0);
}

/// Floorlet fixing at tenor i and paying max(K - L_i, 0) one period later, valued at
/// T_i in terminal-bond units. `rates` holds L_i, ..., L_{N-1} at T_i.
inline double floorlet_payoff(double strike, std::span<const double> rates, double alpha) {
    const double pay = std::max(strike - rates[0], 0.0);
    if (pay == 0.0) return 0.0;
    double conv = 1.0;
    for (std::size_t k = 1; k < rates.size(); ++k) conv *= 1.0 + alpha * rates[k];
    return pay * conv;
}

/// Nodes of the strike axis: `counts[s]` equidistant nodes on each piece, shared ends merged.
struct StrikeAxis {
    std::vector<double> nodes;

    static StrikeAxis piecewise(const std::vector<double>& breaks, const std::vector<int>& counts) {
        if (breaks.size() != counts.size() + 1) throw ConfigError("strike axis: need one count per piece");
        StrikeAxis ax;
        for (std::size_t s = 0; s < counts.size(); ++s) {
            if (counts[s] < 2) throw ConfigError("strike axis: each piece needs >= 2 nodes");
            for (int k = (s == 0 ? 0 : 1); k < counts[s]; ++k)
                ax.nodes.push_back(breaks[s] + (breaks[s + 1] - breaks[s]) * k / (counts[s] - 1));
        }
        for (std::size_t k = 1; k < ax.nodes.size(); ++k)
            if (!(ax.nodes[k] > ax.nodes[k - 1])) throw ConfigError("strike axis must be increasing");
        return ax;
    }

    /// 21 / 41 / 21 nodes on [0, 0.05], [0.05, 0.15], [0.15, 0.5]: 81 in total.
    static StrikeAxis standard() { return piecewise({0.0, 0.05, 0.15, 0.5}, {21, 41, 21}); }

    double k_max() const { return nodes.back(); }
    std::size_t size() const { return nodes.size(); }
};

enum class FloorletSet { last, all };

class RatchetFloor {
public:
    /// With identity coefficients the strike never moves and a single strike slice is used
    /// unless `force_axis` is set.
    RatchetFloor(int n, double alpha, double k1, RatchetCoefficients coef,
                 FloorletSet set = FloorletSet::last, StrikeAxis axis = StrikeAxis::standard(),
                 bool force_axis = false)
        : n_(n), alpha_(alpha), k1_(k1), coef_(coef), set_(set), axis_(std::move(axis)),
          spline_(axis_.nodes) {
        if (n_ < 1) throw ConfigError("ratchet needs N >= 1");
        if (!(k1_ >= 0.0)) throw ConfigError("ratchet.K1 must be >= 0");
        if (k1_ > axis_.k_max()) throw ConfigError("ratchet.K1 exceeds the strike axis");
        collapsed_ = coef_.is_identity() && !force_axis;
    }

    int n() const { return n_; }
    double alpha() const { return alpha_; }
    double initial_strike() const { return k1_; }
    const RatchetCoefficients& coefficients() const { return coef_; }
    FloorletSet floorlets() const { return set_; }
    const StrikeAxis& axis() const { return axis_; }
    bool uses_strike_axis() const { return !collapsed_; }

    bool pays_at(int tenor) const { return set_ == FloorletSet::all || tenor == n_ - 1; }

    /// Path value in terminal-bond units given the rate vectors at each tenor date,
    /// i.e. rates_at(i)[m] = L_m(T_i).
    template <class RatesAt>
    double path_value(RatesAt&& rates_at, double cap) const {
        double k = k1_;
        double v = 0.0;
        for (int i = 0; i < n_; ++i) {
            std::span<const double> r = rates_at(i);
            if (pays_at(i)) v += std::min(floorlet_payoff(k, r.subspan(static_cast<std::size_t>(i)), alpha_), cap);
            if (i + 1 < n_) k = ratchet_strike_update(k, r[static_cast<std::size_t>(i)], coef_);
        }
        return v;
    }

    std::size_t strike_count() const { return collapsed_ ? 1 : axis_.size(); }

    /// Strike jump (tenors before the last) followed by the floorlet cash flow on the pre-jump strike.
    std::size_t pde_event(int tenor, const RateField& f, std::span<double> u) const {
        const std::size_t nodes = f.nodes();
        const std::size_t ns = strike_count();
        std::size_t clamps = 0;
        const bool jump = tenor < n_ - 1 && !collapsed_;
        const bool pay = pays_at(tenor);
        std::vector<double> y(ns), m2(ns), rates(static_cast<std::size_t>(n_ - tenor));
        for (std::size_t p = 0; p < nodes; ++p) {
            const double l = f.rate(p, tenor);
            if (jump) {
                for (std::size_t s = 0; s < ns; ++s) y[s] = u[s * nodes + p];
                spline_.second_derivatives(y.data(), m2.data());
                for (std::size_t s = 0; s < ns; ++s) {
                    double kn = ratchet_strike_update(axis_.nodes[s], l, coef_);
                    if (kn > axis_.k_max()) {
                        kn = axis_.k_max();
                        ++clamps;
                    }
                    u[s * nodes + p] = spline_.eval(y.data(), m2.data(), kn);
                }
            }
            if (pay) {
                rates[0] = l;
                if (set_ == FloorletSet::all)
                    for (int m = tenor + 1; m < n_; ++m) rates[static_cast<std::size_t>(m - tenor)] = f.rate(p, m);
                for (std::size_t s = 0; s < ns; ++s) {
                    const double k = collapsed_ ? k1_ : axis_.nodes[s];
                    u[s * nodes + p] += std::min(floorlet_payoff(k, rates, alpha_), f.payoff_cap());
                }
            }
        }
        return clamps;
    }

    double anchor_value(const std::vector<double>& v) const {
        if (collapsed_) return v.at(0);
        std::vector<double> m2(v.size());
        spline_.second_derivatives(v.data(), m2.data());
        return spline_.eval(v.data(), m2.data(), k1_);
    }

private:
    int n_;
    double alpha_;
    double k1_;
    RatchetCoefficients coef_;
    FloorletSet set_;
    StrikeAxis axis_;
    NaturalSpline spline_;
    bool collapsed_ = false;
};

}  // namespace anovapde
