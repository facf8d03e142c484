#pragma once

// Monte Carlo values of u(lambda') for every pattern of an expansion plan, all
// driven by one shared set of Gaussian samples. The z-process is driftless with
// independent components, Z_i(t) = z0_i + sqrt(lambda'_i) W_i(t), so it is
// simulated exactly at tenor dates and log-rates follow from ln L = Q (Z - beta).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "anovapde/anova/combine.hpp"
#include "anovapde/anova/plan.hpp"
#include "anovapde/mcbench/simulate.hpp"
#include "anovapde/mcbench/stats.hpp"
#include "anovapde/products/ratchet.hpp"

namespace anovapde {

struct VrstEstimate {
    std::vector<PriceEstimate> terms;          // per plan pattern
    std::vector<PriceEstimate> level;          // V_r00 .. V_rss
    std::vector<PriceEstimate> running_total;  // sum_{i <= m} V_rii
    PriceEstimate full;                        // all eigenvalues switched on
    std::vector<PriceEstimate> error;          // running_total[m] - full, shared noise
    long paths = 0;
};

inline VrstEstimate mc_vrst(const LmmModel& model, const ExpansionPlan& plan, const RatchetFloor& product,
                            long paths, std::uint64_t seed, int threads = 1, double cap = 1000.0) {
    if (plan.n() != model.n() || product.n() != model.n()) throw ConfigError("plan/product N does not match the model");
    if (paths < 2) throw ConfigError("mc_vrst needs at least 2 paths");
    const int n = model.n();
    const auto nu = static_cast<std::size_t>(n);
    const double alpha = model.config.alpha;
    const double tmat = model.maturity();
    const Matrix& q = model.spectrum().q;
    const Vector& lambda = model.spectrum().lambda;
    const std::size_t np = plan.patterns().size();
    const int s = plan.s();

    // base log-rate L_m at tenor j when Z = z0: Q (z0 - beta(T - t_j))
    std::vector<double> base(nu * nu);
    for (int j = 0; j < n; ++j) {
        const Vector lg = model.transform.log_libor_from_z(model.anchor, tmat - alpha * j);
        for (int m = 0; m < n; ++m) base[static_cast<std::size_t>(j) * nu + m] = lg(m);
    }
    // per-pattern scale factor sqrt(multiple) on each coordinate (0 = frozen)
    std::vector<std::vector<double>> scale(np, std::vector<double>(nu, 0.0));
    for (std::size_t k = 0; k < np; ++k) {
        for (int i = 0; i < plan.r(); ++i) scale[k][static_cast<std::size_t>(i)] = 1.0;
        for (auto [c, mult] : plan.patterns()[k]) scale[k][static_cast<std::size_t>(c)] = std::sqrt(static_cast<double>(mult));
    }
    std::vector<std::vector<double>> wts(static_cast<std::size_t>(s) + 1, std::vector<double>(np, 0.0));
    for (int m = 0; m <= s; ++m)
        for (auto [idx, w] : plan.level(m)) wts[static_cast<std::size_t>(m)][idx] = w.to_double();

    // accumulator layout: terms | levels | running totals | full | errors
    const std::size_t nl = static_cast<std::size_t>(s) + 1;
    const std::size_t width = np + 3 * nl + 1;
    const bool all = product.floorlets() == FloorletSet::all;

    auto acc = run_batches(paths, threads, width, [&](long first, long last, std::vector<Accumulator>& out) {
        // g[(j * N + m) * N + i] = Q_mi sqrt(lambda_i) W_i(t_j)
        std::vector<double> w(nu * nu, 0.0), g(nu * nu * nu), xi(nu), rates(nu * nu), vals(np);
        auto path_value = [&](const std::vector<double>& sc) {
            for (int j = 0; j < n; ++j) {
                const int m_end = all ? n : j + 1;
                for (int m = j; m < m_end; ++m) {
                    const std::size_t at = static_cast<std::size_t>(j) * nu + m;
                    double x = base[at];
                    const double* gr = g.data() + at * nu;
                    for (int i = 0; i < n; ++i) x += sc[static_cast<std::size_t>(i)] * gr[i];
                    rates[at] = std::exp(std::clamp(x, -20.0, 8.0));
                }
            }
            return product.path_value(
                [&](int i) {
                    return std::span<const double>(rates.data() + static_cast<std::size_t>(i) * nu, nu);
                },
                cap);
        };
        std::vector<double> full_scale(nu, 1.0);
        for (long p = first; p < last; ++p) {
            NormalStream rng(seed, {kTagTerms, static_cast<std::uint64_t>(p)});
            for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.0;
            for (int j = 0; j < n; ++j) {
                if (j > 0) {
                    rng.fill(xi.data(), nu);
                    for (int i = 0; i < n; ++i)
                        w[static_cast<std::size_t>(j) * nu + i] =
                            w[static_cast<std::size_t>(j - 1) * nu + i] + std::sqrt(alpha) * xi[static_cast<std::size_t>(i)];
                }
                for (int m = j; m < (all ? n : j + 1); ++m)
                    for (int i = 0; i < n; ++i)
                        g[(static_cast<std::size_t>(j) * nu + m) * nu + i] =
                            q(m, i) * std::sqrt(lambda(i)) * w[static_cast<std::size_t>(j) * nu + i];
            }
            for (std::size_t k = 0; k < np; ++k) {
                vals[k] = path_value(scale[k]);
                out[k].add(vals[k]);
            }
            const double vf = path_value(full_scale);
            long double run = 0.0L;
            for (std::size_t m = 0; m < nl; ++m) {
                long double lv = 0.0L;
                for (std::size_t k = 0; k < np; ++k) lv += wts[m][k] * vals[k];
                run += lv;
                out[np + m].add(static_cast<double>(lv));
                out[np + nl + m].add(static_cast<double>(run));
                out[np + 2 * nl + 1 + m].add(static_cast<double>(run - vf));
            }
            out[np + 2 * nl].add(vf);
        }
    });

    const double disc = model.terminal_discount();
    VrstEstimate r;
    r.paths = paths;
    for (std::size_t k = 0; k < np; ++k) r.terms.push_back(to_estimate(acc[k], disc));
    for (std::size_t m = 0; m < nl; ++m) {
        r.level.push_back(to_estimate(acc[np + m], disc));
        r.running_total.push_back(to_estimate(acc[np + nl + m], disc));
        r.error.push_back(to_estimate(acc[np + 2 * nl + 1 + m], disc));
    }
    r.full = to_estimate(acc[np + 2 * nl], disc);
    return r;
}

}  // namespace anovapde
