#pragma once

// Bermudan swaption benchmarks: an intrinsic-value threshold policy, the lower
// bound it implies on fresh paths, and the Andersen-Broadie duality gap.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "anovapde/mcbench/simulate.hpp"
#include "anovapde/mcbench/stats.hpp"
#include "anovapde/parallel.hpp"
#include "anovapde/products/bermudan.hpp"

namespace anovapde {

/// Exercise at date e iff intrinsic > 0 and intrinsic >= thresholds[e].
struct PolicyThresholds {
    std::vector<double> thresholds;  // terminal-bond units, one per exercise date
    long paths = 0;

    bool exercise(std::size_t e, double h) const { return h > 0.0 && h >= thresholds[e]; }
};

struct BoundEstimate {
    double lower = 0.0;
    double lower_se = 0.0;
    double gap = 0.0;  // Delta_0
    double gap_se = 0.0;
    long lower_paths = 0;
    long outer_paths = 0;
    long inner_paths = 0;

    double upper() const { return lower + gap; }
    double midpoint() const { return lower + 0.5 * gap; }
};

namespace detail {

/// Intrinsic value at every exercise date along one simulated path of rates.
inline void path_intrinsics(const BermudanSwaption& product, const double* rates, int n, double* h,
                            std::size_t first_date = 0) {
    const auto& dates = product.exercise_dates();
    for (std::size_t e = first_date; e < dates.size(); ++e) {
        const std::span<const double> r(rates + static_cast<std::size_t>(dates[e]) * n, static_cast<std::size_t>(n));
        h[e] = product.intrinsic(r, dates[e]);
    }
}

/// Stopped payoff of the policy over dates first..last, given intrinsics h.
inline double stopped_payoff(const PolicyThresholds& pol, const double* h, std::size_t first, std::size_t count) {
    for (std::size_t e = first; e < count; ++e)
        if (pol.exercise(e, h[e])) return h[e];
    return 0.0;
}

}  // namespace detail

/// Backward choice of thresholds on cfg.policy_paths (N_1) paths. At each date the
/// threshold maximizes the sample mean of the stopped payoff with later thresholds
/// fixed; the maximum is found exactly by sorting in-the-money paths by intrinsic value.
inline PolicyThresholds learn_policy(const LmmModel& model, const BermudanSwaption& product, const McConfig& cfg) {
    cfg.validate();
    if (product.n() != model.n()) throw ConfigError("swaption N does not match the model");
    const int n = model.n();
    const std::size_t ne = product.exercise_dates().size();
    const long np = cfg.policy_paths;
    std::vector<double> h(static_cast<std::size_t>(np) * ne);
    const long batches = (np + kBatchSize - 1) / kBatchSize;
    parallel_for(static_cast<std::size_t>(batches), cfg.threads, [&](std::size_t b) {
        LmmSimulator sim(model, cfg.substeps, cfg.mode);
        std::vector<double> rates(static_cast<std::size_t>(n) * n);
        const long first = static_cast<long>(b) * kBatchSize;
        const long last = std::min(np, first + kBatchSize);
        for (long p = first; p < last; ++p) {
            NormalStream main(cfg.seed, {kTagPolicy, static_cast<std::uint64_t>(p), 0});
            NormalStream sub(cfg.seed, {kTagPolicy, static_cast<std::uint64_t>(p), 1});
            sim.run(0, sim.initial_log_rates(), main, sub, rates.data(), product.exercise_dates().back());
            detail::path_intrinsics(product, rates.data(), n, h.data() + static_cast<std::size_t>(p) * ne);
        }
    });

    PolicyThresholds pol;
    pol.paths = np;
    pol.thresholds.assign(ne, 0.0);
    std::vector<double> v(static_cast<std::size_t>(np));  // payoff of the policy from the current date on
    for (long p = 0; p < np; ++p) v[static_cast<std::size_t>(p)] = h[static_cast<std::size_t>(p) * ne + ne - 1];

    std::vector<long> itm;
    for (std::size_t e = ne - 1; e-- > 0;) {
        itm.clear();
        for (long p = 0; p < np; ++p)
            if (h[static_cast<std::size_t>(p) * ne + e] > 0.0) itm.push_back(p);
        if (itm.empty()) {
            pol.thresholds[e] = std::numeric_limits<double>::infinity();
            continue;
        }
        auto hv = [&](long p) { return h[static_cast<std::size_t>(p) * ne + e]; };
        std::stable_sort(itm.begin(), itm.end(), [&](long a, long b) { return hv(a) > hv(b); });
        // exercising the k largest gains sum_{top k} (h - v); only cut between distinct values
        long double gain = 0.0L, best = 0.0L;
        std::size_t best_k = 0;
        for (std::size_t k = 0; k < itm.size(); ++k) {
            gain += hv(itm[k]) - v[static_cast<std::size_t>(itm[k])];
            const bool cut_ok = k + 1 == itm.size() || hv(itm[k + 1]) < hv(itm[k]);
            if (cut_ok && gain > best) {
                best = gain;
                best_k = k + 1;
            }
        }
        double thr;
        if (best_k == 0) thr = std::numeric_limits<double>::infinity();
        else if (best_k == itm.size()) thr = 0.0;
        else thr = 0.5 * (hv(itm[best_k - 1]) + hv(itm[best_k]));
        pol.thresholds[e] = thr;
        for (long p : itm)
            if (pol.exercise(e, hv(p))) v[static_cast<std::size_t>(p)] = hv(p);
    }
    return pol;
}

/// Mean stopped payoff on cfg.valuation_paths (N_2) fresh paths, in T_1-bond units.
inline PriceEstimate lower_bound(const LmmModel& model, const BermudanSwaption& product,
                                 const PolicyThresholds& pol, const McConfig& cfg) {
    cfg.validate();
    const int n = model.n();
    const std::size_t ne = product.exercise_dates().size();
    auto acc = run_batches(cfg.valuation_paths, cfg.threads, 1, [&](long first, long last, std::vector<Accumulator>& out) {
        LmmSimulator sim(model, cfg.substeps, cfg.mode);
        std::vector<double> rates(static_cast<std::size_t>(n) * n), h(ne);
        for (long p = first; p < last; ++p) {
            NormalStream main(cfg.seed, {kTagValuation, static_cast<std::uint64_t>(p), 0});
            NormalStream sub(cfg.seed, {kTagValuation, static_cast<std::uint64_t>(p), 1});
            sim.run(0, sim.initial_log_rates(), main, sub, rates.data(), product.exercise_dates().back());
            detail::path_intrinsics(product, rates.data(), n, h.data());
            out[0].add(detail::stopped_payoff(pol, h.data(), 0, ne));
        }
    });
    return to_estimate(acc[0], model.terminal_discount());
}

/// Andersen-Broadie duality gap Delta_0 from cfg.outer_paths outer paths with
/// cfg.inner_paths nested paths per exercise date. Returned in T_1-bond units.
inline PriceEstimate upper_bound(const LmmModel& model, const BermudanSwaption& product,
                                 const PolicyThresholds& pol, const McConfig& cfg) {
    cfg.validate();
    const int n = model.n();
    const auto& dates = product.exercise_dates();
    const std::size_t ne = dates.size();
    const int last_date = dates.back();
    auto acc = run_batches(cfg.outer_paths, cfg.threads, 1, [&](long first, long last, std::vector<Accumulator>& out) {
        LmmSimulator sim(model, cfg.substeps, cfg.mode);
        const std::size_t nn = static_cast<std::size_t>(n) * n;
        std::vector<double> logs(nn), rates(nn), inner_rates(nn), h(ne), hi(ne), q(ne, 0.0);
        for (long p = first; p < last; ++p) {
            const auto up = static_cast<std::uint64_t>(p);
            NormalStream main(cfg.seed, {kTagOuter, up, 0});
            NormalStream sub(cfg.seed, {kTagOuter, up, 1});
            sim.run_log(0, sim.initial_log_rates(), main, sub, logs.data(), last_date);
            for (int j = 0; j <= last_date; ++j)
                for (int m = 0; m < n; ++m) {
                    const std::size_t at = static_cast<std::size_t>(j) * n + m;
                    rates[at] = std::exp(logs[at]);
                }
            detail::path_intrinsics(product, rates.data(), n, h.data());

            // continuation value of the policy at each date except the last
            for (std::size_t k = 0; k + 1 < ne; ++k) {
                const Vector x0 = Eigen::Map<const Vector>(logs.data() + static_cast<std::size_t>(dates[k]) * n, n);
                long double s = 0.0L;
                for (long i = 0; i < cfg.inner_paths; ++i) {
                    const auto ui = static_cast<std::uint64_t>(i);
                    NormalStream im(cfg.seed, {kTagInner, up, k, ui, 0});
                    NormalStream is(cfg.seed, {kTagInner, up, k, ui, 1});
                    sim.run(dates[k], x0, im, is, inner_rates.data(), last_date);
                    detail::path_intrinsics(product, inner_rates.data(), n, hi.data(), k + 1);
                    s += detail::stopped_payoff(pol, hi.data(), k + 1, ne);
                }
                q[k] = static_cast<double>(s / cfg.inner_paths);
            }

            // policy value process and its martingale part
            auto value_at = [&](std::size_t k) {
                if (pol.exercise(k, h[k])) return h[k];
                return k + 1 < ne ? q[k] : 0.0;
            };
            double m = value_at(0);
            double worst = h[0] - m;
            for (std::size_t k = 1; k < ne; ++k) {
                m += value_at(k) - q[k - 1];
                worst = std::max(worst, h[k] - m);
            }
            out[0].add(worst);
        }
    });
    return to_estimate(acc[0], model.terminal_discount());
}

inline BoundEstimate bermudan_bounds(const LmmModel& model, const BermudanSwaption& product,
                                     const PolicyThresholds& pol, const McConfig& cfg) {
    const PriceEstimate lo = lower_bound(model, product, pol, cfg);
    const PriceEstimate gap = upper_bound(model, product, pol, cfg);
    BoundEstimate b;
    b.lower = lo.value;
    b.lower_se = lo.std_error;
    b.gap = gap.value;
    b.gap_se = gap.std_error;
    b.lower_paths = lo.paths;
    b.outer_paths = gap.paths;
    b.inner_paths = cfg.inner_paths;
    return b;
}

}  // namespace anovapde
