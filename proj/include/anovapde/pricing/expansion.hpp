#pragma once

// PDE evaluation of expansion plans: every distinct lambda' is solved once,
// terms run in parallel, and the combination happens after all solves finish.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "anovapde/anova/combine.hpp"
#include "anovapde/anova/plan.hpp"
#include "anovapde/heatpde/solve_term.hpp"
#include "anovapde/parallel.hpp"

namespace anovapde {

struct PlanValues {
    std::vector<double> values;   // per plan pattern, in units of the T_1 bond (value 1 today)
    std::vector<double> seconds;  // wall time per pattern
    std::size_t strike_clamps = 0;
};

/// Solve every pattern of `plan` with the PDE engine. Patterns with more than two
/// active directions are rejected; use the Monte Carlo term estimator for those.
template <PdeProduct Product>
PlanValues evaluate_plan_pde(const LmmModel& model, const ExpansionPlan& plan, const Product& product,
                             const PdeConfig& cfg, int threads = 1) {
    if (plan.n() != model.n()) throw ConfigError("plan dimension does not match the model");
    if (plan.max_dimension() > 2)
        throw ConfigError("PDE terms need r + s <= 2; this plan has terms of dimension " +
                          std::to_string(plan.max_dimension()));
    const std::size_t count = plan.patterns().size();
    PlanValues out;
    out.values.assign(count, std::numeric_limits<double>::quiet_NaN());
    out.seconds.assign(count, 0.0);
    std::vector<std::size_t> clamps(count, 0);

    // most expensive (highest-dimensional) solves first so the tail is short
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return plan.patterns()[a].size() > plan.patterns()[b].size();
    });
    const double disc = model.terminal_discount();
    const Vector& lambda = model.spectrum().lambda;
    parallel_for(count, threads, [&](std::size_t k) {
        const std::size_t idx = order[k];
        const auto t0 = std::chrono::steady_clock::now();
        const TermResult r = solve_term(model, plan.lambda_prime(idx, lambda), product, cfg);
        out.values[idx] = r.value * disc;
        clamps[idx] = r.strike_clamps;
        out.seconds[idx] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    out.strike_clamps = std::accumulate(clamps.begin(), clamps.end(), std::size_t{0});
    return out;
}

/// First-order, first-eigenvalue expansion u^(1,1) and its partial sums over k.
struct FirstOrderResult {
    double value = 0.0;
    double base = 0.0;
    std::vector<double> corrections;  // u(lambda0 + lambda_i e_i), i = 2..N
    std::vector<double> profile;      // partial sums for k = 1..N
    double seconds = 0.0;
    std::size_t strike_clamps = 0;
};

template <PdeProduct Product>
FirstOrderResult price_first_order(const LmmModel& model, const Product& product, const PdeConfig& cfg,
                                   int threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    const ExpansionPlan plan(model.n(), 1, 1);
    const PlanValues pv = evaluate_plan_pde(model, plan, product, cfg, threads);
    FirstOrderResult res;
    res.base = pv.values[plan.base_pattern()];
    res.corrections.assign(static_cast<std::size_t>(model.n() - 1), 0.0);
    std::map<int, double> by_index;
    for (std::size_t idx = 0; idx < plan.patterns().size(); ++idx) {
        const Activation& a = plan.patterns()[idx];
        if (a.size() != 1) continue;
        const int i = a[0].first + 1;
        by_index[i] = pv.values[idx];
        res.corrections[static_cast<std::size_t>(i - 2)] = pv.values[idx];
    }
    res.value = first_order_combine(by_index, res.base, model.n());
    for (int k = 1; k <= model.n(); ++k) res.profile.push_back(partial_sum_profile(res.base, res.corrections, k));
    res.strike_clamps = pv.strike_clamps;
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// V_r00 ... V_rss from PDE solves (r + s <= 2).
template <PdeProduct Product>
VrstResult price_plan_pde(const LmmModel& model, const ExpansionPlan& plan, const Product& product,
                          const PdeConfig& cfg, int threads = 1) {
    return assemble_vrst(plan, evaluate_plan_pde(model, plan, product, cfg, threads).values);
}

/// Single full-lambda' solve (all of lambda switched on), for N <= 2 only.
template <PdeProduct Product>
double price_direct_pde(const LmmModel& model, const Product& product, const PdeConfig& cfg) {
    return solve_term(model, model.spectrum().lambda, product, cfg).value * model.terminal_discount();
}

}  // namespace anovapde
