#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "anovapde/anova/plan.hpp"
#include "anovapde/error.hpp"

namespace anovapde {

/// u^(1,1) = (2 - N) u(lambda0) + sum_{i=2..N} u(lambda0 + lambda_i e_i).
/// `values` is keyed by the one-based eigenvalue index i.
inline double first_order_combine(const std::map<int, double>& values, double base, int n) {
    if (n < 2) throw ConfigError("first_order_combine needs N >= 2");
    long double acc = static_cast<long double>(2 - n) * base;
    for (int i = 2; i <= n; ++i) {
        auto it = values.find(i);
        if (it == values.end())
            throw IncompletePlanError("first-order plan is missing the term for i = " + std::to_string(i));
        acc += it->second;
    }
    return static_cast<double>(acc);
}

/// Partial sums of the first-order expansion: only corrections i = 2..k.
/// corrections[i - 2] holds u(lambda0 + lambda_i e_i).
inline double partial_sum_profile(double base, const std::vector<double>& corrections, int k) {
    const int n = static_cast<int>(corrections.size()) + 1;
    if (k < 1 || k > n) throw ConfigError("partial sum index k must lie in [1, N]");
    long double acc = base;
    for (int i = 2; i <= k; ++i) acc += corrections[static_cast<std::size_t>(i - 2)] - base;
    return static_cast<double>(acc);
}

struct VrstResult {
    std::vector<double> level;          // V_r00, V_r11, ..., V_rss
    std::vector<double> running_total;  // sum_{i <= m} V_rii
    double total() const { return running_total.empty() ? 0.0 : running_total.back(); }
};

/// Values are indexed like plan.patterns(); NaN marks a term that was not solved.
inline VrstResult assemble_vrst(const ExpansionPlan& plan, const std::vector<double>& values) {
    if (values.size() != plan.patterns().size())
        throw IncompletePlanError("expected " + std::to_string(plan.patterns().size()) +
                                  " term values, got " + std::to_string(values.size()));
    VrstResult out;
    long double running = 0.0L;
    for (int m = 0; m <= plan.s(); ++m) {
        long double acc = 0.0L;
        for (auto [idx, w] : plan.level(m)) {
            const double v = values[idx];
            if (std::isnan(v))
                throw IncompletePlanError("no value for term " +
                                          format_activation(plan.patterns()[idx], plan.r()));
            acc += static_cast<long double>(w.num()) * v / static_cast<long double>(w.den());
        }
        running += acc;
        out.level.push_back(static_cast<double>(acc));
        out.running_total.push_back(static_cast<double>(running));
    }
    return out;
}

}  // namespace anovapde
