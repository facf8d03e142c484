#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/heatpde/grid.hpp"

namespace anovapde {

/// Payer swap value when exercised at tenor i (0-based), in terminal-bond units:
/// alpha * max(sum_{j >= i} (L_j - K) prod_{k > j} (1 + alpha L_k), 0).
/// `rates` holds L_i, ..., L_{N-1}.
inline double swaption_intrinsic(std::span<const double> rates, double strike, double alpha) {
    if (rates.empty()) return 0.0;
    double acc = rates[0] - strike;
    for (std::size_t j = 1; j < rates.size(); ++j) acc = acc * (1.0 + alpha * rates[j]) + (rates[j] - strike);
    return alpha * std::max(acc, 0.0);
}

/// Exercise dates as 0-based tenor indices: every `period` tenors starting at T_1; `with_last` also appends the final tenor T_N.
inline std::vector<int> periodic_schedule(int n, int period, bool with_last) {
    if (n < 1 || period < 1) throw ConfigError("schedule needs N >= 1 and period >= 1");
    std::vector<int> out;
    for (int i = 0; i < n; i += period) out.push_back(i);
    if (with_last && out.back() != n - 1) out.push_back(n - 1);
    return out;
}

class BermudanSwaption {
public:
    BermudanSwaption(int n, double alpha, double strike, std::vector<int> exercise)
        : n_(n), alpha_(alpha), strike_(strike), exercise_(std::move(exercise)) {
        if (exercise_.empty()) throw ConfigError("bermudan schedule is empty");
        std::sort(exercise_.begin(), exercise_.end());
        exercise_.erase(std::unique(exercise_.begin(), exercise_.end()), exercise_.end());
        if (exercise_.front() < 0 || exercise_.back() >= n_)
            throw ConfigError("exercise dates must be tenor indices in [1, N]");
        flag_.assign(static_cast<std::size_t>(n_), false);
        for (int e : exercise_) flag_[static_cast<std::size_t>(e)] = true;
    }

    int n() const { return n_; }
    double alpha() const { return alpha_; }
    double strike() const { return strike_; }
    const std::vector<int>& exercise_dates() const { return exercise_; }
    bool is_exercise(int tenor) const { return flag_[static_cast<std::size_t>(tenor)]; }

    /// Intrinsic value at tenor i from the full rate vector L_0..L_{N-1}.
    double intrinsic(std::span<const double> all_rates, int tenor) const {
        return swaption_intrinsic(all_rates.subspan(static_cast<std::size_t>(tenor)), strike_, alpha_);
    }

    std::size_t strike_count() const { return 1; }

    /// Pointwise max of continuation and (capped) intrinsic on the grid.
    std::size_t pde_event(int tenor, const RateField& f, std::span<double> u) const {
        if (!is_exercise(tenor)) return 0;
        std::vector<double> rates(static_cast<std::size_t>(n_ - tenor));
        for (std::size_t p = 0; p < f.nodes(); ++p) {
            for (int m = tenor; m < n_; ++m) rates[static_cast<std::size_t>(m - tenor)] = f.rate(p, m);
            const double h = std::min(swaption_intrinsic(rates, strike_, alpha_), f.payoff_cap());
            u[p] = std::max(u[p], h);
        }
        return 0;
    }

    double anchor_value(const std::vector<double>& v) const { return v.at(0); }

private:
    int n_;
    double alpha_;
    double strike_;
    std::vector<int> exercise_;
    std::vector<bool> flag_;
};

/// Apply the exercise condition to arbitrary arrays of continuation and intrinsic values.
inline void bermudan_event(std::span<double> continuation, std::span<const double> intrinsic) {
    if (continuation.size() != intrinsic.size()) throw ConfigError("bermudan_event: size mismatch");
    for (std::size_t k = 0; k < continuation.size(); ++k)
        continuation[k] = std::max(continuation[k], intrinsic[k]);
}

}  // namespace anovapde
