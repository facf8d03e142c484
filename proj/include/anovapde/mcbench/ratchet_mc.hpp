#pragma once

#include <span>
#include <vector>

#include "anovapde/mcbench/simulate.hpp"
#include "anovapde/mcbench/stats.hpp"
#include "anovapde/products/ratchet.hpp"

namespace anovapde {

/// Plain Monte Carlo for the ratchet floor over cfg.policy_paths (N_1) paths.
/// Values are in units of the T_1 bond, like the PDE results.
inline PriceEstimate mc_price_ratchet(const LmmModel& model, const RatchetFloor& product, const McConfig& cfg,
                                      double cap = 1000.0) {
    cfg.validate();
    if (product.n() != model.n()) throw ConfigError("ratchet N does not match the model");
    const int n = model.n();
    auto acc = run_batches(cfg.policy_paths, cfg.threads, 1, [&](long first, long last, std::vector<Accumulator>& out) {
        LmmSimulator sim(model, cfg.substeps, cfg.mode);
        std::vector<double> rates(static_cast<std::size_t>(n) * n);
        for (long p = first; p < last; ++p) {
            NormalStream main(cfg.seed, {kTagPricing, static_cast<std::uint64_t>(p), 0});
            NormalStream sub(cfg.seed, {kTagPricing, static_cast<std::uint64_t>(p), 1});
            sim.run(0, sim.initial_log_rates(), main, sub, rates.data());
            const double v = product.path_value(
                [&](int i) {
                    return std::span<const double>(rates.data() + static_cast<std::size_t>(i) * n,
                                                   static_cast<std::size_t>(n));
                },
                cap);
            out[0].add(v);
        }
    });
    return to_estimate(acc[0], model.terminal_discount());
}

}  // namespace anovapde
