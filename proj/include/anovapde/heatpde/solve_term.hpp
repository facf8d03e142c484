#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "anovapde/error.hpp"
#include "anovapde/heatpde/grid.hpp"
#include "anovapde/heatpde/stepper.hpp"
#include "anovapde/model.hpp"

namespace anovapde {

/// What the backward solver needs from a contract. Values live in `strike_count()`
/// slices of `field.nodes()` entries each; events return how many strike clamps they made.
template <class P>
concept PdeProduct = requires(const P& p, int tenor, const RateField& f, std::span<double> u,
                              const std::vector<double>& anchor_values) {
    { p.strike_count() } -> std::convertible_to<std::size_t>;
    { p.pde_event(tenor, f, u) } -> std::convertible_to<std::size_t>;
    { p.anchor_value(anchor_values) } -> std::convertible_to<double>;
};

/// Grid values after the backward sweep.
struct SolutionSurface {
    std::vector<double> values;  // slice-major: [strike][i1][i2]
    std::size_t n1 = 1, n2 = 1, slices = 1;
    double tau = 0.0;
    Vector lambda_prime;
};

struct TermResult {
    double value = 0.0;  // terminal-bond units at the anchor
    std::size_t strike_clamps = 0;
};

template <PdeProduct Product>
TermResult solve_term(const LmmModel& model, const Vector& lambda_prime, const Product& product,
                      const PdeConfig& cfg, SolutionSurface* keep = nullptr) {
    cfg.validate();
    const TermGeometry g = TermGeometry::build(model, lambda_prime, cfg);
    const TimeGrid tg{cfg.steps_per_alpha, model.n() - 1, model.config.alpha};
    const std::size_t nodes = g.nodes();
    const std::size_t slices = product.strike_count();

    std::optional<CnStepper1D> cn;
    std::optional<AdiStepper2D> adi;
    auto op_for = [&](int d) {
        auto c = transformed_coefficients(g.maps[static_cast<std::size_t>(d)],
                                          g.lambda[static_cast<std::size_t>(d)], g.points);
        return diffusion_operator(c.a, c.b);
    };
    if (g.dims() == 1) cn.emplace(op_for(0), tg.dt());
    if (g.dims() == 2) adi.emplace(op_for(0), op_for(1), tg.dt());

    std::vector<double> u(nodes * slices, 0.0);
    TermResult res;
    const int last = model.n() - 1;
    for (int tenor = last; tenor >= 0; --tenor) {
        if (tenor < last) {
            for (int k = 0; k < cfg.steps_per_alpha; ++k)
                for (std::size_t s = 0; s < slices; ++s) {
                    double* slice = u.data() + s * nodes;
                    if (cn) cn->step(slice);
                    if (adi) adi->step(slice);
                }
        }
        const double tau = tg.tau(tg.event_step(model.config.alpha * (last - tenor)));
        const RateField field(model, g, tau, cfg.g_max);
        res.strike_clamps += product.pde_event(tenor, field, std::span<double>(u));
    }

    std::vector<double> at_anchor(slices);
    for (std::size_t s = 0; s < slices; ++s)
        at_anchor[s] = interpolate_cubic(u.data() + s * nodes, g.n1(), g.n2(), 0.5, 0.5);
    res.value = product.anchor_value(at_anchor);
    if (!std::isfinite(res.value)) throw NumericalError("non-finite PDE value at the anchor");
    if (keep) {
        keep->values = std::move(u);
        keep->n1 = g.n1();
        keep->n2 = g.n2();
        keep->slices = slices;
        keep->tau = model.maturity();
        keep->lambda_prime = lambda_prime;
    }
    return res;
}

}  // namespace anovapde
