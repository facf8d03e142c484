#pragma once

#include <string>
#include <vector>

#include "anovapde/anova/rational.hpp"
#include "anovapde/error.hpp"

namespace anovapde {

/// One-sided finite difference stencil in an eigenvalue direction.
///
/// Applied to u(0), u(lambda), u(2 lambda), u(3 lambda) it approximates the
/// Taylor term lambda^m u^(m)(0) / m! with error O(lambda^accuracy).
struct Stencil {
    int derivative = 0;
    int accuracy = 1;
    std::vector<int> nodes;  // multiples of the step
    std::vector<Rational> weights;

    /// Stencil applied to the monomial x^p with unit step: sum_k w_k n_k^p.
    Rational apply_monomial(int p) const {
        Rational s;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            std::int64_t np = 1;
            for (int e = 0; e < p; ++e) np *= nodes[k];
            s += weights[k] * Rational(np);
        }
        return s;
    }
};

/// Supported (derivative, accuracy) rows of the Lagrange stencil table.
inline const std::vector<std::pair<int, int>>& supported_stencils() {
    static const std::vector<std::pair<int, int>> rows{{0, 1}, {1, 2}, {1, 3}, {1, 4},
                                                       {2, 3}, {2, 4}, {3, 4}};
    return rows;
}

/// Rows are listed with nodes in the order 3, 2, 1, 0; entries absent from a row are skipped.
inline Stencil stencil_table(int derivative, int accuracy) {
    auto make = [&](std::vector<int> nodes, std::vector<Rational> w) {
        return Stencil{derivative, accuracy, std::move(nodes), std::move(w)};
    };
    if (derivative == 0) return make({0}, {Rational(1)});
    if (derivative == 1 && accuracy == 2) return make({1, 0}, {Rational(1), Rational(-1)});
    if (derivative == 1 && accuracy == 3)
        return make({2, 1, 0}, {Rational(-1, 2), Rational(4, 2), Rational(-3, 2)});
    if (derivative == 1 && accuracy == 4)
        return make({3, 2, 1, 0},
                    {Rational(2, 6), Rational(-9, 6), Rational(18, 6), Rational(-11, 6)});
    if (derivative == 2 && accuracy == 3)
        return make({2, 1, 0}, {Rational(1, 2), Rational(-2, 2), Rational(1, 2)});
    if (derivative == 2 && accuracy == 4)
        return make({3, 2, 1, 0},
                    {Rational(-1, 2), Rational(4, 2), Rational(-5, 2), Rational(2, 2)});
    if (derivative == 3 && accuracy == 4)
        return make({3, 2, 1, 0},
                    {Rational(1, 6), Rational(-3, 6), Rational(3, 6), Rational(-1, 6)});

    std::string supported;
    for (auto [m, a] : supported_stencils()) {
        if (!supported.empty()) supported += ", ";
        supported += "(" + std::to_string(m) + "," + (m == 0 ? std::string("-") : std::to_string(a)) + ")";
    }
    throw ConfigError("no stencil for derivative order " + std::to_string(derivative) +
                      " with accuracy " + std::to_string(accuracy) + "; supported: " + supported);
}

}  // namespace anovapde
