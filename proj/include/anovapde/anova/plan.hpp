#pragma once

// Expansion of the value function in the small eigenvalues around
// lambda0 = (lambda_1, ..., lambda_r, 0, ..., 0). Every Taylor term is
// replaced by a tensor-product finite difference in eigenvalue space, so the
// whole approximation becomes a weighted sum of values u(lambda') where
// lambda' has at most r + s non-zero entries.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "anovapde/anova/rational.hpp"
#include "anovapde/anova/stencil.hpp"
#include "anovapde/error.hpp"
#include "anovapde/model.hpp"

namespace anovapde {

/// Sparse exponent vector omega: (coordinate, power) pairs, coordinates ascending.
struct MultiIndex {
    std::vector<std::pair<int, int>> entries;

    int degree() const {
        int d = 0;
        for (auto [c, p] : entries) d += p;
        return d;
    }
};

/// All multi-indices of total degree s over the 0-based coordinates first..n-1.
/// Degree 0 yields the single empty index (the base term).
inline std::vector<MultiIndex> enumerate_terms(int n, int first, int s) {
    if (first < 0 || first >= n) throw ConfigError("enumerate_terms: need 0 <= r < N");
    if (s < 0 || s > n - first) throw ConfigError("enumerate_terms: need 0 <= s <= N - r");
    std::vector<MultiIndex> out;
    MultiIndex cur;
    auto rec = [&](auto&& self, int coord, int remaining) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int c = coord; c < n; ++c) {
            for (int p = remaining; p >= 1; --p) {
                cur.entries.emplace_back(c, p);
                self(self, c + 1, remaining - p);
                cur.entries.pop_back();
            }
        }
    };
    rec(rec, first, s);
    return out;
}

/// Which non-leading eigenvalues are switched on, and by which multiple of
/// their own value: sorted (coordinate, multiple >= 1) pairs.
using Activation = std::vector<std::pair<int, int>>;

inline std::string format_activation(const Activation& a, int r) {
    std::ostringstream os;
    os << "lambda_1";
    if (r > 1) os << "..lambda_" << r;
    for (auto [c, m] : a) {
        os << " + ";
        if (m != 1) os << m << "*";
        os << "lambda_" << (c + 1) << "e_" << (c + 1);
    }
    return os.str();
}

/// One low-dimensional solve and its aggregated weight in a given level.
struct TermSpec {
    int level = 0;
    Activation activation;
    Rational weight;
    int dimension = 0;  // number of non-zero entries of lambda'
};

class ExpansionPlan {
public:
    /// stencil_order == 0 picks accuracy m + 1 for level m; otherwise every
    /// level m >= 1 uses accuracy stencil_order + 1.
    ExpansionPlan(int n, int r, int s, int stencil_order = 0) : n_(n), r_(r), s_(s), t_(stencil_order) {
        if (r < 1 || r >= n) throw ConfigError("plan needs 1 <= r < N");
        if (s < 0 || s > n - r) throw ConfigError("plan needs 0 <= s <= N - r");
        if (stencil_order != 0 && stencil_order < s)
            throw ConfigError("stencil order t must be >= s");
        base_ = intern({});
        levels_.resize(static_cast<std::size_t>(s) + 1);
        for (int m = 0; m <= s; ++m) build_level(m);
    }

    int n() const { return n_; }
    int r() const { return r_; }
    int s() const { return s_; }
    int stencil_order() const { return t_; }
    int accuracy_for_level(int m) const { return m == 0 ? 1 : (t_ == 0 ? m : t_) + 1; }

    const std::vector<Activation>& patterns() const { return patterns_; }
    std::size_t base_pattern() const { return base_; }

    /// Aggregated exact weights of level m, keyed by pattern index.
    const std::vector<std::pair<std::size_t, Rational>>& level(int m) const {
        return levels_.at(static_cast<std::size_t>(m));
    }

    std::vector<TermSpec> terms() const {
        std::vector<TermSpec> out;
        for (int m = 0; m <= s_; ++m)
            for (auto [idx, w] : level(m))
                out.push_back(TermSpec{m, patterns_[idx], w,
                                       r_ + static_cast<int>(patterns_[idx].size())});
        return out;
    }

    /// lambda' for pattern idx; leading r eigenvalues always switched on.
    Vector lambda_prime(std::size_t idx, const Vector& lambda) const {
        Vector lp = Vector::Zero(lambda.size());
        for (int i = 0; i < r_; ++i) lp(i) = lambda(i);
        for (auto [c, m] : patterns_.at(idx)) lp(c) = m * lambda(c);
        return lp;
    }

    int max_dimension() const {
        int d = 0;
        for (const auto& p : patterns_) d = std::max(d, r_ + static_cast<int>(p.size()));
        return d;
    }

    /// Exact weight of every pattern in the running total sum_{m <= upto} V_m.
    std::vector<Rational> cumulative_weights(int upto) const {
        std::vector<Rational> w(patterns_.size());
        for (int m = 0; m <= upto; ++m)
            for (auto [idx, x] : level(m)) w[idx] += x;
        return w;
    }

private:
    std::size_t intern(const Activation& a) {
        auto it = index_.find(a);
        if (it != index_.end()) return it->second;
        patterns_.push_back(a);
        index_.emplace(a, patterns_.size() - 1);
        return patterns_.size() - 1;
    }

    void build_level(int m) {
        std::map<std::size_t, Rational> acc;
        const int accuracy = accuracy_for_level(m);
        for (const MultiIndex& omega : enumerate_terms(n_, r_, m)) {
            std::vector<Stencil> factors;
            for (auto [c, p] : omega.entries) factors.push_back(stencil_table(p, accuracy));
            // tensor product over node choices
            std::vector<std::size_t> pick(factors.size(), 0);
            while (true) {
                Rational w(1);
                Activation a;
                for (std::size_t f = 0; f < factors.size(); ++f) {
                    w *= factors[f].weights[pick[f]];
                    const int node = factors[f].nodes[pick[f]];
                    if (node > 0) a.emplace_back(omega.entries[f].first, node);
                }
                acc[intern(a)] += w;
                std::size_t f = 0;
                while (f < factors.size() && ++pick[f] == factors[f].nodes.size()) pick[f++] = 0;
                if (f == factors.size()) break;
            }
        }
        auto& lv = levels_[static_cast<std::size_t>(m)];
        for (auto [idx, w] : acc)
            if (!w.is_zero()) lv.emplace_back(idx, w);
    }

    int n_, r_, s_, t_;
    std::vector<Activation> patterns_;
    std::map<Activation, std::size_t> index_;
    std::size_t base_ = 0;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> levels_;
};

}  // namespace anovapde
