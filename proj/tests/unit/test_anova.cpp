#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "anovapde/anova/combine.hpp"
#include "anovapde/anova/plan.hpp"

using namespace anovapde;

namespace {

long binomial(int n, int k) {
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Sum over all levels of the plan applied to f on the given eigenvalues.
double apply_plan(const ExpansionPlan& plan, const Vector& lambda, const std::function<double(const Vector&)>& f) {
    std::vector<double> v(plan.patterns().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(plan.lambda_prime(k, lambda));
    return assemble_vrst(plan, v).total();
}

Vector test_lambda(int n) {
    Vector l(n);
    for (int i = 0; i < n; ++i) l(i) = 1.0 / (1.0 + i * i);
    return l;
}

}  // namespace

TEST(Rational, Arithmetic) {
    EXPECT_EQ(Rational(2, 4), Rational(1, 2));
    EXPECT_EQ(Rational(1, -3), Rational(-1, 3));
    EXPECT_EQ(Rational(1, 2) + Rational(1, 3), Rational(5, 6));
    EXPECT_EQ(Rational(1, 2) - Rational(1, 2), Rational(0));
    EXPECT_EQ(Rational(-2, 3) * Rational(9, 4), Rational(-3, 2));
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Stencil, ExactOnMonomialsBelowAccuracy) {
    // applied to x^p with unit step a row must give the Taylor coefficient: 1 if p == m else 0
    for (auto [m, acc] : supported_stencils()) {
        const Stencil st = stencil_table(m, acc);
        for (int p = 0; p < std::max(acc, 1); ++p)
            EXPECT_EQ(st.apply_monomial(p), Rational(p == m ? 1 : 0)) << "m=" << m << " acc=" << acc << " p=" << p;
    }
}

TEST(Stencil, FirstNeglectedMonomialIsNotExact) {
    for (auto [m, acc] : supported_stencils()) {
        if (m == 0) continue;
        const Stencil st = stencil_table(m, acc);
        EXPECT_NE(st.apply_monomial(acc), Rational(0)) << "m=" << m << " acc=" << acc;
    }
}

TEST(Stencil, KnownRows) {
    const Stencil d1 = stencil_table(1, 3);
    ASSERT_EQ(d1.nodes.size(), 3u);
    EXPECT_EQ(d1.weights[0], Rational(-1, 2));
    EXPECT_EQ(d1.weights[1], Rational(2));
    EXPECT_EQ(d1.weights[2], Rational(-3, 2));
    const Stencil d3 = stencil_table(3, 4);
    EXPECT_EQ(d3.weights[0], Rational(1, 6));
    EXPECT_EQ(d3.weights[3], Rational(-1, 6));
}

TEST(Stencil, UnsupportedRowListsAlternatives) {
    try {
        stencil_table(3, 3);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("(3,4)"), std::string::npos);
    }
    EXPECT_THROW(stencil_table(4, 5), ConfigError);
}

TEST(Enumerate, CountsMatchBinomial) {
    for (int n : {3, 5, 11}) {
        for (int r = 1; r < n; ++r) {
            for (int s = 0; s <= std::min(3, n - r); ++s) {
                const auto terms = enumerate_terms(n, r, s);
                EXPECT_EQ(static_cast<long>(terms.size()), binomial(n - r + s - 1, s)) << n << " " << r << " " << s;
                for (const auto& t : terms) {
                    EXPECT_EQ(t.degree(), s);
                    for (auto [c, p] : t.entries) EXPECT_GE(c, r);
                }
            }
        }
    }
    EXPECT_THROW(enumerate_terms(5, 5, 1), ConfigError);
    EXPECT_THROW(enumerate_terms(5, 2, 4), ConfigError);
}

TEST(Plan, LevelWeightsSumToZero) {
    for (auto [r, s, t] : {std::tuple{1, 1, 0}, {1, 2, 0}, {1, 3, 0}, {2, 2, 0}, {1, 2, 2}, {1, 2, 3}}) {
        const ExpansionPlan plan(8, r, s, t);
        ASSERT_EQ(plan.level(0).size(), 1u);
        EXPECT_EQ(plan.level(0)[0].second, Rational(1));
        EXPECT_EQ(plan.level(0)[0].first, plan.base_pattern());
        for (int m = 1; m <= s; ++m) {
            Rational sum;
            for (auto [idx, w] : plan.level(m)) sum += w;
            EXPECT_EQ(sum, Rational(0)) << "r=" << r << " s=" << s << " t=" << t << " m=" << m;
        }
    }
}

TEST(Plan, FirstOrderPatterns) {
    const ExpansionPlan plan(6, 1, 1);
    EXPECT_EQ(plan.patterns().size(), 6u);  // base + one per non-leading eigenvalue
    EXPECT_EQ(plan.max_dimension(), 2);
    EXPECT_EQ(plan.level(1).size(), 6u);  // u_i - base summed: base carries -(N - 1)
    for (auto [idx, w] : plan.level(1)) EXPECT_EQ(w, idx == plan.base_pattern() ? Rational(-5) : Rational(1));
    const auto cum = plan.cumulative_weights(1);
    EXPECT_EQ(cum[plan.base_pattern()], Rational(-4));
}

TEST(Plan, FirstOrderExactOnAdditiveFunctions) {
    const int n = 7;
    const ExpansionPlan plan(n, 1, 1);
    auto f = [](const Vector& l) {
        double v = std::exp(l(0));
        for (Eigen::Index i = 1; i < l.size(); ++i) v += std::sin(3.0 * l(i) + i) - std::sin(static_cast<double>(i));
        return v;
    };
    const Vector lam = test_lambda(n);
    EXPECT_NEAR(apply_plan(plan, lam, f), f(lam), 1e-13);
}

TEST(Plan, FirstOrderMissesInteractions) {
    const ExpansionPlan plan(4, 1, 1);
    auto f = [](const Vector& l) { return l(1) * l(2); };
    const Vector lam = test_lambda(4);
    EXPECT_NEAR(apply_plan(plan, lam, f), 0.0, 1e-15);
    EXPECT_GT(f(lam), 0.01);
}

TEST(Plan, SecondOrderWithAccurateStencilsExactOnQuadratics) {
    const int n = 6;
    const Vector lam = test_lambda(n);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = 0.3 + 0.1 * (i + 1) * (j + 2) + (i == j ? 1.0 : 0.0);
    a = (a + a.transpose()).eval();
    auto f = [&](const Vector& l) { return 1.0 + std::exp(l(0)) * l.sum() + l.dot(a * l); };
    const ExpansionPlan exact(n, 1, 2, 2);
    EXPECT_NEAR(apply_plan(exact, lam, f), f(lam), 1e-12);
    // default stencil orders (accuracy m + 1) leave an O(lambda^2) error on the first level
    const ExpansionPlan coarse(n, 1, 2, 0);
    EXPECT_GT(std::abs(apply_plan(coarse, lam, f) - f(lam)), 1e-4);
}

TEST(Plan, ThirdOrderExactOnCubics) {
    const int n = 5;
    const Vector lam = test_lambda(n);
    auto f = [](const Vector& l) {
        double v = 0.0;
        for (int i = 1; i < 5; ++i) v += l(i) * l(i) * l(i) * i + l(i) * l(i);
        return v + l(1) * l(2) * l(3) + l(1) * l(1) * l(4) + 2.0 * l(0);
    };
    const ExpansionPlan plan(n, 1, 3, 3);
    EXPECT_NEAR(apply_plan(plan, lam, f), f(lam), 1e-13);
}

TEST(Plan, ValidationErrors) {
    EXPECT_THROW(ExpansionPlan(5, 0, 1), ConfigError);
    EXPECT_THROW(ExpansionPlan(5, 5, 0), ConfigError);
    EXPECT_THROW(ExpansionPlan(5, 3, 3), ConfigError);
    EXPECT_THROW(ExpansionPlan(5, 1, 2, 1), ConfigError);
    EXPECT_THROW(ExpansionPlan(5, 1, 4, 4), ConfigError);  // no (4, 5) stencil
}

TEST(Plan, LambdaPrimeAndLabels) {
    const ExpansionPlan plan(5, 2, 2);
    const Vector lam = test_lambda(5);
    const Vector base = plan.lambda_prime(plan.base_pattern(), lam);
    EXPECT_EQ(base(0), lam(0));
    EXPECT_EQ(base(1), lam(1));
    EXPECT_EQ(base.tail(3).squaredNorm(), 0.0);
    bool found = false;
    for (std::size_t k = 0; k < plan.patterns().size(); ++k) {
        const Activation& a = plan.patterns()[k];
        if (a.size() == 1 && a[0] == std::pair{3, 2}) {
            found = true;
            EXPECT_DOUBLE_EQ(plan.lambda_prime(k, lam)(3), 2.0 * lam(3));
            EXPECT_EQ(format_activation(a, 2), "lambda_1..lambda_2 + 2*lambda_4e_4");
        }
    }
    EXPECT_TRUE(found);
}

TEST(Combine, FirstOrderFormulaAndProfile) {
    const std::map<int, double> v{{2, 1.5}, {3, 2.5}, {4, 0.5}};
    EXPECT_DOUBLE_EQ(first_order_combine(v, 1.0, 4), -2.0 + 4.5);
    const std::vector<double> corr{1.5, 2.5, 0.5};
    EXPECT_DOUBLE_EQ(partial_sum_profile(1.0, corr, 1), 1.0);
    EXPECT_DOUBLE_EQ(partial_sum_profile(1.0, corr, 2), 1.5);
    EXPECT_DOUBLE_EQ(partial_sum_profile(1.0, corr, 4), first_order_combine(v, 1.0, 4));
    EXPECT_THROW(partial_sum_profile(1.0, corr, 5), ConfigError);
    EXPECT_THROW(first_order_combine({{2, 1.0}}, 1.0, 3), IncompletePlanError);
}

TEST(Combine, AssembleReportsMissingTerms) {
    const ExpansionPlan plan(4, 1, 1);
    std::vector<double> v(plan.patterns().size(), 1.0);
    EXPECT_NO_THROW(assemble_vrst(plan, v));
    v[1] = std::nan("");
    EXPECT_THROW(assemble_vrst(plan, v), IncompletePlanError);
    v.pop_back();
    EXPECT_THROW(assemble_vrst(plan, v), IncompletePlanError);
}

TEST(Combine, RunningTotals) {
    const ExpansionPlan plan(5, 1, 2, 2);
    const Vector lam = test_lambda(5);
    std::vector<double> v(plan.patterns().size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = plan.lambda_prime(k, lam).squaredNorm();
    const VrstResult r = assemble_vrst(plan, v);
    ASSERT_EQ(r.level.size(), 3u);
    EXPECT_DOUBLE_EQ(r.running_total[0], r.level[0]);
    EXPECT_NEAR(r.running_total[2], r.level[0] + r.level[1] + r.level[2], 1e-15);
    EXPECT_NEAR(r.total(), lam.squaredNorm(), 1e-14);
}
