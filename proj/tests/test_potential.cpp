#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kgw/potential.hpp"

using namespace kgw;

namespace {

const PotentialSpec phi4(int n) { return {Family::phi4n, n}; }
const PotentialSpec phi2(int n) { return {Family::phi2n2, n}; }

/// e_i of z by summing over all subsets.
std::vector<double> subset_sums(const std::vector<double>& z)
{
    const int n = static_cast<int>(z.size());
    std::vector<double> e(static_cast<std::size_t>(n + 1), 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double p = 1.0;
        int bits = 0;
        for (int k = 0; k < n; ++k)
            if (mask & (1u << k)) {
                p *= z[static_cast<std::size_t>(k)];
                ++bits;
            }
        e[static_cast<std::size_t>(bits)] += p;
    }
    return e;
}

double fd(const PotentialSpec& s, double x, int order)
{
    const double h = 1e-5;
    auto f = [&](double u) { return order == 1 ? eval_potential(s, u) : eval_derivative(s, u, order - 1); };
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace

TEST(Potential, ValuesAtSpecialPoints)
{
    EXPECT_EQ(eval_potential(phi4(1), 0.5), 0.0);
    EXPECT_DOUBLE_EQ(eval_potential(phi4(2), 0.0), 81.0 / 256.0);
    EXPECT_EQ(eval_potential(phi2(1), 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_derivative(phi4(1), 0.0, 2), -1.0);
    EXPECT_DOUBLE_EQ(eval_derivative(phi4(2), 0.0, 2), -45.0 / 8.0);
    EXPECT_EQ(eval_derivative(phi2(1), 1.0, 1), 0.0);
}

TEST(Potential, SecondDerivativeAtOriginMatchesProductFormula)
{
    for (int n = 1; n <= 6; ++n) {
        double p = 1.0, s = 0.0;
        for (int k = 1; k <= n; ++k) {
            p *= std::pow(k - 0.5, 4);
            s += std::pow(k - 0.5, -2);
        }
        EXPECT_NEAR(eval_derivative(phi4(n), 0.0, 2), -4.0 * p * s, 1e-12 * 4.0 * p * s) << n;
    }
}

TEST(Potential, DerivativesMatchFiniteDifferences)
{
    std::vector<PotentialSpec> specs;
    for (int n = 1; n <= 4; ++n) {
        specs.push_back(phi4(n));
        specs.push_back(phi2(n));
    }
    for (const auto& s : specs)
        for (double x : {-0.93, -0.41, -0.17, 0.05, 0.23, 0.38, 0.61, 1.2}) {
            for (int order = 1; order <= 3; ++order) {
                const double exact = eval_derivative(s, x, order);
                const double approx = fd(s, x, order);
                const double scale = std::max({std::abs(exact), std::abs(fd(s, x, 1)), 1.0});
                EXPECT_NEAR(approx, exact, 1e-6 * scale) << family_name(s.family) << s.n << " x=" << x << " o=" << order;
            }
        }
}

TEST(Potential, EvenAndForceOddExactly)
{
    for (int n = 1; n <= 5; ++n)
        for (double x : {0.1, 0.3333, 0.49, 0.77, 1.9}) {
            for (const auto& s : {phi4(n), phi2(n)}) {
                EXPECT_EQ(eval_potential(s, x), eval_potential(s, -x));
                EXPECT_EQ(potential_force(s, x), -potential_force(s, -x));
                EXPECT_NEAR(potential_force(s, x), eval_derivative(s, x, 1),
                            1e-13 * std::max(1.0, std::abs(eval_derivative(s, x, 1))));
            }
        }
}

TEST(Potential, CombinatorialSymbolsMatchEnumeration)
{
    for (int n = 1; n <= 6; ++n)
        for (double x : {0.0, 0.11, 0.37, 0.5, 1.3}) {
            std::vector<double> y;
            for (int k = 1; k <= n; ++k) y.push_back(x * x - half_odd_sq(k));
            const auto e = subset_sums(y);
            const auto t = combinatorial_terms(n, x);
            const double tol = 1e-12 * std::max(1.0, std::abs(e[static_cast<std::size_t>(n)]));
            EXPECT_NEAR(t.pi_n, e[static_cast<std::size_t>(n)], tol);
            for (int i = 0; i < n; ++i) EXPECT_NEAR(t.sig(i), e[static_cast<std::size_t>(i)], 1e-12 * std::max(1.0, std::abs(e[static_cast<std::size_t>(i)])));
            EXPECT_EQ(t.sig(-1), 0.0);
            const double v1 = 4.0 * x * t.pi_n * t.sig(n - 1);
            EXPECT_NEAR(eval_derivative(phi4(n), x, 1), v1, 1e-13 * std::max(1.0, std::abs(v1)));
        }
    for (int n = 1; n <= 6; ++n) {
        const auto t = combinatorial_terms(n, 0.0);
        EXPECT_DOUBLE_EQ(t.pi_n, (n % 2 ? -1.0 : 1.0) * t.pi_n0);
    }
}

TEST(Potential, CriticalPoints)
{
    auto one = critical_points(phi4(1));
    ASSERT_EQ(one.size(), 3u);
    EXPECT_EQ(one[0].u, -0.5);
    EXPECT_EQ(one[0].kind, CriticalKind::saddle);
    EXPECT_EQ(one[1].u, 0.0);
    EXPECT_EQ(one[1].kind, CriticalKind::center);
    EXPECT_EQ(one[2].kind, CriticalKind::saddle);

    auto two = critical_points(phi4(2));
    ASSERT_EQ(two.size(), 7u);
    // interior roots of Sigma_1 = 2x^2 - 5/2
    EXPECT_NEAR(two[1].u, -std::sqrt(5.0) / 2.0, 1e-12);
    EXPECT_NEAR(two[5].u, std::sqrt(5.0) / 2.0, 1e-12);
    for (int n = 1; n <= 5; ++n) EXPECT_EQ(critical_points(phi4(n)).size(), static_cast<std::size_t>(4 * n - 1));

    auto p = critical_points(phi2(3));
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[1].kind, CriticalKind::center);
    EXPECT_EQ(p[0].u, -1.0);
    EXPECT_EQ(p[2].u, 1.0);
}

TEST(Potential, ChiconeOracleForNEqualsOne)
{
    for (double x = -0.49; x <= 0.49; x += 0.01) {
        const double oracle = -96 * std::pow(x, 8) + 96 * std::pow(x, 6) + 6 * std::pow(x, 4);
        EXPECT_NEAR(vn_numerator(1, x), oracle, 1e-12);
    }
    EXPECT_DOUBLE_EQ(vn_limit_over_x4(1), 6.0);
    EXPECT_DOUBLE_EQ(chicone_limit(phi4(1)), 6.0);
}

TEST(Potential, ChiconeNumeratorAgreesWithDirectDifferentiation)
{
    for (int n = 1; n <= 5; ++n)
        for (double x : {0.07, 0.19, 0.31, 0.44}) {
            const double a = vn_numerator(n, x), b = chicone_numerator_direct(phi4(n), x);
            EXPECT_NEAR(a, b, 1e-9 * std::max(std::abs(a), 1e-300)) << n << " " << x;
        }
}

TEST(Potential, ChiconeLimitFormula)
{
    for (int n = 1; n <= 6; ++n) {
        double x = 1e-3;
        const double ratio = vn_numerator(n, x) / std::pow(x, 4);
        EXPECT_NEAR(ratio, vn_limit_over_x4(n), 1e-4 * vn_limit_over_x4(n)) << n;
        EXPECT_GT(vn_limit_over_x4(n), 0.0);
    }
}

TEST(Potential, ChiconeNonnegativeOnBasin)
{
    const auto grid = symmetric_grid(0.499, 2001);
    for (int n = 1; n <= 6; ++n) {
        double scale = 0.0, lo = 0.0;
        for (double x : grid) {
            const double v = vn_numerator(n, x);
            scale = std::max(scale, std::abs(v));
            lo = std::min(lo, v);
        }
        EXPECT_GE(lo, -1e-12 * scale) << n;
        for (double x : grid) EXPECT_GE(chicone_quantity(phi4(n), x), 0.0) << n << " " << x;
    }
    EXPECT_EQ(vn_numerator(3, 0.0), 0.0);
}

TEST(Potential, Phi2n2ChiconeBracketPositive)
{
    const auto grid = symmetric_grid(0.999, 2001);
    for (int n = 1; n <= 8; ++n)
        for (double x : grid) EXPECT_GT(phi2n2_chicone_bracket(n, x), 0.0);
    EXPECT_DOUBLE_EQ(chicone_quantity(phi2(1), 0.0), 1.5);
    EXPECT_EQ(chicone_quantity(phi2(2), 0.0), 0.0);
}

TEST(Potential, ChiconeRejectsPointsOutsideBasin)
{
    EXPECT_THROW((void)chicone_quantity(phi4(2), 0.5), PreconditionError);
    EXPECT_THROW((void)chicone_quantity(phi2(2), -1.0), PreconditionError);
    EXPECT_THROW((void)eval_derivative(phi4(1), 0.2, 4), PreconditionError);
    EXPECT_THROW(validate({Family::phi4n, 0}), PreconditionError);
}

TEST(Potential, LemmaInequalitiesHold)
{
    const auto grid = symmetric_grid(0.499, 801);
    for (int n = 1; n <= 6; ++n) {
        const auto rep = check_lemma_inequalities(n, grid);
        EXPECT_EQ(rep.margins.size(), n == 1 ? 1u : 5u);
        for (const auto& m : rep.margins) EXPECT_TRUE(m.holds()) << n << " " << m.name << " " << m.min_value;
    }
    // at x = 0 the first inequality vanishes
    const std::vector<double> origin{0.0};
    const auto rep = check_lemma_inequalities(3, origin);
    EXPECT_EQ(rep.margins[1].min_value, 0.0);
}

TEST(Potential, SaddleCoordinatesMatchDirectEvaluation)
{
    for (const auto& s : {phi4(1), phi4(2), phi4(3), phi2(1), phi2(3)}) {
        const double a = basin_half_width(s);
        for (double d : {0.3, 0.1, 0.01}) {
            const double direct = eval_potential(s, a - d) - eval_potential(s, a);
            EXPECT_NEAR(saddle_height(s, d), direct, 1e-12 * std::max(1.0, std::abs(direct)));
            EXPECT_NEAR(saddle_force(s, d), potential_force(s, a - d), 1e-12);
        }
        // quadratic behaviour with curvature V''(a)
        const double tiny = 1e-30;
        EXPECT_NEAR(saddle_height(s, tiny) / (tiny * tiny), 0.5 * eval_derivative(s, a, 2),
                    1e-10 * eval_derivative(s, a, 2));
    }
}
