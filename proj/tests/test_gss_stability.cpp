#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kgw/gss_stability.hpp"

using namespace kgw;

namespace {

const PotentialSpec phi4_1{Family::phi4n, 1};

} // namespace

TEST(Gss, VacuumAndStandingFunctionals)
{
    const int N = 128;
    std::vector<double> one(N, 0.5), zero(N, 0.0);
    const auto f = conserved_functionals(phi4_1, one, zero, 10.0);
    EXPECT_EQ(f.energy, 0.0);
    EXPECT_EQ(f.momentum, 0.0);

    const auto p = construct_profile(solve_beta(phi4_1, 0.0, 8.0), phi4_1, 256);
    const auto g = conserved_functionals(phi4_1, p.phi, std::vector<double>(256, 0.0), 8.0);
    EXPECT_EQ(g.momentum, 0.0);
    EXPECT_GT(g.energy, 0.0);
}

TEST(Gss, TravelingPairMomentum)
{
    const auto p = construct_profile(solve_beta(phi4_1, 0.3, 10.0), phi4_1, 512);
    const auto f = wave_functionals(p);
    const double expect = -0.3 * dphi_squared(p);
    EXPECT_NEAR(f.momentum, expect, 1e-8 * std::abs(expect));
    EXPECT_NEAR(f.action, f.energy + 0.3 * f.momentum, 1e-14 * std::abs(f.energy));
}

TEST(Gss, DPrimeMatchesDifferenceOfAction)
{
    const double c = 0.3, L = 10.0, h = 1e-3;
    const double num = (action_of_speed(phi4_1, c + h, L) - action_of_speed(phi4_1, c - h, L)) / (2.0 * h);
    const auto p = construct_profile(solve_beta(phi4_1, c, L), phi4_1, 512);
    const double dprime = -c * dphi_squared(p);
    EXPECT_NEAR(num, dprime, 1e-4 * std::abs(dprime));
}

TEST(Gss, SecondDerivativeNegative)
{
    for (int n = 1; n <= 3; ++n)
        for (double c : {0.1, 0.3, 0.5}) {
            const auto r = d_second({Family::phi4n, n}, c, 10.0);
            EXPECT_LT(r.dsecond, -r.stencil_error);
            EXPECT_EQ(r.verdict, Verdict::unstable);
            EXPECT_LE(r.dsecond, r.sharp_bound + 0.05 * std::abs(r.sharp_bound));
            EXPECT_NEAR(r.dprime, -r.m_of_c, 0.0);
            // the margin that follows from the action identity
            EXPECT_GT(r.beta_slope_margin_omega, 0.0) << n << " " << c;
        }
}

TEST(Gss, VerdictStableUnderStencilRefinement)
{
    const auto a = d_second({Family::phi2n2, 2}, 0.3, 10.0, 1e-3);
    const auto b = d_second({Family::phi2n2, 2}, 0.3, 10.0, 5e-4);
    EXPECT_EQ(a.verdict, b.verdict);
    EXPECT_NEAR(a.dsecond, b.dsecond, 1e-4 * std::abs(a.dsecond));
}

TEST(Gss, EvenInSpeed)
{
    const auto a = d_second(phi4_1, 0.3, 10.0);
    const auto b = d_second(phi4_1, -0.3, 10.0);
    EXPECT_NEAR(a.dsecond, b.dsecond, 1e-6 * std::abs(a.dsecond));
    EXPECT_NEAR(a.m_of_c, -b.m_of_c, 1e-12 * std::abs(a.m_of_c));
    // the derivative of beta vanishes at rest
    const auto r = d_second(phi4_1, 0.0, 10.0);
    EXPECT_NEAR(r.dbeta_dc, 0.0, 1e-9);
}

TEST(Gss, ActionIdentity)
{
    const auto a = action_identity_check(phi4_1, 0.3, 10.0);
    EXPECT_LE(a.residual, 1e-3);
    const auto b = action_identity_check({Family::phi2n2, 2}, 0.3, 10.0);
    EXPECT_LE(b.residual, 1e-3);
    EXPECT_THROW((void)action_identity_check(phi4_1, 0.0, 10.0), PreconditionError);
}

TEST(Gss, StencilOutsideAdmissibleWindow)
{
    // at the lower edge c = 0.1 the bound sqrt(omega) 2 pi is about 6.25 > 6
    EXPECT_THROW((void)d_second(phi4_1, 0.3, 6.0, 0.1), PreconditionError);
}
