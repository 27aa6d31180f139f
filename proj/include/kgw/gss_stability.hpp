#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kgw/errors.hpp"
#include "kgw/potential.hpp"
#include "kgw/spectral.hpp"
#include "kgw/wave_family.hpp"

namespace kgw {

struct Functionals {
    double energy = 0.0;
    double momentum = 0.0;
    double action = 0.0;  // energy + c momentum
};

/// Energy 1/2 int (phi2^2 + phi1_x^2 + 2 V(phi1)) and momentum int phi2 phi1_x by
/// the trapezoid rule with the spectral first derivative.
[[nodiscard]] inline Functionals conserved_functionals(const PotentialSpec& spec, std::span<const double> phi1,
                                                       std::span<const double> phi2, double L, double c = 0.0)
{
    const int N = static_cast<int>(phi1.size());
    require(N >= 4 && N % 2 == 0 && phi2.size() == phi1.size(), "conserved_functionals: bad grid data");
    PairedCirculant D(first_derivative_kernel(N, L), true);
    const auto d1 = D(phi1);
    const double h = L / N;
    auto ed = [&](int j) {
        const auto jj = static_cast<std::size_t>(j);
        return phi2[jj] * phi2[jj] + d1[jj] * d1[jj] + 2.0 * eval_potential(spec, phi1[jj]);
    };
    auto md = [&](int j) { return phi2[static_cast<std::size_t>(j)] * d1[static_cast<std::size_t>(j)]; };
    // summed in reflection pairs j, N - j so odd integrands cancel exactly
    double e = ed(0) + ed(N / 2), m = md(0) + md(N / 2);
    for (int j = 1; j < N / 2; ++j) {
        e += ed(j) + ed(N - j);
        m += md(j) + md(N - j);
    }
    Functionals f;
    f.energy = 0.5 * h * e;
    f.momentum = h * m;
    f.action = f.energy + c * f.momentum;
    return f;
}

/// (phi_c, -c phi_c') on the profile grid.
[[nodiscard]] inline std::array<std::vector<double>, 2> traveling_pair(const WaveProfile& p)
{
    std::vector<double> v(p.dphi.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = -p.params.c * p.dphi[j];
    return {p.phi, v};
}

/// Functionals of the traveling pair, with the action taken at the wave speed.
[[nodiscard]] inline Functionals wave_functionals(const WaveProfile& p)
{
    const auto pair = traveling_pair(p);
    return conserved_functionals(p.spec, pair[0], pair[1], p.params.L, p.params.c);
}

enum class Verdict { unstable, stable, inconclusive };

[[nodiscard]] inline std::string verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::unstable: return "unstable";
    case Verdict::stable: return "stable";
    default: return "inconclusive";
    }
}

struct GssReport {
    PotentialSpec spec;
    double c = 0.0;
    double L = 0.0;
    double h = 0.0;
    double omega = 0.0;
    double beta = 0.0;
    double gap = 0.0;              // E* - beta
    double dphi_sq = 0.0;          // int phi_c'^2
    double m_of_c = 0.0;           // c int phi_c'^2
    double dprime = 0.0;           // -c int phi_c'^2
    double dsecond = 0.0;          // -dM/dc, 5-point
    double dsecond_3pt = 0.0;
    double stencil_error = 0.0;    // |5-point - 3-point|
    double sharp_bound = 0.0;      // -(1/omega) int phi_c'^2
    double dbeta_dc = 0.0;
    double beta_slope_margin = 0.0;        // dbeta/dc - 2 c beta / omega^2
    double beta_slope_margin_omega = 0.0;  // dbeta/dc - 2 c beta / omega
    Verdict verdict = Verdict::inconclusive;
};

namespace detail {

struct FamilyPoint {
    double beta = 0.0;
    double gap = 0.0;
    double dphi_sq = 0.0;
    WaveProfile profile;
};

inline FamilyPoint family_point(const PotentialSpec& spec, double c, double L, int N)
{
    FamilyPoint f;
    const auto w = solve_beta(spec, c, L);
    f.profile = construct_profile(w, spec, N);
    f.beta = w.beta;
    f.gap = w.gap;
    f.dphi_sq = dphi_squared(f.profile);
    return f;
}

inline void require_stencil(const PotentialSpec& spec, double c, double L, double h)
{
    require(h > 0.0, "stencil step h must be positive");
    for (double s : {c - 2.0 * h, c + 2.0 * h}) {
        if (!admissible(spec, s, L))
            throw PreconditionError("stencil speed " + std::to_string(s)
                                    + " leaves the admissible window (L must exceed sqrt(omega) delta_n)");
    }
}

} // namespace detail

/// d''(c) = -dM/dc with M(c) = c int phi_c'^2, plus the beta(c) slope margins.
[[nodiscard]] inline GssReport d_second(const PotentialSpec& spec, double c, double L, double h = 1e-3, int N = 512)
{
    validate(spec);
    detail::require_stencil(spec, c, L, h);
    std::array<detail::FamilyPoint, 5> pts;
    for (int i = 0; i < 5; ++i) pts[static_cast<std::size_t>(i)] = detail::family_point(spec, c + (i - 2) * h, L, N);
    std::array<double, 5> M{}, G{};
    for (int i = 0; i < 5; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        M[ii] = (c + (i - 2) * h) * pts[ii].dphi_sq;
        G[ii] = pts[ii].gap;
    }
    auto d5 = [&](const std::array<double, 5>& f) { return (-f[4] + 8 * f[3] - 8 * f[1] + f[0]) / (12.0 * h); };
    auto d3 = [&](const std::array<double, 5>& f) { return (f[3] - f[1]) / (2.0 * h); };

    GssReport r;
    r.spec = spec;
    r.c = c;
    r.L = L;
    r.h = h;
    r.omega = 1.0 - c * c;
    r.beta = pts[2].beta;
    r.gap = G[2];
    r.dphi_sq = pts[2].dphi_sq;
    r.m_of_c = M[2];
    r.dprime = -M[2];
    r.dsecond = -d5(M);
    r.dsecond_3pt = -d3(M);
    r.stencil_error = std::abs(r.dsecond - r.dsecond_3pt);
    r.sharp_bound = -r.dphi_sq / r.omega;
    // beta = E* - gap with E* proportional to 1/omega, so dE*/dc = 2 c E* / omega exactly
    const double e = max_energy(spec, r.omega);
    const double dgap = d5(G);
    r.dbeta_dc = 2.0 * c * e / r.omega - dgap;
    r.beta_slope_margin = r.dbeta_dc - 2.0 * c * r.beta / (r.omega * r.omega);
    r.beta_slope_margin_omega = 2.0 * c * r.gap / r.omega - dgap;
    if (r.dsecond < -r.stencil_error)
        r.verdict = Verdict::unstable;
    else if (r.dsecond > r.stencil_error)
        r.verdict = Verdict::stable;
    else
        r.verdict = Verdict::inconclusive;
    return r;
}

/// Action d(c) = E + c P of the traveling pair at speed c.
[[nodiscard]] inline double action_of_speed(const PotentialSpec& spec, double c, double L, int N = 512)
{
    const auto w = solve_beta(spec, c, L);
    return wave_functionals(construct_profile(w, spec, N)).action;
}

struct ActionIdentity {
    double lhs = 0.0;  // 2 int phi' eta'
    double rhs = 0.0;  // (dbeta/dc - 2 c beta / omega) L + (c / omega) int phi'^2
    double residual = 0.0;
};

/// Both sides of 2 int phi_c' eta_c' = (beta' - 2 c beta/omega) L + (c/omega) int phi_c'^2,
/// eta_c = d phi_c / dc by 5-point differences of profiles on a shared grid.
[[nodiscard]] inline ActionIdentity action_identity_check(const PotentialSpec& spec, double c, double L,
                                                          double h = 1e-3, int N = 512)
{
    validate(spec);
    require(c != 0.0, "action_identity_check needs c != 0");
    detail::require_stencil(spec, c, L, h);
    std::array<detail::FamilyPoint, 5> pts;
    for (int i = 0; i < 5; ++i) pts[static_cast<std::size_t>(i)] = detail::family_point(spec, c + (i - 2) * h, L, N);
    const auto& p0 = pts[2].profile;
    const double dx = p0.spacing();
    double lhs = 0.0;
    for (int j = 0; j < N; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double eta_x = (-pts[4].profile.dphi[jj] + 8 * pts[3].profile.dphi[jj] - 8 * pts[1].profile.dphi[jj]
                              + pts[0].profile.dphi[jj])
                           / (12.0 * h);
        lhs += p0.dphi[jj] * eta_x;
    }
    lhs *= 2.0 * dx;
    const double dgap = (-pts[4].gap + 8 * pts[3].gap - 8 * pts[1].gap + pts[0].gap) / (12.0 * h);
    const double omega = 1.0 - c * c;
    ActionIdentity a;
    a.lhs = lhs;
    a.rhs = (2.0 * c * pts[2].gap / omega - dgap) * L + c / omega * pts[2].dphi_sq;
    a.residual = std::abs(a.lhs - a.rhs) / std::max(std::abs(a.lhs), std::abs(a.rhs));
    return a;
}

} // namespace kgw
