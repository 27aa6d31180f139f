#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "kgw/errors.hpp"
#include "kgw/potential.hpp"
#include "kgw/quadrature.hpp"

namespace kgw {

/// One periodic orbit around the origin: speed, omega = 1 - c^2, period, energy level.
struct WaveParams {
    double c = 0.0;
    double omega = 1.0;
    double L = 0.0;
    double beta = 0.0;
    double gap = 0.0;  // E* - beta, kept separately so levels next to the separatrix stay resolved
};

/// Odd periodic profile sampled at x_j = j L / N, j = 0..N-1.
struct WaveProfile {
    WaveParams params;
    PotentialSpec spec;
    double x1 = 0.0;
    std::vector<double> phi;
    std::vector<double> dphi;

    [[nodiscard]] int size() const { return static_cast<int>(phi.size()); }
    [[nodiscard]] double spacing() const { return params.L / static_cast<double>(phi.size()); }
    [[nodiscard]] double x(int j) const { return j * spacing(); }

    /// phi'' from the profile equation omega phi'' = V'(phi).
    [[nodiscard]] std::vector<double> ddphi() const
    {
        std::vector<double> r(phi.size());
        for (std::size_t j = 0; j < phi.size(); ++j) r[j] = potential_force(spec, phi[j]) / params.omega;
        return r;
    }
};

[[nodiscard]] inline double omega_of(double c)
{
    require(std::abs(c) < 1.0, "wave speed must satisfy |c| < 1");
    return 1.0 - c * c;
}

/// Upper end E* of the energy levels carrying closed orbits around the origin.
[[nodiscard]] inline double max_energy(const PotentialSpec& spec, double omega)
{
    validate(spec);
    require(omega > 0.0 && omega <= 1.0, "omega must lie in (0, 1]");
    if (spec.family == Family::phi4n) {
        const double p = pi_n0(spec.n);
        return p * p / omega;
    }
    return spec.n / (2.0 * omega * (spec.n + 1.0));
}

namespace detail {

inline void require_level(const PotentialSpec& spec, double omega, double beta)
{
    const double e = max_energy(spec, omega);
    require(beta > 0.0 && beta < e, "beta must lie strictly inside (0, E*)");
}

} // namespace detail

/// Right turning point x1 > 0 with V(x1) = V(0) - omega beta.
[[nodiscard]] inline double turning_point(const PotentialSpec& spec, double omega, double beta)
{
    detail::require_level(spec, omega, beta);
    const double target = omega * beta;
    // g(x) = V(x) - V(0) + omega beta is positive at 0 and negative at the basin edge.
    auto g = [&](double x) { return potential_offset(spec, x) + target; };
    double lo = 0.0, hi = basin_half_width(spec);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16) break;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

/// 2 sqrt(2 omega) * integral_0^{pi/2} dt / sqrt(-D(x1 sin t, x1)).
inline double period_at_nodes(const PotentialSpec& spec, double omega, double x1, int nodes)
{
    auto f = [&](double t) {
        const double d = potential_secant(spec, x1 * std::sin(t), x1);
        return 1.0 / std::sqrt(-d);
    };
    return 2.0 * std::sqrt(2.0 * omega) * integrate_gauss(f, 0.0, 0.5 * std::numbers::pi, nodes);
}

struct PeriodResult {
    double value = 0.0;
    int nodes = 0;
};

inline PeriodResult period_adaptive(const PotentialSpec& spec, double omega, double beta)
{
    detail::require_level(spec, omega, beta);
    const double x1 = turning_point(spec, omega, beta);
    int n = 64;
    double prev = period_at_nodes(spec, omega, x1, n);
    while (n < (1 << 17)) {
        n *= 2;
        const double cur = period_at_nodes(spec, omega, x1, n);
        if (!std::isfinite(cur)) throw NumericalError("period: non-finite quadrature");
        if (std::abs(cur - prev) <= 1e-11 * std::abs(cur)) return {cur, n};
        prev = cur;
    }
    throw NumericalError("period: quadrature did not converge");
}

} // namespace detail

/// Period L(beta) of the orbit at energy level beta.
[[nodiscard]] inline double period(const PotentialSpec& spec, double omega, double beta)
{
    return detail::period_adaptive(spec, omega, beta).value;
}

/// L(beta) minus the linear period 2 pi sqrt(omega / |V''(0)|), computed directly so that
/// differences of nearly harmonic periods stay resolvable below the rounding of L itself.
[[nodiscard]] inline double period_excess(const PotentialSpec& spec, double omega, double beta)
{
    detail::require_level(spec, omega, beta);
    const double x1 = turning_point(spec, omega, beta);
    const double u0 = -potential_secant(spec, 0.0, 0.0);
    auto f = [&](double t) {
        const double x = x1 * std::sin(t);
        const double u = -potential_secant(spec, x, x1);
        const double su = std::sqrt(u), s0 = std::sqrt(u0);
        return secant_excess(spec, x, x1) / (su * s0 * (su + s0));
    };
    int n = 64;
    double prev = integrate_gauss(f, 0.0, 0.5 * std::numbers::pi, n);
    while (n < (1 << 17)) {
        n *= 2;
        const double cur = integrate_gauss(f, 0.0, 0.5 * std::numbers::pi, n);
        if (!std::isfinite(cur)) throw NumericalError("period_excess: non-finite quadrature");
        if (std::abs(cur - prev) <= 1e-11 * std::abs(cur)) return 2.0 * std::sqrt(2.0 * omega) * cur;
        prev = cur;
    }
    throw NumericalError("period_excess: quadrature did not converge");
}

/// Same integral with a fixed number of nodes.
[[nodiscard]] inline double period_fixed(const PotentialSpec& spec, double omega, double beta, int nodes)
{
    detail::require_level(spec, omega, beta);
    return detail::period_at_nodes(spec, omega, turning_point(spec, omega, beta), nodes);
}

/// dL/dbeta by a 5-point central stencil, h = 1e-5 beta capped at 1e-2 (E* - beta):
/// near E* the log singularity of L would otherwise dominate the truncation error.
[[nodiscard]] inline double period_slope(const PotentialSpec& spec, double omega, double beta)
{
    detail::require_level(spec, omega, beta);
    const double e = max_energy(spec, omega);
    const double h = std::min(1e-5 * beta, 1e-2 * (e - beta));
    require(beta - 2.0 * h > 0.0 && beta + 2.0 * h < e, "period_slope: stencil leaves (0, E*)");
    // one rule for all stencil points keeps the difference smooth
    const int nodes = 2 * detail::period_adaptive(spec, omega, beta + 2.0 * h).nodes;
    auto L = [&](double b) { return period_fixed(spec, omega, b, nodes); };
    return (-L(beta + 2 * h) + 8 * L(beta + h) - 8 * L(beta - h) + L(beta - 2 * h)) / (12.0 * h);
}

/// Small-amplitude limit of the period at omega = 1, evaluated at beta = 1e-10 E*.
[[nodiscard]] inline double small_amplitude_period(const PotentialSpec& spec)
{
    return period(spec, 1.0, 1e-10 * max_energy(spec, 1.0));
}

/// 2 pi / sqrt(|V''(0)|): the linearized value of the same limit.
[[nodiscard]] inline double linearized_period(const PotentialSpec& spec)
{
    return 2.0 * std::numbers::pi / std::sqrt(std::abs(eval_derivative(spec, 0.0, 2)));
}

/// Levels with gap below this fraction of E* are handled in coordinates centered on the saddle.
inline constexpr double separatrix_switch = 1e-9;

/// E* - beta, taken from the gap field when it is set (> 0).
[[nodiscard]] inline double level_gap(const PotentialSpec& spec, const WaveParams& w)
{
    return w.gap > 0.0 ? w.gap : max_energy(spec, w.omega) - w.beta;
}

[[nodiscard]] inline bool near_separatrix(const PotentialSpec& spec, const WaveParams& w)
{
    return level_gap(spec, w) < separatrix_switch * max_energy(spec, w.omega);
}

/// Distance s1 from the turning point to the basin edge: V(a - s1) - V(a) = omega * gap.
[[nodiscard]] inline double separatrix_offset(const PotentialSpec& spec, double omega, double gap)
{
    const double e = max_energy(spec, omega);
    require(gap > 0.0 && gap < e, "gap must lie strictly inside (0, E*)");
    const double target = omega * gap;
    // bisection on log s
    double lo = std::log(1e-300), hi = std::log(basin_half_width(spec));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (saddle_height(spec, std::exp(mid)) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15) break;
    }
    return std::exp(0.5 * (lo + hi));
}

namespace detail {

/// 4 integral_{s1}^{a} ds / sqrt(2 K(s)) with s = s1 cosh t, K = (G(s) - G(s1)) / omega.
inline double period_gap_at_nodes(const PotentialSpec& spec, double omega, double s1, int nodes)
{
    const double a = basin_half_width(spec);
    const double g1 = saddle_height(spec, s1);
    auto f = [&](double t) {
        const double s = s1 * std::cosh(t);
        const double k = (saddle_height(spec, s) - g1) / omega;
        return s1 * std::sinh(t) / std::sqrt(2.0 * k);
    };
    return 4.0 * integrate_gauss(f, 0.0, std::acosh(a / s1), nodes);
}

} // namespace detail

/// Period at energy E* - gap; usable for gaps far below the resolution of beta.
[[nodiscard]] inline double period_from_gap(const PotentialSpec& spec, double omega, double gap)
{
    const double s1 = separatrix_offset(spec, omega, gap);
    int n = 64;
    double prev = detail::period_gap_at_nodes(spec, omega, s1, n);
    while (n < (1 << 16)) {
        n *= 2;
        const double cur = detail::period_gap_at_nodes(spec, omega, s1, n);
        if (!std::isfinite(cur)) throw NumericalError("period_from_gap: non-finite quadrature");
        if (std::abs(cur - prev) <= 1e-11 * std::abs(cur)) return cur;
        prev = cur;
    }
    throw NumericalError("period_from_gap: quadrature did not converge");
}

/// dL/dbeta = -dL/dgap, 5-point stencil in the gap with h = 1e-4 gap.
[[nodiscard]] inline double period_slope_gap(const PotentialSpec& spec, double omega, double gap)
{
    const double h = 1e-4 * gap;
    auto L = [&](double g) { return period_from_gap(spec, omega, g); };
    return -(-L(gap + 2 * h) + 8 * L(gap + h) - 8 * L(gap - h) + L(gap - 2 * h)) / (12.0 * h);
}

/// Bisection in log(gap) for period_from_gap = L inside [glo, ghi].
[[nodiscard]] inline WaveParams solve_gap_in(const PotentialSpec& spec, double c, double L, double glo,
                                             double ghi)
{
    const double omega = omega_of(c);
    const double e = max_energy(spec, omega);
    // the period decreases as the gap grows
    if (!(period_from_gap(spec, omega, ghi) < L && period_from_gap(spec, omega, glo) > L))
        throw NumericalError("solve_beta: L lies beyond the reach of the period map (gap below 1e-300)");
    double lo = std::log(glo), hi = std::log(ghi), mid = lo, fmid = 0.0;
    for (int it = 0; it < 300; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = period_from_gap(spec, omega, std::exp(mid)) - L;
        if (std::abs(fmid) <= 1e-13 * L || hi - lo <= 1e-15) break;
        if (fmid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    if (std::abs(fmid) > 1e-10 * L) throw NumericalError("solve_beta: residual above 1e-10");
    const double gap = std::exp(mid);
    return {c, omega, L, e - gap, gap};
}

/// Bisection for period(beta) = L inside [lo, hi].
[[nodiscard]] inline WaveParams solve_beta_in(const PotentialSpec& spec, double c, double L, double lo,
                                              double hi)
{
    const double omega = omega_of(c);
    require(L > 0.0, "L must be positive");
    require(lo > 0.0 && hi < max_energy(spec, omega) && lo < hi, "beta bracket must lie inside (0, E*)");
    double flo = period(spec, omega, lo) - L;
    double fhi = period(spec, omega, hi) - L;
    if (!(flo < 0.0 && fhi > 0.0)) throw NumericalError("solve_beta: bracket does not contain the period");
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    for (int it = 0; it < 300; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        fmid = period(spec, omega, mid) - L;
        if (std::abs(fmid) <= 1e-13 * L) break;
        if (fmid < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    fmid = period(spec, omega, mid) - L;
    if (std::abs(fmid) > 1e-10 * L) throw NumericalError("solve_beta: residual above 1e-10");
    return {c, omega, L, mid, max_energy(spec, omega) - mid};
}

/// The unique energy level with period L at speed c.
[[nodiscard]] inline WaveParams solve_beta(const PotentialSpec& spec, double c, double L)
{
    validate(spec);
    const double omega = omega_of(c);
    const double lmin = std::sqrt(omega) * small_amplitude_period(spec);
    if (!(L > lmin))
        throw PreconditionError("solve_beta: no periodic orbit, L = " + std::to_string(L)
                                + " is not above sqrt(omega) * delta_n = " + std::to_string(lmin));
    const double e = max_energy(spec, omega);
    // close to the separatrix beta itself loses the digits that matter, so solve for the gap
    const double top = 1e-6 * e;
    if (period_from_gap(spec, omega, top) <= L) return solve_gap_in(spec, c, L, 1e-300, top);
    return solve_beta_in(spec, c, L, 1e-12 * e, e - top);
}

/// True when an orbit of period L exists at speed c.
[[nodiscard]] inline bool admissible(const PotentialSpec& spec, double c, double L)
{
    if (!(std::abs(c) < 1.0)) return false;
    return L > std::sqrt(1.0 - c * c) * small_amplitude_period(spec);
}

/// Raw RK4 orbit of u'' = V'(u)/omega from (0, sqrt(2 beta)), sampled at j L / N.
struct OrbitSamples {
    std::vector<double> u;
    std::vector<double> v;
};

[[nodiscard]] inline OrbitSamples integrate_orbit(const PotentialSpec& spec, double omega, double beta,
                                                  double L, int N, int substeps)
{
    require(N >= 2 && substeps >= 1, "integrate_orbit: bad grid");
    OrbitSamples s;
    s.u.resize(static_cast<std::size_t>(N));
    s.v.resize(static_cast<std::size_t>(N));
    const double h = L / (static_cast<double>(N) * substeps);
    auto f = [&](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], potential_force(spec, y[0]) / omega};
    };
    std::array<double, 2> y{0.0, std::sqrt(2.0 * beta)};
    for (int j = 0; j < N; ++j) {
        s.u[static_cast<std::size_t>(j)] = y[0];
        s.v[static_cast<std::size_t>(j)] = y[1];
        for (int k = 0; k < substeps; ++k) y = rk4_step<2>(f, 0.0, y, h);
    }
    return s;
}

/// Max over samples of |1/2 v^2 - (V(u) - V(0))/omega - beta| / beta.
[[nodiscard]] inline double energy_residual(const WaveProfile& p)
{
    double r = 0.0;
    const auto& w = p.params;
    for (std::size_t j = 0; j < p.phi.size(); ++j) {
        const double e = 0.5 * p.dphi[j] * p.dphi[j] - potential_offset(p.spec, p.phi[j]) / w.omega;
        r = std::max(r, std::abs(e - w.beta) / w.beta);
    }
    return r;
}

namespace detail {

/// Profile from s = a - phi, integrated outward from the turning point where s = s1, s' = 0.
/// Grid points sit at half-steps L/(2N) away from the quarter period.
inline WaveProfile separatrix_profile(const WaveParams& params, const PotentialSpec& spec, int N)
{
    const double a = basin_half_width(spec);
    const double s1 = separatrix_offset(spec, params.omega, level_gap(spec, params));
    WaveProfile p;
    p.params = params;
    p.spec = spec;
    p.x1 = a - s1;
    auto f = [&](double, const std::array<double, 2>& y) {
        return std::array<double, 2>{y[1], -saddle_force(spec, y[0]) / params.omega};
    };
    const int M = N / 2;
    int substeps = 32;
    for (int attempt = 0; attempt <= 3; ++attempt, substeps *= 2) {
        const double h = params.L / (2.0 * N * substeps);
        std::vector<double> S(static_cast<std::size_t>(M + 1)), D(static_cast<std::size_t>(M + 1));
        std::array<double, 2> y{s1, 0.0};
        for (int m = 0; m <= M; ++m) {
            S[static_cast<std::size_t>(m)] = y[0];
            D[static_cast<std::size_t>(m)] = y[1];
            if (m < M)
                for (int k = 0; k < substeps; ++k) y = rk4_step<2>(f, 0.0, y, h);
        }
        p.phi.assign(static_cast<std::size_t>(N), 0.0);
        p.dphi.assign(static_cast<std::size_t>(N), 0.0);
        for (int j = 0; j <= M; ++j) {
            const int m = std::abs(2 * j - M);
            const auto jj = static_cast<std::size_t>(j), mm = static_cast<std::size_t>(m);
            p.phi[jj] = (j == 0 || j == M) ? 0.0 : a - S[mm];
            p.dphi[jj] = 2 * j <= M ? D[mm] : -D[mm];
        }
        for (int j = M + 1; j < N; ++j) {
            p.phi[static_cast<std::size_t>(j)] = -p.phi[static_cast<std::size_t>(j - M)];
            p.dphi[static_cast<std::size_t>(j)] = -p.dphi[static_cast<std::size_t>(j - M)];
        }
        if (energy_residual(p) <= 1e-9) return p;
    }
    throw NumericalError("construct_profile: energy residual above 1e-9 after step refinement");
}

} // namespace detail

/// Samples the odd wave of the given parameters on N points and symmetrizes it.
[[nodiscard]] inline WaveProfile construct_profile(const WaveParams& params, const PotentialSpec& spec, int N)
{
    validate(spec);
    require(N >= 64 && N % 2 == 0, "construct_profile: N must be even and >= 64");
    require(std::abs(params.c) < 1.0 && params.L > 0.0, "construct_profile: invalid parameters");
    if (near_separatrix(spec, params)) return detail::separatrix_profile(params, spec, N);
    detail::require_level(spec, params.omega, params.beta);

    WaveProfile p;
    p.params = params;
    p.spec = spec;
    p.x1 = turning_point(spec, params.omega, params.beta);
    int substeps = 32;
    for (int attempt = 0; attempt <= 3; ++attempt, substeps *= 2) {
        auto s = integrate_orbit(spec, params.omega, params.beta, params.L, N, substeps);
        p.phi.assign(static_cast<std::size_t>(N), 0.0);
        p.dphi.assign(static_cast<std::size_t>(N), 0.0);
        p.dphi[0] = s.v[0];
        for (int j = 1; j < N; ++j) {
            const auto a = static_cast<std::size_t>(j), b = static_cast<std::size_t>(N - j);
            p.phi[a] = 0.5 * (s.u[a] - s.u[b]);
            p.dphi[a] = 0.5 * (s.v[a] + s.v[b]);
        }
        p.phi[static_cast<std::size_t>(N / 2)] = 0.0;
        if (energy_residual(p) <= 1e-9) return p;
    }
    throw NumericalError("construct_profile: energy residual above 1e-9 after step refinement");
}

/// integral over one period of phi'^2, from the quadrature (no profile needed).
[[nodiscard]] inline double dphi_squared_integral(const PotentialSpec& spec, double omega, double beta)
{
    detail::require_level(spec, omega, beta);
    const double x1 = turning_point(spec, omega, beta);
    auto f = [&](double t) {
        const double c = std::cos(t);
        return c * c * std::sqrt(-potential_secant(spec, x1 * std::sin(t), x1));
    };
    const double q = integrate_gauss(f, 0.0, 0.5 * std::numbers::pi, 256);
    return 4.0 * std::sqrt(2.0) * x1 * x1 / std::sqrt(omega) * q;
}

/// Trapezoid integral of phi'^2 over the profile grid.
[[nodiscard]] inline double dphi_squared(const WaveProfile& p)
{
    double s = 0.0;
    for (double d : p.dphi) s += d * d;
    return s * p.spacing();
}

} // namespace kgw
