#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kgw/errors.hpp"
#include "kgw/potential.hpp"
#include "kgw/spectral.hpp"
#include "kgw/wave_family.hpp"

namespace kgw {

enum class Parity { full, odd, even };

[[nodiscard]] inline std::string parity_name(Parity p)
{
    switch (p) {
    case Parity::full: return "full";
    case Parity::odd: return "odd";
    default: return "even";
    }
}

struct SpectrumReport {
    std::string op;                 // "scalar" or "block"
    Parity parity = Parity::full;
    int grid_size = 0;
    std::vector<double> eigenvalues;  // ascending
    int negative_count = 0;
    std::optional<int> zero_index;
    int zero_count = 0;             // eigenvalues inside +-zero_tolerance
    bool zero_simple = false;
    double zero_tolerance = 0.0;
    double spectral_radius = 0.0;
    std::optional<double> kernel_alignment;
    std::optional<double> gap;      // first eigenvalue above the zero one
    std::optional<double> theta;
    std::optional<double> coercivity_gamma;     // plain l2 weight
    std::optional<double> coercivity_gamma_h1;  // H1 (scalar) or X (block) weight
    Eigen::MatrixXd eigenvectors;   // columns, grid coordinates
};

struct FloquetData {
    std::vector<double> mu_profile;
    double mu_at_L = 0.0;
    double theta = 0.0;
    double dL_dbeta = 0.0;
    double wronskian_defect = 0.0;
};

/// -omega D2 + diag V''(phi) on the profile grid.
[[nodiscard]] inline Eigen::MatrixXd scalar_operator(const WaveProfile& p)
{
    const int N = p.size();
    Eigen::MatrixXd M = -p.params.omega * circulant(second_derivative_kernel(N, p.params.L));
    for (int j = 0; j < N; ++j) M(j, j) += eval_derivative(p.spec, p.phi[static_cast<std::size_t>(j)], 2);
    return M;
}

/// [[-D2 + V'', -c D1], [c D1, I]]; exactly symmetric.
[[nodiscard]] inline Eigen::MatrixXd block_operator(const WaveProfile& p)
{
    const int N = p.size();
    const double c = p.params.c;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * N, 2 * N);
    M.topLeftCorner(N, N) = -circulant(second_derivative_kernel(N, p.params.L));
    for (int j = 0; j < N; ++j) M(j, j) += eval_derivative(p.spec, p.phi[static_cast<std::size_t>(j)], 2);
    const Eigen::MatrixXd D = circulant(first_derivative_kernel(N, p.params.L));
    M.topRightCorner(N, N) = -c * D;
    M.bottomLeftCorner(N, N) = c * D;
    M.bottomRightCorner(N, N).setIdentity();
    return M;
}

namespace detail {

inline double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::abs(a.dot(b)) / (na * nb);
}

inline void solve_symmetric(const Eigen::MatrixXd& A, SpectrumReport& r)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
    const auto& ev = es.eigenvalues();
    r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    r.eigenvectors = es.eigenvectors();
    r.spectral_radius = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    r.zero_tolerance = 1e-8 * r.spectral_radius;
    r.negative_count = 0;
    r.zero_count = 0;
    for (double v : r.eigenvalues) {
        if (v < -r.zero_tolerance) ++r.negative_count;
        if (std::abs(v) <= r.zero_tolerance) ++r.zero_count;
    }
}

/// Fills zero index, simplicity, alignment and gap for a full-grid report.
inline void locate_zero(SpectrumReport& r, const Eigen::VectorXd& kernel)
{
    int best = 0;
    for (int i = 1; i < static_cast<int>(r.eigenvalues.size()); ++i)
        if (std::abs(r.eigenvalues[static_cast<std::size_t>(i)])
            < std::abs(r.eigenvalues[static_cast<std::size_t>(best)]))
            best = i;
    r.kernel_alignment = cosine(r.eigenvectors.col(best), kernel);
    if (std::abs(r.eigenvalues[static_cast<std::size_t>(best)]) <= r.zero_tolerance) r.zero_index = best;
    double second = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(r.eigenvalues.size()); ++i)
        if (i != best) second = std::min(second, std::abs(r.eigenvalues[static_cast<std::size_t>(i)]));
    r.zero_simple = r.zero_index.has_value() && second >= 100.0 * r.zero_tolerance;
    if (best + 1 < static_cast<int>(r.eigenvalues.size()))
        r.gap = r.eigenvalues[static_cast<std::size_t>(best + 1)];
}

inline Eigen::VectorXd to_eigen(std::span<const double> v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Smallest eigenvalue of W^{-1/2} A W^{-1/2} for a positive diagonal weight W.
inline double weighted_min_eigenvalue(const Eigen::MatrixXd& A, const Eigen::VectorXd& w)
{
    const Eigen::VectorXd s = w.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd B = s.asDiagonal() * A * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("weighted eigensolver did not converge");
    return es.eigenvalues()(0);
}

/// 1 + kappa_k^2 for the sine modes k = 1..N/2-1.
inline Eigen::VectorXd sine_h1_weight(int N, double L)
{
    Eigen::VectorXd w(N / 2 - 1);
    for (int k = 1; k < N / 2; ++k) {
        const double kap = 2.0 * std::numbers::pi * k / L;
        w(k - 1) = 1.0 + kap * kap;
    }
    return w;
}

inline std::array<double, 4> floquet_rhs(const PotentialSpec& spec, double omega, const std::array<double, 4>& y,
                                         double shift)
{
    return {y[1], potential_force(spec, y[0]) / omega, y[3],
            (eval_derivative(spec, y[0], 2) - shift) * y[2] / omega};
}

} // namespace detail

/// Second solution mu of -omega mu'' + V''(phi) mu = 0 with mu(0) = 0,
/// mu'(0) = 1/phi'(0), and theta = mu(L)/phi'(0).
[[nodiscard]] inline FloquetData floquet_theta(const WaveProfile& p, bool with_slope = true)
{
    const auto& w = p.params;
    if (near_separatrix(p.spec, w))
        throw NumericalError("floquet_theta: level too close to the separatrix for a shooting integration");
    const double d0 = std::sqrt(2.0 * w.beta);
    require(d0 > 0.0, "floquet_theta: phi'(0) must be positive");
    const int N = p.size();
    FloquetData out;
    int substeps = 32;
    for (int attempt = 0; attempt <= 3; ++attempt, substeps *= 2) {
        const double h = w.L / (static_cast<double>(N) * substeps);
        auto f = [&](double, const std::array<double, 4>& y) { return detail::floquet_rhs(p.spec, w.omega, y, 0.0); };
        std::array<double, 4> y{0.0, d0, 0.0, 1.0 / d0};
        out.mu_profile.assign(static_cast<std::size_t>(N), 0.0);
        double defect = 0.0;
        auto wr = [&](const std::array<double, 4>& s) {
            return s[1] * s[3] - potential_force(p.spec, s[0]) / w.omega * s[2];
        };
        for (int j = 0; j < N; ++j) {
            out.mu_profile[static_cast<std::size_t>(j)] = y[2];
            defect = std::max(defect, std::abs(wr(y) - 1.0));
            for (int k = 0; k < substeps; ++k) y = rk4_step<4>(f, 0.0, y, h);
        }
        defect = std::max(defect, std::abs(wr(y) - 1.0));
        out.mu_at_L = y[2];
        out.wronskian_defect = defect;
        if (defect <= 1e-6) break;
        if (attempt == 3 && defect > 1e-5) throw NumericalError("floquet_theta: Wronskian drift above 1e-5");
    }
    out.theta = out.mu_at_L / d0;
    if (with_slope) out.dL_dbeta = period_slope(p.spec, w.omega, w.beta);
    return out;
}

namespace detail {

inline SpectrumReport scalar_spectrum_once(const WaveProfile& p, Parity parity)
{
    const int N = p.size();
    SpectrumReport r;
    r.op = "scalar";
    r.parity = parity;
    r.grid_size = N;
    const Eigen::MatrixXd M = scalar_operator(p);
    if (parity == Parity::full) {
        solve_symmetric(M, r);
        locate_zero(r, to_eigen(p.dphi));
        if (r.zero_count > 1) return r;
        r.theta = floquet_theta(p, false).theta;
        return r;
    }
    const Eigen::MatrixXd Q = parity == Parity::odd ? odd_basis(N) : even_basis(N);
    Eigen::MatrixXd A = Q.transpose() * M * Q;
    A = 0.5 * (A + A.transpose());
    solve_symmetric(A, r);
    r.eigenvectors = Q * r.eigenvectors;
    if (parity == Parity::odd && r.eigenvalues.front() > r.zero_tolerance) {
        r.coercivity_gamma = r.eigenvalues.front();
        r.coercivity_gamma_h1 = weighted_min_eigenvalue(A, sine_h1_weight(N, p.params.L));
    }
    return r;
}

inline SpectrumReport block_spectrum_once(const WaveProfile& p, Parity parity)
{
    const int N = p.size();
    SpectrumReport r;
    r.op = "block";
    r.parity = parity;
    r.grid_size = N;
    const Eigen::MatrixXd M = block_operator(p);
    if (parity == Parity::full) {
        solve_symmetric(M, r);
        const auto dd = p.ddphi();
        Eigen::VectorXd k(2 * N);
        for (int j = 0; j < N; ++j) {
            k(j) = p.dphi[static_cast<std::size_t>(j)];
            k(N + j) = -p.params.c * dd[static_cast<std::size_t>(j)];
        }
        locate_zero(r, k);
        return r;
    }
    require(parity == Parity::odd, "block_spectrum: parity must be full or odd");
    require(p.params.c == 0.0, "block_spectrum: odd projection is invariant only at c = 0");
    const Eigen::MatrixXd Q1 = odd_basis(N);
    const int m = static_cast<int>(Q1.cols());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2 * N, 2 * m);
    Q.topLeftCorner(N, m) = Q1;
    Q.bottomRightCorner(N, m) = Q1;
    Eigen::MatrixXd A = Q.transpose() * M * Q;
    A = 0.5 * (A + A.transpose());
    solve_symmetric(A, r);
    r.eigenvectors = Q * r.eigenvectors;
    if (r.eigenvalues.front() > r.zero_tolerance) {
        r.coercivity_gamma = r.eigenvalues.front();
        Eigen::VectorXd wgt(2 * m);
        wgt.head(m) = sine_h1_weight(N, p.params.L);
        wgt.tail(m).setOnes();
        r.coercivity_gamma_h1 = weighted_min_eigenvalue(A, wgt);
    }
    return r;
}

} // namespace detail

/// Spectrum of the scalar operator -omega d^2/dx^2 + V''(phi_c).
/// An ambiguous zero (two eigenvalues inside the tolerance) is retried on a
/// doubled grid up to N = 2048.
[[nodiscard]] inline SpectrumReport scalar_spectrum(const WaveProfile& p, Parity parity = Parity::full)
{
    require(p.size() >= 256, "scalar_spectrum: N must be >= 256");
    WaveProfile cur = p;
    for (;;) {
        auto r = detail::scalar_spectrum_once(cur, parity);
        if (r.zero_count <= 1 || parity != Parity::full) return r;
        if (2 * cur.size() > 2048) throw NumericalError("scalar_spectrum: ambiguous zero eigenvalue");
        cur = construct_profile(cur.params, cur.spec, 2 * cur.size());
    }
}

/// Spectrum of the block operator of the traveling pair (phi_c, -c phi_c').
[[nodiscard]] inline SpectrumReport block_spectrum(const WaveProfile& p, Parity parity = Parity::full)
{
    require(p.size() >= 256, "block_spectrum: N must be >= 256");
    WaveProfile cur = p;
    for (;;) {
        auto r = detail::block_spectrum_once(cur, parity);
        if (r.zero_count <= 1 || parity != Parity::full) return r;
        if (2 * cur.size() > 2048) throw NumericalError("block_spectrum: ambiguous zero eigenvalue");
        cur = construct_profile(cur.params, cur.spec, 2 * cur.size());
    }
}

struct QuadraticFormCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;  // |lhs - rhs| / max(|lhs|, |rhs|, tiny)
};

/// Compares h <M v, v> with int (omega v1'^2 + V'' v1^2) + int (c v1' + v2)^2.
/// The Nyquist mode of v1 is removed first; on that mode D1^T D1 and -D2 differ.
[[nodiscard]] inline QuadraticFormCheck quadratic_form_check(const WaveProfile& p, std::span<const double> v1_in,
                                                             std::span<const double> v2)
{
    const int N = p.size();
    require(static_cast<int>(v1_in.size()) == N && static_cast<int>(v2.size()) == N,
            "quadratic_form_check: vector sizes must match the grid");
    std::vector<double> v1(v1_in.begin(), v1_in.end());
    double nyq = 0.0;
    for (int j = 0; j < N; ++j) nyq += v1[static_cast<std::size_t>(j)] * ((j % 2) ? -1.0 : 1.0);
    nyq /= N;
    for (int j = 0; j < N; ++j) v1[static_cast<std::size_t>(j)] -= nyq * ((j % 2) ? -1.0 : 1.0);

    const double h = p.spacing();
    const Eigen::MatrixXd M = block_operator(p);
    Eigen::VectorXd v(2 * N);
    for (int j = 0; j < N; ++j) {
        v(j) = v1[static_cast<std::size_t>(j)];
        v(N + j) = v2[static_cast<std::size_t>(j)];
    }
    QuadraticFormCheck q;
    q.lhs = h * v.dot(M * v);
    PairedCirculant D(first_derivative_kernel(N, p.params.L), true);
    const auto dv1 = D(v1);
    const double w = p.params.omega, c = p.params.c;
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        const double a = c * dv1[jj] + v2[jj];
        s += w * dv1[jj] * dv1[jj] + eval_derivative(p.spec, p.phi[jj], 2) * v1[jj] * v1[jj] + a * a;
    }
    q.rhs = h * s;
    q.residual = std::abs(q.lhs - q.rhs) / std::max({std::abs(q.lhs), std::abs(q.rhs), 1e-300});
    return q;
}

enum class OscillationClass { ground, lower, upper, non_simple };

[[nodiscard]] inline std::string oscillation_class_name(OscillationClass c)
{
    switch (c) {
    case OscillationClass::ground: return "ground";
    case OscillationClass::lower: return "lower";
    case OscillationClass::upper: return "upper";
    default: return "non_simple";
    }
}

struct OscillationResult {
    int k = 0;
    double eigenvalue = 0.0;
    int zeros = 0;           // 2m
    double theta = 0.0;
    OscillationClass classification = OscillationClass::non_simple;
    int index = -1;          // 0, 2m-1 or 2m; -1 when non-simple
};

namespace detail {

inline int periodic_sign_changes(std::span<const double> u)
{
    double mx = 0.0;
    for (double v : u) mx = std::max(mx, std::abs(v));
    const double tiny = 1e-12 * mx;
    std::vector<int> s;
    for (double v : u)
        if (std::abs(v) > tiny) s.push_back(v > 0 ? 1 : -1);
    int c = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] != s[(i + 1) % s.size()]) ++c;
    return c;
}

} // namespace detail

/// Zero count of the k-th eigenfunction and the Floquet constant of
/// L_c - sigma_k, which places sigma_k at position 2m-1 (theta < 0) or 2m (theta > 0).
[[nodiscard]] inline OscillationResult oscillation_index(const WaveProfile& p, const SpectrumReport& rep, int k)
{
    require(rep.op == "scalar" && rep.parity == Parity::full, "oscillation_index needs a full scalar spectrum");
    require(rep.grid_size == p.size(), "oscillation_index: spectrum and profile grids differ");
    require(k >= 0 && k < static_cast<int>(rep.eigenvalues.size()), "oscillation_index: k out of range");
    const int N = p.size();
    const double h = p.spacing();
    const auto& w = p.params;
    if (near_separatrix(p.spec, w))
        throw NumericalError("oscillation_index: level too close to the separatrix for a shooting integration");

    OscillationResult out;
    out.k = k;
    out.eigenvalue = rep.eigenvalues[static_cast<std::size_t>(k)];

    std::vector<double> q(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) q[static_cast<std::size_t>(j)] = rep.eigenvectors(j, k);
    // scale so that int q^2 = int phi'^2
    double nq = 0.0;
    for (double v : q) nq += v * v;
    const double scale = std::sqrt(dphi_squared(p) / (h * nq));
    for (auto& v : q) v *= scale;

    int zeros = detail::periodic_sign_changes(q);
    if (zeros % 2 == 1) {
        FourierTools ft(N, w.L);
        zeros = detail::periodic_sign_changes(ft.upsample(q, 4));
        if (zeros % 2 == 1) throw NumericalError("oscillation_index: odd zero count after refinement");
    }
    out.zeros = zeros;

    int j0 = 0;
    for (int j = 1; j < N; ++j)
        if (std::abs(q[static_cast<std::size_t>(j)]) > std::abs(q[static_cast<std::size_t>(j0)])) j0 = j;
    const double q0 = q[static_cast<std::size_t>(j0)];

    // phi from 0 to x0, then (phi, phi', y, y') over one period from x0
    const int substeps = 32;
    const double dt = h / substeps;
    const double sigma = out.eigenvalue;
    auto f = [&](double, const std::array<double, 4>& y) { return detail::floquet_rhs(p.spec, w.omega, y, sigma); };
    std::array<double, 4> y{0.0, std::sqrt(2.0 * w.beta), 0.0, 0.0};
    for (int s = 0; s < j0 * substeps; ++s) y = rk4_step<4>(f, 0.0, y, dt);
    y[2] = 0.0;
    y[3] = 1.0 / q0;
    for (int s = 0; s < N * substeps; ++s) y = rk4_step<4>(f, 0.0, y, dt);
    out.theta = y[2] / q0;

    const double theta_scale = dphi_squared(p) / (w.L * w.L);
    if (k == 0 && zeros == 0) {
        out.classification = OscillationClass::ground;
        out.index = 0;
    } else if (std::abs(out.theta) * theta_scale < 1e-8) {
        out.classification = OscillationClass::non_simple;
    } else if (out.theta < 0.0) {
        out.classification = OscillationClass::lower;
        out.index = zeros - 1;
    } else {
        out.classification = OscillationClass::upper;
        out.index = zeros;
    }
    return out;
}

} // namespace kgw
