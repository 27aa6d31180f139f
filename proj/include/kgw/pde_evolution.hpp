#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "kgw/errors.hpp"
#include "kgw/gss_stability.hpp"
#include "kgw/hill_spectrum.hpp"
#include "kgw/potential.hpp"
#include "kgw/spectral.hpp"
#include "kgw/wave_family.hpp"

namespace kgw {

enum class ParityTag { none, odd_odd };

/// (phi1, phi2) = (u, u_t) on x_j = j L / N at time t.
struct FieldState {
    double t = 0.0;
    double L = 0.0;
    std::vector<double> phi1;
    std::vector<double> phi2;
    ParityTag parity = ParityTag::none;

    [[nodiscard]] int size() const { return static_cast<int>(phi1.size()); }
};

struct OrbitalDistance {
    double raw = 0.0;        // no shift
    double modulated = 0.0;  // inf over shifts
    double shift = 0.0;      // minimizing shift
};

/// Discrete X-norm of (e1, e2): h sum (e1^2 + (D1 e1)^2 + e2^2), square-rooted.
[[nodiscard]] inline double x_norm(std::span<const double> e1, std::span<const double> e2, double L)
{
    const int N = static_cast<int>(e1.size());
    PairedCirculant D(first_derivative_kernel(N, L), true);
    const auto d = D(e1);
    double s = 0.0;
    for (int j = 0; j < N; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        s += e1[jj] * e1[jj] + d[jj] * d[jj] + e2[jj] * e2[jj];
    }
    return std::sqrt(s * L / N);
}

/// Distance in the X-norm from a state to the translates of a reference pair.
class OrbitDistance {
public:
    OrbitDistance(std::vector<double> ref1, std::vector<double> ref2, double L)
        : N_(static_cast<int>(ref1.size())), L_(L), ft_(static_cast<int>(ref1.size()), L)
    {
        require(ref2.size() == ref1.size(), "OrbitDistance: reference components differ in size");
        w1_ = ft_.forward(ref1);
        w2_ = ft_.forward(ref2);
        weight1_.resize(static_cast<std::size_t>(N_));
        for (int k = 0; k < N_; ++k) {
            const double kap = k == N_ / 2 ? 0.0 : ft_.kappa(k);
            weight1_[static_cast<std::size_t>(k)] = 1.0 + kap * kap;
        }
    }

    [[nodiscard]] OrbitalDistance operator()(const FieldState& s) const
    {
        require(s.size() == N_, "OrbitDistance: grid size mismatch");
        const auto u1 = ft_.forward(s.phi1);
        const auto u2 = ft_.forward(s.phi2);
        const double scale = L_ / (static_cast<double>(N_) * N_);

        // cross-correlation G_k, C(rho) = scale * Re sum_k G_k e^{i kappa_k rho}
        std::vector<std::complex<double>> G(static_cast<std::size_t>(N_));
        for (int k = 0; k < N_; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            G[kk] = weight1_[kk] * u1[kk] * std::conj(w1_[kk]) + u2[kk] * std::conj(w2_[kk]);
        }
        std::vector<std::complex<double>> Gc = G;
        const auto grid_c = ft_.inverse(Gc);  // (1/N) sum_k G_k e^{2 pi i k s / N}
        auto at_grid = [&](int sidx) { return scale * N_ * grid_c[static_cast<std::size_t>((sidx % N_ + N_) % N_)]; };

        int best = 0;
        for (int sidx = 1; sidx < N_; ++sidx)
            if (at_grid(sidx) > at_grid(best)) best = sidx;

        auto C = [&](double rho, int deriv) {
            double r = 0.0;
            for (int k = 0; k < N_; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const double kap = ft_.kappa(k);
                if (k == N_ / 2) {
                    const double g = G[kk].real();
                    if (deriv == 0) r += g * std::cos(kap * rho);
                    else if (deriv == 1) r -= g * kap * std::sin(kap * rho);
                    else r -= g * kap * kap * std::cos(kap * rho);
                    continue;
                }
                const std::complex<double> e = std::polar(1.0, kap * rho);
                std::complex<double> t = G[kk] * e;
                if (deriv == 1) t *= std::complex<double>(0.0, kap);
                if (deriv == 2) t *= -kap * kap;
                r += t.real();
            }
            return scale * r;
        };

        const double dx = L_ / N_;
        const double cm = at_grid(best - 1), c0 = at_grid(best), cp = at_grid(best + 1);
        const double den = cm - 2.0 * c0 + cp;
        double off = den < 0.0 ? 0.5 * (cm - cp) / den : 0.0;
        off = std::clamp(off, -1.0, 1.0);
        double rho = (best + off) * dx;
        double cbest = C(rho, 0);
        for (int it = 0; it < 4; ++it) {
            const double d1 = C(rho, 1), d2 = C(rho, 2);
            if (!(d2 < 0.0)) break;
            const double next = rho - d1 / d2;
            const double cn = C(next, 0);
            if (!(cn > cbest)) break;
            rho = next;
            cbest = cn;
        }
        if (c0 > cbest) {
            cbest = c0;
            rho = best * dx;
        }
        if (!(cbest > at_grid(0))) rho = 0.0;
        // distances from the coefficient differences; a + |w|^2 - 2C would floor at sqrt(eps) |u|
        auto dist_at = [&](double r) {
            std::vector<std::complex<double>> d1(u1.size()), d2(u2.size());
            for (int k = 0; k < N_; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                const double kap = ft_.kappa(k);
                const std::complex<double> e =
                    k == N_ / 2 ? std::complex<double>(std::cos(kap * r), 0.0) : std::polar(1.0, -kap * r);
                d1[kk] = u1[kk] - w1_[kk] * e;
                d2[kk] = u2[kk] - w2_[kk] * e;
            }
            return std::sqrt(norm2(d1, d2));
        };
        OrbitalDistance d;
        d.raw = dist_at(0.0);
        d.modulated = rho == 0.0 ? d.raw : std::min(dist_at(rho), d.raw);
        d.shift = std::fmod(rho, L_);
        if (d.shift < 0.0) d.shift += L_;
        return d;
    }

private:
    [[nodiscard]] double norm2(const std::vector<std::complex<double>>& a,
                               const std::vector<std::complex<double>>& b) const
    {
        double s = 0.0;
        for (int k = 0; k < N_; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            s += weight1_[kk] * std::norm(a[kk]) + std::norm(b[kk]);
        }
        return s * L_ / (static_cast<double>(N_) * N_);
    }

    int N_;
    double L_;
    FourierTools ft_;
    std::vector<std::complex<double>> w1_, w2_;
    std::vector<double> weight1_;
};

struct TrajectorySample {
    double t = 0.0;
    double energy = 0.0;
    double momentum = 0.0;
    double parity_defect = 0.0;
    std::optional<OrbitalDistance> distance;
};

struct TrajectorySummary {
    std::vector<TrajectorySample> samples;
    double t_final = 0.0;
    int steps = 0;
    double dt = 0.0;
    double energy_drift_max = 0.0;    // relative to |E(0)|
    double momentum_drift_max = 0.0;  // relative to max(|P(0)|, |E(0)|)
    double parity_defect_max = 0.0;
    bool escaped = false;
    std::optional<double> threshold_time;
};

/// What evolve records and when.
struct Monitors {
    double sample_every = 1.0;
    std::optional<OrbitDistance> reference;
    std::optional<double> distance_threshold;  // record the first time modulated > threshold
    bool stop_at_threshold = false;
    std::string snapshot_path;                 // CSV t,x,phi1,phi2; empty disables
    double snapshot_every = 0.0;
};

/// Stormer-Verlet evolution of u_tt = u_xx - V'(u) on the periodic grid.
class Evolver {
public:
    Evolver(const PotentialSpec& spec, int N, double L)
        : spec_(spec), N_(N), L_(L), d2_(second_derivative_kernel(N, L), false)
    {
        validate(spec);
        require(N >= 4 && N % 2 == 0, "Evolver: N must be even and >= 4");
        require(L > 0.0, "Evolver: L must be positive");
        acc_.resize(static_cast<std::size_t>(N));
    }

    [[nodiscard]] double max_dt() const { return 0.5 * L_ / N_; }
    [[nodiscard]] const PotentialSpec& spec() const { return spec_; }

    /// a(u) = D2 u - V'(u).
    void acceleration(std::span<const double> u, std::span<double> a)
    {
        d2_.apply(u, a);
        for (int j = 0; j < N_; ++j) a[static_cast<std::size_t>(j)] -= potential_force(spec_, u[static_cast<std::size_t>(j)]);
    }

    /// One kick-drift-kick step. Returns false when |phi1| leaves the escape guard.
    bool step(FieldState& s, double dt)
    {
        check(s, dt);
        acceleration(s.phi1, acc_);
        return advance(s, dt);
    }

    [[nodiscard]] TrajectorySummary evolve(FieldState& s, double T, double dt, const Monitors& mon = {})
    {
        check(s, dt);
        require(T >= 0.0, "evolve: T must be nonnegative");
        TrajectorySummary out;
        const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
        const double h = steps > 0 ? T / steps : dt;
        out.dt = h;
        const double t0 = s.t;
        const int every = std::max(1, static_cast<int>(std::llround(mon.sample_every / h)));
        const int snap_every = mon.snapshot_every > 0.0 ? std::max(1, static_cast<int>(std::llround(mon.snapshot_every / h))) : 0;
        std::ofstream snap;
        if (!mon.snapshot_path.empty() && snap_every > 0) {
            snap.open(mon.snapshot_path);
            if (!snap) throw PreconditionError("cannot write snapshot file " + mon.snapshot_path);
            snap << "t,x,phi1,phi2\n";
            snap.precision(17);
        }
        const auto f0 = conserved_functionals(spec_, s.phi1, s.phi2, L_);
        auto sample = [&]() {
            TrajectorySample r;
            r.t = s.t;
            const auto f = conserved_functionals(spec_, s.phi1, s.phi2, L_);
            r.energy = f.energy;
            r.momentum = f.momentum;
            r.parity_defect = std::max(odd_defect(s.phi1), odd_defect(s.phi2));
            if (mon.reference) r.distance = (*mon.reference)(s);
            const double escale = std::max(std::abs(f0.energy), 1e-300);
            out.energy_drift_max = std::max(out.energy_drift_max, std::abs(f.energy - f0.energy) / escale);
            out.momentum_drift_max = std::max(out.momentum_drift_max,
                                              std::abs(f.momentum - f0.momentum)
                                                  / std::max({std::abs(f0.momentum), escale}));
            out.parity_defect_max = std::max(out.parity_defect_max, r.parity_defect);
            if (mon.distance_threshold && r.distance && !out.threshold_time
                && r.distance->modulated > *mon.distance_threshold)
                out.threshold_time = s.t;
            out.samples.push_back(r);
        };
        auto write_snapshot = [&]() {
            for (int j = 0; j < N_; ++j)
                snap << s.t << ',' << j * L_ / N_ << ',' << s.phi1[static_cast<std::size_t>(j)] << ','
                     << s.phi2[static_cast<std::size_t>(j)] << '\n';
        };
        sample();
        if (snap.is_open()) write_snapshot();
        acceleration(s.phi1, acc_);
        for (int n = 1; n <= steps; ++n) {
            const bool ok = advance(s, h);
            s.t = t0 + n * h;
            out.steps = n;
            if (!ok) {
                out.escaped = true;
                sample();
                break;
            }
            if (n % every == 0 || n == steps) {
                sample();
                if (mon.stop_at_threshold && out.threshold_time) break;
            }
            if (snap.is_open() && (n % snap_every == 0 || n == steps)) write_snapshot();
        }
        out.t_final = s.t;
        return out;
    }

private:
    void check(const FieldState& s, double dt) const
    {
        require(s.size() == N_ && s.phi2.size() == s.phi1.size(), "FieldState grid does not match the evolver");
        require(std::abs(s.L - L_) <= 1e-12 * L_, "FieldState period does not match the evolver");
        require(dt != 0.0 && std::abs(dt) <= max_dt() * (1.0 + 1e-12), "time step must satisfy 0 < |dt| <= L/(2N)");
    }

    /// Kick-drift-kick using the acceleration already held in acc_.
    bool advance(FieldState& s, double dt)
    {
        const double hh = 0.5 * dt;
        for (int j = 0; j < N_; ++j) s.phi2[static_cast<std::size_t>(j)] += hh * acc_[static_cast<std::size_t>(j)];
        double mx = 0.0;
        for (int j = 0; j < N_; ++j) {
            auto& u = s.phi1[static_cast<std::size_t>(j)];
            u += dt * s.phi2[static_cast<std::size_t>(j)];
            mx = std::max(mx, std::abs(u));
        }
        acceleration(s.phi1, acc_);
        for (int j = 0; j < N_; ++j) s.phi2[static_cast<std::size_t>(j)] += hh * acc_[static_cast<std::size_t>(j)];
        if (s.parity == ParityTag::odd_odd) {
            make_odd(s.phi1);
            make_odd(s.phi2);
        }
        s.t += dt;
        return !(mx > 2.0 * basin_half_width(spec_)) && std::isfinite(mx);
    }

    PotentialSpec spec_;
    int N_;
    double L_;
    PairedCirculant d2_;
    std::vector<double> acc_;
};

/// Single step on a copy of the state.
[[nodiscard]] inline FieldState step(const FieldState& s, const PotentialSpec& spec, double dt, bool* escaped = nullptr)
{
    Evolver ev(spec, s.size(), s.L);
    FieldState out = s;
    const bool ok = ev.step(out, dt);
    if (escaped) *escaped = !ok;
    return out;
}

[[nodiscard]] inline TrajectorySummary evolve(FieldState& s, const PotentialSpec& spec, double T, double dt,
                                              const Monitors& mon = {})
{
    Evolver ev(spec, s.size(), s.L);
    return ev.evolve(s, T, dt, mon);
}

/// Initial state (phi_c, -c phi_c') from a profile.
[[nodiscard]] inline FieldState wave_state(const WaveProfile& p)
{
    FieldState s;
    s.L = p.params.L;
    const auto pair = traveling_pair(p);
    s.phi1 = pair[0];
    s.phi2 = pair[1];
    return s;
}

enum class ExperimentMode { standing_odd, traveling_generic };

[[nodiscard]] inline std::string mode_name(ExperimentMode m)
{
    return m == ExperimentMode::standing_odd ? "standing_odd" : "traveling_generic";
}

struct ExperimentOptions {
    double c = 0.3;           // traveling speed; standing mode uses 0
    int N = 256;
    double dt = 0.0;          // 0 selects L / (4N)
    double sample_every = 0.25;
    bool stop_at_threshold = true;
};

struct ExperimentRecord {
    ExperimentMode mode = ExperimentMode::standing_odd;
    PotentialSpec spec;
    double L = 0.0;
    double c = 0.0;
    double delta = 0.0;
    double T = 0.0;
    std::uint64_t seed = 0;
    int N = 0;
    double dt = 0.0;
    double beta = 0.0;
    double initial_distance = 0.0;
    double sup_deviation = 0.0;        // standing: sup_t ||eps(t)||_X
    double constant_C = 0.0;           // sup_deviation / delta
    std::optional<double> exceed_time; // traveling: first t with modulated > 10 delta
    double max_modulated = 0.0;
    double growth_rate = 0.0;          // fitted slope of log(modulated)
    double linear_growth_rate = 0.0;   // max Re of the linearization in the moving frame
    double block_negative_eigenvalue = 0.0;
    double energy_drift = 0.0;
    double parity_defect = 0.0;
    double t_final = 0.0;
    bool escaped = false;
    std::string verdict;
    std::vector<double> times;
    std::vector<double> distances;
};

namespace detail {

/// Deterministic uniform draw on [-1, 1) from a 64-bit engine.
inline double uniform_pm1(std::mt19937_64& rng)
{
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

inline std::vector<double> random_modes(std::mt19937_64& rng, int N, bool with_cos)
{
    std::vector<double> u(static_cast<std::size_t>(N), 0.0);
    for (int k = 1; k <= 8; ++k) {
        const double a = uniform_pm1(rng);
        const double b = with_cos ? uniform_pm1(rng) : 0.0;
        for (int j = 0; j < N; ++j) {
            const double th = 2.0 * std::numbers::pi * k * j / N;
            u[static_cast<std::size_t>(j)] += a * std::sin(th) + b * std::cos(th);
        }
    }
    return u;
}

inline void scale_to(std::vector<double>& e1, std::vector<double>& e2, double L, double target)
{
    const double n = x_norm(e1, e2, L);
    if (n == 0.0) return;
    for (auto& v : e1) v *= target / n;
    for (auto& v : e2) v *= target / n;
}

/// Largest real part of the spectrum of J L_c, the linear flow in the moving frame.
inline double moving_frame_growth_rate(const WaveProfile& p)
{
    const int N = p.size();
    const Eigen::MatrixXd M = block_operator(p);
    Eigen::MatrixXd A(2 * N, 2 * N);
    A.topRows(N) = M.bottomRows(N);
    A.bottomRows(N) = -M.topRows(N);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw NumericalError("moving-frame eigensolver did not converge");
    double g = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) g = std::max(g, es.eigenvalues()(i).real());
    return g;
}

inline double fit_log_slope(const std::vector<double>& t, const std::vector<double>& d, double lo, double hi)
{
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (d[i] < lo || d[i] > hi) continue;
        const double y = std::log(d[i]);
        st += t[i];
        sy += y;
        stt += t[i] * t[i];
        sty += t[i] * y;
        ++n;
    }
    if (n < 3) return 0.0;
    const double den = n * stt - st * st;
    return den != 0.0 ? (n * sty - st * sy) / den : 0.0;
}

} // namespace detail

/// Perturbs a standing (odd subspace) or traveling wave by delta and evolves it.
[[nodiscard]] inline ExperimentRecord stability_experiment(const PotentialSpec& spec, double L, double delta,
                                                           ExperimentMode mode, double T, std::uint64_t seed,
                                                           const ExperimentOptions& opt = {})
{
    validate(spec);
    require(delta >= 0.0 && delta <= 1e-2, "delta must lie in [0, 1e-2]");
    require(T > 0.0, "T must be positive");
    const double c = mode == ExperimentMode::standing_odd ? 0.0 : opt.c;
    require(admissible(spec, c, L), "(spec, c, L) admits no periodic wave");

    ExperimentRecord r;
    r.mode = mode;
    r.spec = spec;
    r.L = L;
    r.c = c;
    r.delta = delta;
    r.T = T;
    r.seed = seed;
    r.N = opt.N;
    r.dt = opt.dt > 0.0 ? opt.dt : L / (4.0 * opt.N);

    const auto w = solve_beta(spec, c, L);
    r.beta = w.beta;
    const auto prof = construct_profile(w, spec, opt.N);
    FieldState s = wave_state(prof);
    std::mt19937_64 rng(seed);
    std::vector<double> e1, e2;

    if (mode == ExperimentMode::standing_odd) {
        e1 = detail::random_modes(rng, opt.N, false);
        e2 = detail::random_modes(rng, opt.N, false);
        make_odd(e1);
        make_odd(e2);
        s.parity = ParityTag::odd_odd;
    } else {
        e1 = detail::random_modes(rng, opt.N, true);
        e2 = detail::random_modes(rng, opt.N, true);
        detail::scale_to(e1, e2, L, 1.0);
        const auto blk = block_spectrum(prof);
        r.block_negative_eigenvalue = blk.eigenvalues.front();
        std::vector<double> n1(static_cast<std::size_t>(opt.N)), n2(static_cast<std::size_t>(opt.N));
        for (int j = 0; j < opt.N; ++j) {
            n1[static_cast<std::size_t>(j)] = blk.eigenvectors(j, 0);
            n2[static_cast<std::size_t>(j)] = blk.eigenvectors(opt.N + j, 0);
        }
        detail::scale_to(n1, n2, L, 1.0);
        for (int j = 0; j < opt.N; ++j) {
            e1[static_cast<std::size_t>(j)] += n1[static_cast<std::size_t>(j)];
            e2[static_cast<std::size_t>(j)] += n2[static_cast<std::size_t>(j)];
        }
        r.linear_growth_rate = detail::moving_frame_growth_rate(prof);
    }
    detail::scale_to(e1, e2, L, delta);
    for (int j = 0; j < opt.N; ++j) {
        s.phi1[static_cast<std::size_t>(j)] += e1[static_cast<std::size_t>(j)];
        s.phi2[static_cast<std::size_t>(j)] += e2[static_cast<std::size_t>(j)];
    }

    Monitors mon;
    mon.sample_every = opt.sample_every;
    const auto ref = traveling_pair(prof);
    mon.reference = OrbitDistance(ref[0], ref[1], L);
    if (mode == ExperimentMode::traveling_generic && delta > 0.0) {
        mon.distance_threshold = 10.0 * delta;
        mon.stop_at_threshold = opt.stop_at_threshold;
    }
    Evolver ev(spec, opt.N, L);
    const auto sum = ev.evolve(s, T, r.dt, mon);

    r.energy_drift = sum.energy_drift_max;
    r.parity_defect = sum.parity_defect_max;
    r.t_final = sum.t_final;
    r.escaped = sum.escaped;
    r.exceed_time = sum.threshold_time;
    for (const auto& smp : sum.samples) {
        const double d = mode == ExperimentMode::standing_odd ? smp.distance->raw : smp.distance->modulated;
        r.times.push_back(smp.t);
        r.distances.push_back(d);
    }
    r.initial_distance = r.distances.empty() ? 0.0 : r.distances.front();
    for (double d : r.distances) r.sup_deviation = std::max(r.sup_deviation, d);
    r.max_modulated = r.sup_deviation;
    r.constant_C = delta > 0.0 ? r.sup_deviation / delta : 0.0;

    if (mode == ExperimentMode::standing_odd) {
        r.verdict = r.escaped ? "escaped" : "bounded";
    } else {
        r.growth_rate = detail::fit_log_slope(r.times, r.distances, 2.0 * delta, 10.0 * delta);
        if (r.escaped)
            r.verdict = "escaped";
        else if (r.exceed_time)
            r.verdict = "unstable";
        else
            r.verdict = "no_growth_detected";
    }
    return r;
}

} // namespace kgw
