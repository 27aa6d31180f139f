/// kgw: command-line front end. JSON (schema "1") or headered CSV on stdout or --output.
/// Exit status: 0 success, 1 precondition violation or bad flags, 2 numerical failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kgw/kgw.hpp"

using namespace kgw;

namespace {

struct Common {
    std::string family = "phi4n";
    int n = 1;
    std::string format = "json";
    std::string output;

    [[nodiscard]] PotentialSpec spec() const
    {
        PotentialSpec s{parse_family(family), n};
        validate(s);
        return s;
    }
    [[nodiscard]] bool csv() const { return format == "csv"; }
};

/// --output relative to $KGW_OUTPUT_DIR when that is set.
std::string resolve_output(const std::string& path)
{
    if (path.empty()) return path;
    const char* dir = std::getenv("KGW_OUTPUT_DIR");
    std::filesystem::path p(path);
    if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
    return p.string();
}

void emit(const Common& o, const std::function<void(std::ostream&)>& body)
{
    const auto path = resolve_output(o.output);
    if (path.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    auto f = open_output(path);
    body(f);
    if (!f) throw PreconditionError("failed writing " + path);
}

void emit_json(const Common& o, const std::string& kind, Json payload)
{
    const auto doc = document(kind, std::move(payload));
    emit(o, [&](std::ostream& os) { os << dump_json(doc); });
}

void add_common(CLI::App* sub, Common& o, bool with_n = true)
{
    sub->add_option("--family", o.family, "phi4n or phi2n2")->capture_default_str();
    if (with_n) sub->add_option("--n", o.n, "model index n >= 1")->capture_default_str();
    sub->add_option("--format", o.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    sub->add_option("--output", o.output, "output file (default stdout; relative to $KGW_OUTPUT_DIR if set)");
}

double single(const std::vector<double>& v, const char* name)
{
    if (v.size() != 1) throw PreconditionError(std::string("--") + name + " takes a single value here");
    return v.front();
}

std::string csv_row(std::initializer_list<double> xs)
{
    std::string s;
    bool first = true;
    for (double x : xs) {
        if (!first) s += ',';
        s += format_double(x);
        first = false;
    }
    return s + '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Periodic waves of the phi^4n and phi^(2n+2) Klein-Gordon models"};
    app.require_subcommand(1);
    Common o;

    // chicone
    int points = 2001;
    auto* chi = app.add_subcommand("chicone", "convexity quantity and lemma inequalities on a basin grid");
    add_common(chi, o);
    chi->add_option("--points", points, "grid points")->capture_default_str();

    // period-map
    double omega = 1.0;
    int map_points = 40;
    auto* pm = app.add_subcommand("period-map", "beta vs L table with dL/dbeta on a geometric grid");
    add_common(pm, o);
    pm->add_option("--omega", omega, "omega = 1 - c^2")->capture_default_str();
    pm->add_option("--points", map_points, "grid points")->capture_default_str();

    // shared wave parameters
    std::vector<double> cs{0.0};
    double L = 10.0;
    std::vector<double> betas;
    int N = 512;

    auto* wv = app.add_subcommand("wave", "sampled profile of one periodic wave");
    add_common(wv, o);
    wv->add_option("--c", cs, "speed")->delimiter(',');
    wv->add_option("--L", L, "period")->capture_default_str();
    wv->add_option("--beta", betas, "energy level instead of L")->delimiter(',');
    wv->add_option("--N", N, "grid size")->capture_default_str();

    std::string op = "both", parity = "full";
    int count = 4;
    auto* sp = app.add_subcommand("spectrum", "scalar and block linearized spectra");
    add_common(sp, o);
    sp->add_option("--c", cs, "speed")->delimiter(',');
    sp->add_option("--L", L, "period")->capture_default_str();
    sp->add_option("--N", N, "grid size")->capture_default_str();
    sp->add_option("--op", op, "scalar, block or both")->check(CLI::IsMember({"scalar", "block", "both"}));
    sp->add_option("--parity", parity, "full, odd or even")->check(CLI::IsMember({"full", "odd", "even"}));
    sp->add_option("--count", count, "eigenfunctions written in csv mode")->capture_default_str();

    auto* th = app.add_subcommand("theta", "Floquet constant against -dL/dbeta");
    add_common(th, o);
    th->add_option("--c", cs, "speeds (comma list)")->delimiter(',');
    th->add_option("--L", L, "period")->capture_default_str();
    th->add_option("--N", N, "grid size")->capture_default_str();

    double h = 1e-3;
    auto* gs = app.add_subcommand("gss", "d''(c) sweep over speeds");
    add_common(gs, o);
    gs->add_option("--c", cs, "speeds (comma list)")->delimiter(',');
    gs->add_option("--L", L, "period")->capture_default_str();
    gs->add_option("--step", h, "speed stencil step h")->capture_default_str();
    gs->add_option("--N", N, "grid size")->capture_default_str();

    double dt = 0.0, T = 10.0, delta = 0.0, sample_every = 0.5, snapshot_every = 0.0;
    std::uint64_t seed = 1;
    std::string snapshot;
    auto* ev = app.add_subcommand("evolve", "evolve a (perturbed) traveling wave and summarize the trajectory");
    add_common(ev, o);
    ev->add_option("--c", cs, "speed")->delimiter(',');
    ev->add_option("--L", L, "period")->capture_default_str();
    ev->add_option("--N", N, "grid size")->capture_default_str();
    ev->add_option("--dt", dt, "time step (0 selects L/(4N))")->capture_default_str();
    ev->add_option("--T", T, "final time")->capture_default_str();
    ev->add_option("--delta", delta, "X-norm of a random perturbation")->capture_default_str();
    ev->add_option("--seed", seed, "perturbation seed")->capture_default_str();
    ev->add_option("--sample-every", sample_every, "sampling interval")->capture_default_str();
    ev->add_option("--snapshot", snapshot, "CSV file for full-field snapshots (t,x,phi1,phi2)");
    ev->add_option("--snapshot-every", snapshot_every, "snapshot interval")->capture_default_str();

    std::string mode = "standing_odd";
    std::vector<double> deltas{1e-3};
    auto* ex = app.add_subcommand("experiment", "orbital stability experiments");
    add_common(ex, o);
    ex->add_option("--mode", mode, "standing_odd or traveling_generic")
        ->check(CLI::IsMember({"standing_odd", "traveling_generic"}));
    ex->add_option("--c", cs, "speed (traveling mode)")->delimiter(',');
    ex->add_option("--L", L, "period")->capture_default_str();
    ex->add_option("--N", N, "grid size")->capture_default_str();
    ex->add_option("--dt", dt, "time step (0 selects L/(4N))")->capture_default_str();
    ex->add_option("--T", T, "final time")->capture_default_str();
    ex->add_option("--delta", deltas, "perturbation sizes (comma list)")->delimiter(',');
    ex->add_option("--seed", seed, "perturbation seed")->capture_default_str();

    bool approximate = false;
    auto* id = app.add_subcommand("identities", "coefficient inequalities, index-set counts, telescoping sum");
    add_common(id, o);
    id->add_flag("--float", approximate, "double coefficients instead of rationals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*chi) {
            const auto s = o.spec();
            const double a = basin_half_width(s) * 0.998;
            const auto grid = symmetric_grid(a, static_cast<std::size_t>(points));
            std::vector<double> q, v;
            for (double x : grid) {
                q.push_back(chicone_quantity(s, x));
                v.push_back(s.family == Family::phi4n ? vn_numerator(s.n, x) : phi2n2_chicone_bracket(s.n, x));
            }
            if (o.csv()) {
                emit(o, [&](std::ostream& os) {
                    write_csv(os, {"x", "chicone", s.family == Family::phi4n ? "numerator" : "bracket"}, {grid, q, v});
                });
            } else {
                Json j = {{"spec", to_json(s)}, {"grid_points", points}, {"min_chicone", *std::min_element(q.begin(), q.end())},
                          {"min_numerator", *std::min_element(v.begin(), v.end())}};
                if (s.family == Family::phi4n) {
                    j["limit_at_origin"] = chicone_limit(s);
                    j["lemma"] = to_json(check_lemma_inequalities(s.n, grid));
                }
                emit_json(o, "chicone", j);
            }
        } else if (*pm) {
            const auto s = o.spec();
            require(map_points >= 2, "--points must be >= 2");
            const double e = max_energy(s, omega);
            std::vector<double> b, l, d;
            for (int i = 0; i < map_points; ++i) {
                const double lo = 1e-6, hi = 1.0 - 1e-4;  // slope stencil is 2e-5 beta wide
                const double beta = i == map_points - 1 ? hi * e : lo * std::pow(hi / lo, i / (map_points - 1.0)) * e;
                b.push_back(beta);
                l.push_back(period(s, omega, beta));
                d.push_back(period_slope(s, omega, beta));
            }
            bool inc = true;
            for (std::size_t i = 1; i < l.size(); ++i) inc = inc && l[i] > l[i - 1];
            if (o.csv())
                emit(o, [&](std::ostream& os) { write_csv(os, {"beta", "L", "dL_dbeta"}, {b, l, d}); });
            else
                emit_json(o, "period-map",
                          {{"spec", to_json(s)}, {"omega", omega}, {"E_star", e}, {"beta", b}, {"L", l},
                           {"dL_dbeta", d}, {"strictly_increasing", inc}});
        } else if (*wv) {
            const auto s = o.spec();
            const double c = single(cs, "c");
            WaveParams w;
            if (!betas.empty()) {
                const double omg = omega_of(c);
                const double beta = single(betas, "beta");
                w = {c, omg, period(s, omg, beta), beta, max_energy(s, omg) - beta};
            } else {
                w = solve_beta(s, c, L);
            }
            const auto p = construct_profile(w, s, N);
            if (o.csv())
                emit(o, [&](std::ostream& os) { write_profile_csv(os, p); });
            else {
                auto j = to_json(p);
                j["energy_residual"] = energy_residual(p);
                emit_json(o, "wave", j);
            }
        } else if (*sp) {
            const auto s = o.spec();
            const double c = single(cs, "c");
            const auto p = construct_profile(solve_beta(s, c, L), s, N);
            const Parity par = parity == "odd" ? Parity::odd : parity == "even" ? Parity::even : Parity::full;
            std::vector<SpectrumReport> reps;
            if (op != "block") reps.push_back(scalar_spectrum(p, par));
            if (op != "scalar") reps.push_back(block_spectrum(p, par));
            if (o.csv()) {
                require(reps.size() == 1, "csv output needs --op scalar or --op block");
                emit(o, [&](std::ostream& os) { write_eigenfunctions_csv(os, reps.front(), L, count); });
            } else {
                Json arr = Json::array();
                for (const auto& r : reps) arr.push_back(to_json(r));
                emit_json(o, "spectrum", {{"spec", to_json(s)}, {"params", to_json(p.params)}, {"reports", arr}});
            }
        } else if (*th) {
            const auto s = o.spec();
            Json arr = Json::array();
            std::string rows = "c,theta,dL_dbeta,relative_gap\n";
            for (double c : cs) {
                const auto p = construct_profile(solve_beta(s, c, L), s, N);
                const auto f = floquet_theta(p);
                auto j = to_json(f);
                j["params"] = to_json(p.params);
                rows += csv_row({c, f.theta, f.dL_dbeta, j["relative_gap"].get<double>()});
                arr.push_back(j);
            }
            if (o.csv())
                emit(o, [&](std::ostream& os) { os << rows; });
            else
                emit_json(o, "theta", {{"spec", to_json(s)}, {"L", L}, {"results", arr}});
        } else if (*gs) {
            const auto s = o.spec();
            Json arr = Json::array();
            std::string rows = "c,dsecond,stencil_error,sharp_bound,beta_slope_margin,beta_slope_margin_omega,verdict\n";
            for (double c : cs) {
                const auto r = d_second(s, c, L, h, N);
                arr.push_back(to_json(r));
                std::string row = csv_row({c, r.dsecond, r.stencil_error, r.sharp_bound, r.beta_slope_margin,
                                           r.beta_slope_margin_omega});
                row.pop_back();
                rows += row + "," + verdict_name(r.verdict) + "\n";
            }
            if (o.csv())
                emit(o, [&](std::ostream& os) { os << rows; });
            else
                emit_json(o, "gss", arr);
        } else if (*ev) {
            const auto s = o.spec();
            const double c = single(cs, "c");
            const auto p = construct_profile(solve_beta(s, c, L), s, N);
            auto st = wave_state(p);
            if (delta > 0.0) {
                require(delta <= 1e-2, "--delta must be <= 1e-2");
                std::mt19937_64 rng(seed);
                auto e1 = detail::random_modes(rng, N, true);
                auto e2 = detail::random_modes(rng, N, true);
                detail::scale_to(e1, e2, L, delta);
                for (int j = 0; j < N; ++j) {
                    st.phi1[static_cast<std::size_t>(j)] += e1[static_cast<std::size_t>(j)];
                    st.phi2[static_cast<std::size_t>(j)] += e2[static_cast<std::size_t>(j)];
                }
            }
            Monitors mon;
            mon.sample_every = sample_every;
            const auto ref = traveling_pair(p);
            mon.reference = OrbitDistance(ref[0], ref[1], L);
            mon.snapshot_path = resolve_output(snapshot);
            mon.snapshot_every = snapshot_every > 0.0 ? snapshot_every : sample_every;
            const auto sum = evolve(st, s, T, dt > 0.0 ? dt : L / (4.0 * N), mon);
            if (o.csv()) {
                emit(o, [&](std::ostream& os) {
                    os << "t,energy,momentum,parity_defect,raw_distance,modulated_distance\n";
                    for (const auto& x : sum.samples)
                        os << csv_row({x.t, x.energy, x.momentum, x.parity_defect, x.distance->raw,
                                       x.distance->modulated});
                });
            } else {
                emit_json(o, "evolve",
                          {{"spec", to_json(s)}, {"params", to_json(p.params)}, {"N", N}, {"delta", delta},
                           {"seed", seed}, {"summary", to_json(sum)}});
            }
        } else if (*ex) {
            const auto s = o.spec();
            ExperimentOptions opt;
            opt.N = N;
            opt.dt = dt;
            const auto m = mode == "standing_odd" ? ExperimentMode::standing_odd : ExperimentMode::traveling_generic;
            if (m == ExperimentMode::traveling_generic) opt.c = single(cs, "c");
            Json arr = Json::array();
            std::string rows = "delta,t,distance\n";
            for (double d : deltas) {
                const auto r = stability_experiment(s, L, d, m, T, seed, opt);
                arr.push_back(to_json(r));
                for (std::size_t i = 0; i < r.times.size(); ++i) rows += csv_row({d, r.times[i], r.distances[i]});
            }
            if (o.csv())
                emit(o, [&](std::ostream& os) { os << rows; });
            else
                emit_json(o, "experiment", arr);
        } else if (*id) {
            const auto r = coefficient_inequalities(o.n, !approximate);
            if (o.csv()) {
                emit(o, [&](std::ostream& os) {
                    os << "m,lhs,rhs,holds\n";
                    for (const auto& p : r.pairs)
                        os << p.m << ',' << format_double(p.lhs) << ',' << format_double(p.rhs) << ','
                           << (p.holds ? 1 : 0) << '\n';
                });
            } else {
                emit_json(o, "identities", to_json(r));
            }
        }
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
