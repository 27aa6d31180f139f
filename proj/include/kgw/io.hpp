#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kgw/combinatorics.hpp"
#include "kgw/errors.hpp"
#include "kgw/gss_stability.hpp"
#include "kgw/hill_spectrum.hpp"
#include "kgw/pde_evolution.hpp"
#include "kgw/potential.hpp"
#include "kgw/wave_family.hpp"

namespace kgw {

using Json = nlohmann::json;

/// %.17g, or "null" for non-finite values.
[[nodiscard]] inline std::string format_double(double v)
{
    if (!std::isfinite(v)) return "null";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void dump_json(std::ostream& os, const Json& j, int indent, int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string pad_end(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
            dump_json(os, it.value(), indent, depth + 1);
        }
        os << nl << pad_end << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            return;
        }
        os << '[' << nl;
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad;
            dump_json(os, v, indent, depth + 1);
        }
        os << nl << pad_end << ']';
        return;
    }
    case Json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
    }
}

} // namespace detail

/// Serializes with every float printed to 17 significant digits.
[[nodiscard]] inline std::string dump_json(const Json& j, int indent = 2)
{
    std::ostringstream os;
    detail::dump_json(os, j, indent, 0);
    os << '\n';
    return os.str();
}

/// Wraps a payload with the schema tag.
[[nodiscard]] inline Json document(const std::string& kind, Json payload)
{
    Json d;
    d["schema"] = "1";
    d["kind"] = kind;
    d["result"] = std::move(payload);
    return d;
}

template <class T>
Json opt(const std::optional<T>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

inline Json to_json(const PotentialSpec& s)
{
    return {{"family", family_name(s.family)}, {"n", s.n}};
}

inline Json to_json(const WaveParams& w)
{
    return {{"c", w.c}, {"omega", w.omega}, {"L", w.L}, {"beta", w.beta}, {"gap", w.gap}};
}

inline Json to_json(const WaveProfile& p)
{
    std::vector<double> x(p.phi.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = p.x(static_cast<int>(j));
    return {{"spec", to_json(p.spec)}, {"params", to_json(p.params)}, {"x1", p.x1}, {"N", p.size()},
            {"x", x}, {"phi", p.phi}, {"dphi", p.dphi}};
}

inline Json to_json(const SpectrumReport& r, std::size_t max_eigenvalues = 64)
{
    std::vector<double> ev(r.eigenvalues.begin(),
                           r.eigenvalues.begin()
                               + static_cast<std::ptrdiff_t>(std::min(max_eigenvalues, r.eigenvalues.size())));
    return {{"operator", r.op},
            {"parity", parity_name(r.parity)},
            {"N", r.grid_size},
            {"eigenvalues", ev},
            {"eigenvalue_count", r.eigenvalues.size()},
            {"negative_count", r.negative_count},
            {"zero_index", opt(r.zero_index)},
            {"zero_count", r.zero_count},
            {"zero_simple", r.zero_simple},
            {"zero_tolerance", r.zero_tolerance},
            {"spectral_radius", r.spectral_radius},
            {"kernel_alignment", opt(r.kernel_alignment)},
            {"gap", opt(r.gap)},
            {"theta", opt(r.theta)},
            {"coercivity_gamma", opt(r.coercivity_gamma)},
            {"coercivity_gamma_weighted", opt(r.coercivity_gamma_h1)}};
}

inline Json to_json(const FloquetData& f, bool with_profile = false)
{
    Json j = {{"theta", f.theta},
              {"dL_dbeta", f.dL_dbeta},
              {"mu_at_L", f.mu_at_L},
              {"wronskian_defect", f.wronskian_defect},
              {"relative_gap", f.dL_dbeta != 0.0 ? std::abs(f.theta + f.dL_dbeta) / std::abs(f.dL_dbeta) : 0.0}};
    if (with_profile) j["mu"] = f.mu_profile;
    return j;
}

inline Json to_json(const OscillationResult& o)
{
    return {{"k", o.k},
            {"eigenvalue", o.eigenvalue},
            {"zeros", o.zeros},
            {"theta", o.theta},
            {"classification", oscillation_class_name(o.classification)},
            {"index", o.index}};
}

inline Json to_json(const GssReport& r)
{
    return {{"spec", to_json(r.spec)},
            {"c", r.c},
            {"L", r.L},
            {"h", r.h},
            {"omega", r.omega},
            {"beta", r.beta},
            {"gap", r.gap},
            {"dphi_sq", r.dphi_sq},
            {"m_of_c", r.m_of_c},
            {"dprime", r.dprime},
            {"dsecond", r.dsecond},
            {"dsecond_3pt", r.dsecond_3pt},
            {"stencil_error", r.stencil_error},
            {"sharp_bound", r.sharp_bound},
            {"dbeta_dc", r.dbeta_dc},
            {"beta_slope_margin", r.beta_slope_margin},
            {"beta_slope_margin_omega", r.beta_slope_margin_omega},
            {"verdict", verdict_name(r.verdict)}};
}

inline Json to_json(const Functionals& f)
{
    return {{"energy", f.energy}, {"momentum", f.momentum}, {"action", f.action}};
}

inline Json to_json(const TrajectorySummary& s)
{
    Json samples = Json::array();
    for (const auto& x : s.samples) {
        Json j = {{"t", x.t}, {"energy", x.energy}, {"momentum", x.momentum}, {"parity_defect", x.parity_defect}};
        if (x.distance) {
            j["raw_distance"] = x.distance->raw;
            j["modulated_distance"] = x.distance->modulated;
            j["shift"] = x.distance->shift;
        }
        samples.push_back(j);
    }
    return {{"t_final", s.t_final},
            {"steps", s.steps},
            {"dt", s.dt},
            {"energy_drift_max", s.energy_drift_max},
            {"momentum_drift_max", s.momentum_drift_max},
            {"parity_defect_max", s.parity_defect_max},
            {"escaped", s.escaped},
            {"threshold_time", opt(s.threshold_time)},
            {"samples", samples}};
}

inline Json to_json(const ExperimentRecord& r)
{
    return {{"mode", mode_name(r.mode)},
            {"spec", to_json(r.spec)},
            {"L", r.L},
            {"c", r.c},
            {"delta", r.delta},
            {"T", r.T},
            {"seed", r.seed},
            {"N", r.N},
            {"dt", r.dt},
            {"beta", r.beta},
            {"initial_distance", r.initial_distance},
            {"sup_deviation", r.sup_deviation},
            {"constant_C", r.constant_C},
            {"exceed_time", opt(r.exceed_time)},
            {"max_modulated", r.max_modulated},
            {"growth_rate", r.growth_rate},
            {"linear_growth_rate", r.linear_growth_rate},
            {"block_negative_eigenvalue", r.block_negative_eigenvalue},
            {"energy_drift", r.energy_drift},
            {"parity_defect", r.parity_defect},
            {"t_final", r.t_final},
            {"escaped", r.escaped},
            {"verdict", r.verdict},
            {"times", r.times},
            {"distances", r.distances}};
}

inline Json to_json(const LemmaReport& r)
{
    Json m = Json::array();
    for (const auto& x : r.margins)
        m.push_back({{"name", x.name},
                     {"min_value", x.min_value},
                     {"argmin", x.argmin},
                     {"scale", x.scale},
                     {"violations", x.violations},
                     {"holds", x.holds()}});
    return {{"n", r.n}, {"grid_size", r.grid_size}, {"all_hold", r.all_hold()}, {"inequalities", m}};
}

inline Json to_json(const CoefficientReport& r)
{
    Json pairs = Json::array();
    for (const auto& p : r.pairs) pairs.push_back({{"m", p.m}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"holds", p.holds}});
    Json j = {{"n", r.n},
              {"exact", r.exact},
              {"a_sq", r.a_sq},
              {"pairs", pairs},
              {"all_hold", r.all_hold},
              {"gamma_enumerated", r.enumerated},
              {"gamma_lhs_formula", r.gamma_lhs_expected},
              {"gamma_rhs_plus_formula", r.gamma_rhs_plus_expected},
              {"telescoping_sum", r.telescoping_exact},
              {"telescoping_matches", r.telescoping_matches}};
    if (r.exact) j["a_sq_exact"] = r.a_sq_exact;
    if (r.enumerated) {
        j["gamma_lhs_non_strict"] = r.gamma_lhs;
        j["gamma_lhs_strict"] = r.gamma_lhs_strict;
        j["gamma_rhs_plus"] = r.gamma_rhs_plus;
    }
    return j;
}

/// Headered CSV from named columns of equal length.
inline void write_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& cols)
{
    require(names.size() == cols.size() && !cols.empty(), "write_csv: column mismatch");
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
    const std::size_t rows = cols.front().size();
    for (const auto& c : cols) require(c.size() == rows, "write_csv: ragged columns");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << format_double(cols[i][r]);
        os << '\n';
    }
}

inline void write_profile_csv(std::ostream& os, const WaveProfile& p)
{
    std::vector<double> x(p.phi.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = p.x(static_cast<int>(j));
    write_csv(os, {"x", "phi", "dphi"}, {x, p.phi, p.dphi});
}

/// x followed by the first `count` eigenvectors (full-grid coordinates).
inline void write_eigenfunctions_csv(std::ostream& os, const SpectrumReport& r, double L, int count)
{
    const int rows = static_cast<int>(r.eigenvectors.rows());
    const int N = r.op == "block" ? rows / 2 : rows;
    count = std::min(count, static_cast<int>(r.eigenvectors.cols()));
    std::vector<std::string> names{"x"};
    std::vector<std::vector<double>> cols(1);
    for (int j = 0; j < rows; ++j) cols[0].push_back((j % N) * L / N);
    for (int k = 0; k < count; ++k) {
        names.push_back("v" + std::to_string(k));
        std::vector<double> c(static_cast<std::size_t>(rows));
        for (int j = 0; j < rows; ++j) c[static_cast<std::size_t>(j)] = r.eigenvectors(j, k);
        cols.push_back(std::move(c));
    }
    write_csv(os, names, cols);
}

/// Opens a file for writing or throws a precondition error naming the path.
[[nodiscard]] inline std::ofstream open_output(const std::string& path)
{
    std::ofstream f(path);
    if (!f) throw PreconditionError("cannot write output file " + path);
    return f;
}

} // namespace kgw
