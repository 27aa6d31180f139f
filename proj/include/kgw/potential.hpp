#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kgw/combinatorics.hpp"
#include "kgw/errors.hpp"

namespace kgw {

enum class Family { phi4n, phi2n2 };

/// Model selector. Both families use the normalization lambda = v = 1.
struct PotentialSpec {
    Family family = Family::phi4n;
    int n = 1;
};

[[nodiscard]] inline std::string family_name(Family f)
{
    return f == Family::phi4n ? "phi4n" : "phi2n2";
}

[[nodiscard]] inline Family parse_family(const std::string& s)
{
    if (s == "phi4n") return Family::phi4n;
    if (s == "phi2n2") return Family::phi2n2;
    throw PreconditionError("family must be phi4n or phi2n2, got '" + s + "'");
}

inline void validate(const PotentialSpec& spec)
{
    require(spec.n >= 1, "n must be >= 1");
}

/// Right edge of the center basin around the origin: 1/2 for phi4n, 1 for phi2n2.
[[nodiscard]] inline double basin_half_width(const PotentialSpec& spec)
{
    return spec.family == Family::phi4n ? 0.5 : 1.0;
}

/// (k - 1/2)^2, exact in binary floating point.
[[nodiscard]] inline double half_odd_sq(int k)
{
    const double h = k - 0.5;
    return h * h;
}

/// Elementary symmetric polynomials e_0..e_m of z, O(m^2) recursion.
template <class T>
[[nodiscard]] std::vector<T> elementary_symmetric(std::span<const T> z)
{
    std::vector<T> e(z.size() + 1, T(0));
    e[0] = T(1);
    for (std::size_t k = 0; k < z.size(); ++k)
        for (std::size_t i = k + 1; i >= 1; --i) e[i] += e[i - 1] * z[k];
    return e;
}

/// Pi_n(x), Pi_{n,0} and Sigma_i(x) for i = 0..n-1.
struct CombinatorialTerms {
    double pi_n = 0.0;
    double pi_n0 = 0.0;
    std::vector<double> sigma;

    /// Sigma_i with the conventions Sigma_i = 0 outside 0..n-1.
    [[nodiscard]] double sig(int i) const
    {
        if (i < 0 || i >= static_cast<int>(sigma.size())) return 0.0;
        return sigma[static_cast<std::size_t>(i)];
    }
};

[[nodiscard]] inline double pi_n0(int n)
{
    double p = 1.0;
    for (int k = 1; k <= n; ++k) p *= half_odd_sq(k);
    return p;
}

[[nodiscard]] inline CombinatorialTerms combinatorial_terms(int n, double x)
{
    require(n >= 1, "n must be >= 1");
    std::vector<double> y(static_cast<std::size_t>(n));
    const double x2 = x * x;
    for (int k = 1; k <= n; ++k) y[static_cast<std::size_t>(k - 1)] = x2 - half_odd_sq(k);
    auto e = elementary_symmetric<double>(y);
    CombinatorialTerms t;
    t.pi_n = e[static_cast<std::size_t>(n)];
    t.pi_n0 = pi_n0(n);
    e.pop_back();
    t.sigma = std::move(e);
    return t;
}

namespace detail {

/// Product form of Pi_n at y = x^2.
inline double pi_of_y(int n, double y)
{
    double p = 1.0;
    for (int k = 1; k <= n; ++k) p *= (y - half_odd_sq(k));
    return p;
}

/// (Pi(y) - Pi(y1)) / (y - y1) by telescoping; no cancellation, continuous at y = y1.
inline double pi_divided(int n, double y, double y1)
{
    double s = 0.0;
    for (int k = 1; k <= n; ++k) {
        double t = 1.0;
        for (int j = 1; j < k; ++j) t *= (y - half_odd_sq(j));
        for (int j = k + 1; j <= n; ++j) t *= (y1 - half_odd_sq(j));
        s += t;
    }
    return s;
}

inline double ipow(double x, int p)
{
    double r = 1.0;
    while (p > 0) {
        if (p & 1) r *= x;
        x *= x;
        p >>= 1;
    }
    return r;
}

} // namespace detail

[[nodiscard]] inline double eval_potential(const PotentialSpec& spec, double x)
{
    validate(spec);
    const double y = x * x;
    if (spec.family == Family::phi4n) {
        const double p = detail::pi_of_y(spec.n, y);
        return p * p;
    }
    const int n = spec.n;
    return -0.5 * y + detail::ipow(y, n + 1) / (2.0 * (n + 1));
}

/// (V(x) - V(x1)) / (x^2 - x1^2), evaluated without cancellation.
[[nodiscard]] inline double potential_secant(const PotentialSpec& spec, double x, double x1)
{
    const double y = x * x, y1 = x1 * x1;
    const int n = spec.n;
    if (spec.family == Family::phi4n) {
        return detail::pi_divided(n, y, y1) * (detail::pi_of_y(n, y) + detail::pi_of_y(n, y1));
    }
    // (y^{n+1} - y1^{n+1}) / (y - y1) = sum_j y^j y1^{n-j}
    double s = 0.0, yj = 1.0;
    for (int j = 0; j <= n; ++j) {
        s += yj * detail::ipow(y1, n - j);
        yj *= y;
    }
    return -0.5 + s / (2.0 * (n + 1));
}

/// potential_secant(x, x1) - potential_secant(0, 0): the anharmonic part of the secant,
/// accurate where it is far below the harmonic part.
[[nodiscard]] inline double secant_excess(const PotentialSpec& spec, double x, double x1)
{
    const double y = x * x, y1 = x1 * x1;
    const int n = spec.n;
    auto h = [&](int d) {  // complete homogeneous h_d(y, y1)
        double s = 0.0, yj = 1.0;
        for (int j = 0; j <= d; ++j) {
            s += yj * detail::ipow(y1, d - j);
            yj *= y;
        }
        return s;
    };
    if (spec.family == Family::phi2n2) return h(n) / (2.0 * (n + 1));
    // V = Pi(y)^2 = sum_k c_k y^k
    std::vector<double> p{1.0};
    for (int k = 1; k <= n; ++k) {
        std::vector<double> q(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= half_odd_sq(k) * p[i];
        }
        p = std::move(q);
    }
    double e = 0.0;
    for (int k = 2; k <= 2 * n; ++k) {
        double ck = 0.0;
        for (int i = std::max(0, k - n); i <= std::min(k, n); ++i)
            ck += p[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(k - i)];
        e += ck * h(k - 1);
    }
    return e;
}

/// V(x) - V(0), written as x^2 times the secant so small |x| keeps full precision.
[[nodiscard]] inline double potential_offset(const PotentialSpec& spec, double x)
{
    return x * x * potential_secant(spec, x, 0.0);
}

[[nodiscard]] inline double eval_derivative(const PotentialSpec& spec, double x, int order)
{
    validate(spec);
    if (order < 1 || order > 3) throw PreconditionError("derivative order must be 1, 2 or 3");
    const int n = spec.n;
    if (spec.family == Family::phi2n2) {
        const double y = x * x;
        switch (order) {
        case 1: return -x + x * detail::ipow(y, n);
        case 2: return -1.0 + (2 * n + 1) * detail::ipow(y, n);
        default: return 2.0 * n * (2 * n + 1) * x * detail::ipow(y, n - 1);
        }
    }
    const auto t = combinatorial_terms(n, x);
    const double P = t.pi_n, s1 = t.sig(n - 1), s2 = t.sig(n - 2), s3 = t.sig(n - 3);
    const double x2 = x * x;
    switch (order) {
    case 1: return 4.0 * x * P * s1;
    case 2: return 4.0 * P * s1 + 8.0 * x2 * s1 * s1 + 16.0 * x2 * P * s2;
    default:
        return 24.0 * x * s1 * s1 + 48.0 * x * P * s2 + 96.0 * x * x2 * s1 * s2
             + 96.0 * x * x2 * P * s3;
    }
}

/// V'(x) in a form that is exactly odd in floating point.
[[nodiscard]] inline double potential_force(const PotentialSpec& spec, double x)
{
    const double y = x * x;
    const int n = spec.n;
    if (spec.family == Family::phi2n2) return x * (detail::ipow(y, n) - 1.0);
    double e[64] = {1.0};
    if (n >= 63) return eval_derivative(spec, x, 1);
    for (int k = 1; k <= n; ++k) {
        const double z = y - half_odd_sq(k);
        e[k] = 0.0;
        for (int i = k; i >= 1; --i) e[i] += e[i - 1] * z;
    }
    return 4.0 * x * (e[n] * e[n - 1]);
}

namespace detail {

/// x^2 - a^2 at x = a - s, with a the basin edge.
inline double edge_shift(const PotentialSpec& spec, double s)
{
    const double a = basin_half_width(spec);
    return -s * (2.0 * a - s);
}

} // namespace detail

/// V(a - s) - V(a) for the basin edge a, accurate for tiny s.
[[nodiscard]] inline double saddle_height(const PotentialSpec& spec, double s)
{
    validate(spec);
    const int n = spec.n;
    const double d = detail::edge_shift(spec, s);
    const double x = basin_half_width(spec) - s;
    const double y = x * x;
    if (spec.family == Family::phi4n) {
        double p = d;
        for (int k = 2; k <= n; ++k) p *= (y - half_odd_sq(k));
        return p * p;
    }
    // (u - 1)^2 / (2(n+1)) * sum_{j=1}^{n} sum_{i<j} u^i
    double acc = 0.0, partial = 0.0, ui = 1.0;
    for (int j = 1; j <= n; ++j) {
        partial += ui;
        ui *= y;
        acc += partial;
    }
    return d * d * acc / (2.0 * (n + 1));
}

/// V'(a - s), accurate for tiny s.
[[nodiscard]] inline double saddle_force(const PotentialSpec& spec, double s)
{
    validate(spec);
    const int n = spec.n;
    const double d = detail::edge_shift(spec, s);
    const double x = basin_half_width(spec) - s;
    const double y = x * x;
    if (spec.family == Family::phi2n2) {
        double g = 0.0, ui = 1.0;
        for (int j = 0; j < n; ++j) {
            g += ui;
            ui *= y;
        }
        return x * d * g;
    }
    std::vector<double> z(static_cast<std::size_t>(n));
    z[0] = d;
    for (int k = 2; k <= n; ++k) z[static_cast<std::size_t>(k - 1)] = y - half_odd_sq(k);
    const auto e = elementary_symmetric<double>(z);
    return 4.0 * x * e[static_cast<std::size_t>(n)] * e[static_cast<std::size_t>(n - 1)];
}

enum class CriticalKind { center, saddle };

struct CriticalPoint {
    double u = 0.0;
    double v = 0.0;
    CriticalKind kind = CriticalKind::center;
};

/// Zeros of V' with their type for the system u' = v, v' = V'(u)/omega.
/// V'' < 0 gives a center, V'' > 0 a saddle.
[[nodiscard]] inline std::vector<CriticalPoint> critical_points(const PotentialSpec& spec)
{
    validate(spec);
    std::vector<double> roots{0.0};
    if (spec.family == Family::phi2n2) {
        roots.push_back(1.0);
        roots.push_back(-1.0);
    } else {
        for (int k = 1; k <= spec.n; ++k) {
            roots.push_back(k - 0.5);
            roots.push_back(-(k - 0.5));
        }
        for (int k = 1; k < spec.n; ++k) {
            // V' vanishes at both ends; nudge the bracket inward.
            double lo = k - 0.5 + 1e-6, hi = k + 0.5 - 1e-6;
            double flo = eval_derivative(spec, lo, 1), fhi = eval_derivative(spec, hi, 1);
            if (!(flo * fhi < 0.0)) throw NumericalError("critical_points: bracket without sign change");
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eval_derivative(spec, mid, 1);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            const double r = 0.5 * (lo + hi);
            roots.push_back(r);
            roots.push_back(-r);
        }
    }
    std::sort(roots.begin(), roots.end());
    std::vector<CriticalPoint> out;
    out.reserve(roots.size());
    for (double r : roots) {
        const double v2 = eval_derivative(spec, r, 2);
        out.push_back({r, 0.0, v2 < 0.0 ? CriticalKind::center : CriticalKind::saddle});
    }
    return out;
}

/// Sum over k = 1..n of (k - 1/2)^(-p).
[[nodiscard]] inline double inverse_half_odd_power_sum(int n, int p)
{
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += std::pow(k - 0.5, -p);
    return s;
}

/// The phi4n numerator V_n(x) = 3V''((V')^2 - 2(V-V0)V'') + 2(V-V0)V'V''',
/// assembled as 96 (A + B x^2 + C x^4).
[[nodiscard]] inline double vn_numerator(int n, double x)
{
    const auto t = combinatorial_terms(n, x);
    const double P = t.pi_n, P0sq = t.pi_n0 * t.pi_n0;
    const double s1 = t.sig(n - 1), s2 = t.sig(n - 2), s3 = t.sig(n - 3);
    const double x2 = x * x;
    // Pi^2 - Pi(0)^2 without cancellation
    const double pi_at_0 = detail::pi_of_y(n, 0.0);
    const double d = x2 * detail::pi_divided(n, x2, 0.0) * (P + pi_at_0);
    const double P2 = P * P;
    const double A = -d * P2 * s1 * s1;
    const double B = 2.0 * P0sq * P * s1 * s1 * s1 - 4.0 * d * P2 * s1 * s2;
    const double C = 4.0 * P0sq * s1 * s1 * s1 * s1 + 8.0 * P0sq * P * s1 * s1 * s2
                   + 8.0 * d * P2 * s1 * s3 - 16.0 * d * P2 * s2 * s2;
    return 96.0 * (A + B * x2 + C * x2 * x2);
}

/// Generic form of the same numerator from V and its derivatives (any family).
[[nodiscard]] inline double chicone_numerator_direct(const PotentialSpec& spec, double x)
{
    const double dv = potential_offset(spec, x);
    const double v1 = eval_derivative(spec, x, 1);
    const double v2 = eval_derivative(spec, x, 2);
    const double v3 = eval_derivative(spec, x, 3);
    return 3.0 * v2 * (v1 * v1 - 2.0 * dv * v2) + 2.0 * dv * v1 * v3;
}

/// lim_{x->0} V_n(x)/x^4 for phi4n.
[[nodiscard]] inline double vn_limit_over_x4(int n)
{
    const auto t = combinatorial_terms(n, 0.0);
    const double P0 = t.pi_n0, s1 = t.sig(n - 1), s2 = t.sig(n - 2);
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return 96.0 * (std::pow(P0, 4) * s1 * s1 * inverse_half_odd_power_sum(n, 4)
                   + 4.0 * sgn * std::pow(P0, 3) * s1 * s1 * s2);
}

/// Value of the Chicone quantity at x = 0 (removable singularity).
[[nodiscard]] inline double chicone_limit(const PotentialSpec& spec)
{
    validate(spec);
    if (spec.family == Family::phi2n2) return spec.n == 1 ? 1.5 : 0.0;
    const double v2 = eval_derivative(spec, 0.0, 2);
    return vn_limit_over_x4(spec.n) / std::pow(v2, 4);
}

/// 4n^2 - 1 + 2(1 + n + 4n^2) x^{2n} - (1 + 2n) x^{4n}; positive on (-1, 1).
[[nodiscard]] inline double phi2n2_chicone_bracket(int n, double x)
{
    const double z = detail::ipow(x * x, n);
    return 4.0 * n * n - 1.0 + 2.0 * (1.0 + n + 4.0 * n * n) * z - (1.0 + 2.0 * n) * z * z;
}

/// -d^2/dx^2 [ (V(x) - V(0)) / V'(x)^2 ] on the open center basin.
[[nodiscard]] inline double chicone_quantity(const PotentialSpec& spec, double x)
{
    validate(spec);
    const double w = basin_half_width(spec);
    if (!(std::abs(x) < w))
        throw PreconditionError("chicone_quantity: x must lie in the open center basin");
    const int n = spec.n;
    if (spec.family == Family::phi2n2) {
        const double z = detail::ipow(x * x, n);
        const double num = n * detail::ipow(x * x, n - 1) * phi2n2_chicone_bracket(n, x);
        const double den = (1.0 + n) * detail::ipow(z - 1.0, 4);
        return num / den;
    }
    if (std::abs(x) < 1e-3) return chicone_limit(spec);
    const double v1 = eval_derivative(spec, x, 1);
    if (v1 == 0.0) throw PreconditionError("chicone_quantity: V' vanishes at x");
    const double v1sq = v1 * v1;
    return vn_numerator(n, x) / (v1sq * v1sq);
}

/// Minimum of one inequality over a grid, with the magnitude it is judged against.
struct InequalityMargin {
    std::string name;
    double min_value = std::numeric_limits<double>::infinity();
    double argmin = 0.0;
    double scale = 0.0;
    int violations = 0;

    [[nodiscard]] bool holds(double rel_slack = 1e-12) const
    {
        return min_value >= -rel_slack * scale;
    }
};

struct LemmaReport {
    int n = 0;
    std::size_t grid_size = 0;
    std::vector<InequalityMargin> margins;

    [[nodiscard]] bool all_hold(double rel_slack = 1e-12) const
    {
        return std::all_of(margins.begin(), margins.end(),
                           [&](const InequalityMargin& m) { return m.holds(rel_slack); });
    }
};

/// Uniform grid of `points` samples of the closed interval [-a, a].
[[nodiscard]] inline std::vector<double> symmetric_grid(double a, std::size_t points)
{
    require(points >= 2, "grid needs at least 2 points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = -a + 2.0 * a * static_cast<double>(i) / static_cast<double>(points - 1);
    return g;
}

/// Evaluates the inequalities behind V_n >= 0 on a grid of (-1/2, 1/2).
/// For n = 1 only V_1 >= 0 is checked. Violations are counted, not raised.
[[nodiscard]] inline LemmaReport check_lemma_inequalities(int n, std::span<const double> grid,
                                                          double rel_slack = 1e-12)
{
    require(n >= 1, "n must be >= 1");
    LemmaReport rep;
    rep.n = n;
    rep.grid_size = grid.size();

    const int count = n == 1 ? 1 : 5;
    const char* names[5] = {"vn_nonnegative", "first_prop", "sigma_square", "pi_square_tail",
                            "prop_final"};
    std::vector<std::vector<double>> values(static_cast<std::size_t>(count));
    std::vector<InequalityMargin> margins(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) margins[static_cast<std::size_t>(i)].name = names[i];

    const double P0 = pi_n0(n), P0sq = P0 * P0;
    const double pi_at_0 = detail::pi_of_y(n, 0.0);
    const auto a = squared_pi_coefficients<double>(n);

    auto put = [&](int i, double x, double v, double mag) {
        auto& m = margins[static_cast<std::size_t>(i)];
        if (v < m.min_value) {
            m.min_value = v;
            m.argmin = x;
        }
        m.scale = std::max(m.scale, mag);
        values[static_cast<std::size_t>(i)].push_back(v);
    };

    for (double x : grid) {
        require(std::abs(x) < 0.5, "lemma grid must lie inside (-1/2, 1/2)");
        const double v = vn_numerator(n, x);
        put(0, x, v, std::abs(v));
        if (n == 1) continue;

        const auto t = combinatorial_terms(n, x);
        const double P = t.pi_n, s1 = t.sig(n - 1), s2 = t.sig(n - 2), s3 = t.sig(n - 3);
        const double x2 = x * x;
        const double d = x2 * detail::pi_divided(n, x2, 0.0) * (P + pi_at_0);

        // (i)  -4 d Pi^2 s1 s2 + 8 x^2 Pi0^2 Pi s1^2 s2
        {
            const double a1 = -4.0 * d * P * P * s1 * s2;
            const double a2 = 8.0 * x2 * P0sq * P * s1 * s1 * s2;
            put(1, x, a1 + a2, std::max(std::abs(a1), std::abs(a2)));
        }
        // (ii) 2 s2^2 - s1 s3
        {
            const double a1 = 2.0 * s2 * s2, a2 = s1 * s3;
            put(2, x, a1 - a2, std::max(std::abs(a1), std::abs(a2)));
        }
        // (iii) -(Pi^2 - Pi0^2) - a1 x^2 + a2 x^4 = -sum_{k>=3} (-1)^k a_k x^{2k}
        {
            double tail = 0.0, xp = x2 * x2 * x2;
            for (int k = 3; k <= 2 * n; ++k) {
                tail += ((k % 2) ? 1.0 : -1.0) * a[static_cast<std::size_t>(k)] * xp;
                xp *= x2;
            }
            put(3, x, tail, a[1] * x2);
        }
        // (iv) -d Pi^2 s1^2 + 2 x^2 Pi0^2 Pi s1^3 + 4 x^4 Pi0^2 s1^4
        {
            const double a1 = -d * P * P * s1 * s1;
            const double a2 = 2.0 * x2 * P0sq * P * s1 * s1 * s1;
            const double a3 = 4.0 * x2 * x2 * P0sq * s1 * s1 * s1 * s1;
            put(4, x, a1 + a2 + a3, std::max({std::abs(a1), std::abs(a2), std::abs(a3)}));
        }
    }
    for (int i = 0; i < count; ++i) {
        auto& m = margins[static_cast<std::size_t>(i)];
        for (double v : values[static_cast<std::size_t>(i)])
            if (v < -rel_slack * m.scale) ++m.violations;
    }
    rep.margins = std::move(margins);
    return rep;
}

} // namespace kgw

