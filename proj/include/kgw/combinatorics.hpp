#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kgw/errors.hpp"

namespace kgw {

using Rational = boost::multiprecision::cpp_rational;

namespace detail {

template <class T>
T half_odd_sq_as(int k)
{
    return T((2 * k - 1) * (2 * k - 1)) / T(4);
}

template <class T>
std::vector<T> poly_mul(const std::vector<T>& a, const std::vector<T>& b)
{
    std::vector<T> r(a.size() + b.size() - 1, T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }
inline double to_double(double r) { return r; }

} // namespace detail

/// Coefficients of Pi_n as a polynomial in y = x^2, lowest degree first.
template <class T>
[[nodiscard]] std::vector<T> pi_coefficients(int n)
{
    require(n >= 1, "n must be >= 1");
    std::vector<T> p{T(1)};
    for (int k = 1; k <= n; ++k) p = detail::poly_mul(p, std::vector<T>{-detail::half_odd_sq_as<T>(k), T(1)});
    return p;
}

/// a_k^2, k = 0..2n, with Pi_n^2 = sum_k (-1)^k a_k^2 x^{2k}.
template <class T>
[[nodiscard]] std::vector<T> squared_pi_coefficients(int n)
{
    const auto p = pi_coefficients<T>(n);
    auto sq = detail::poly_mul(p, p);
    for (std::size_t k = 1; k < sq.size(); k += 2) sq[k] = -sq[k];
    return sq;
}

/// sum_{j=2}^n ((j - 1/2)^2 - 1/4)^{-1}, exactly.
[[nodiscard]] inline Rational telescoping_sum(int n)
{
    require(n >= 1, "n must be >= 1");
    Rational s = 0;
    for (int j = 2; j <= n; ++j) s += 1 / (detail::half_odd_sq_as<Rational>(j) - Rational(1, 4));
    return s;
}

/// |{(k,j,i,l) in {1..n}^4 : k <= l, j < i}|
[[nodiscard]] inline std::int64_t gamma_lhs_count(int n)
{
    require(n >= 1 && n <= 8, "index-set enumeration is limited to 1 <= n <= 8");
    std::int64_t c = 0;
    for (int k = 1; k <= n; ++k)
        for (int j = 1; j <= n; ++j)
            for (int i = 1; i <= n; ++i)
                for (int l = 1; l <= n; ++l)
                    if (k <= l && j < i) ++c;
    return c;
}

/// Same set with the strict order k < l.
[[nodiscard]] inline std::int64_t gamma_lhs_strict_count(int n)
{
    require(n >= 1 && n <= 8, "index-set enumeration is limited to 1 <= n <= 8");
    std::int64_t c = 0;
    for (int k = 1; k <= n; ++k)
        for (int j = 1; j <= n; ++j)
            for (int i = 1; i <= n; ++i)
                for (int l = 1; l <= n; ++l)
                    if (k < l && j < i) ++c;
    return c;
}

/// |{(k,j,i,l) in {1..n}^4 : j < i < l}|
[[nodiscard]] inline std::int64_t gamma_rhs_plus_count(int n)
{
    require(n >= 1 && n <= 8, "index-set enumeration is limited to 1 <= n <= 8");
    std::int64_t c = 0;
    for (int k = 1; k <= n; ++k)
        for (int j = 1; j <= n; ++j)
            for (int i = 1; i <= n; ++i)
                for (int l = 1; l <= n; ++l)
                    if (j < i && i < l) ++c;
    return c;
}

[[nodiscard]] inline std::int64_t gamma_lhs_formula(std::int64_t n) { return n * n * (n * n - 1) / 4; }
[[nodiscard]] inline std::int64_t gamma_rhs_plus_formula(std::int64_t n)
{
    return n * n * (n * n - 3 * n + 2) / 6;
}

struct CoefficientPair {
    int m = 0;
    double lhs = 0.0;  // 4 a_{2m-1}^2
    double rhs = 0.0;  // a_{2m}^2
    bool holds = false;
};

struct CoefficientReport {
    int n = 0;
    bool exact = false;
    std::vector<double> a_sq;
    std::vector<std::string> a_sq_exact;
    std::vector<CoefficientPair> pairs;
    bool all_hold = true;
    bool enumerated = false;
    std::int64_t gamma_lhs = 0;
    std::int64_t gamma_lhs_strict = 0;
    std::int64_t gamma_lhs_expected = 0;
    std::int64_t gamma_rhs_plus = 0;
    std::int64_t gamma_rhs_plus_expected = 0;
    std::string telescoping_exact;
    bool telescoping_matches = false;
};

namespace detail {

template <class T>
void fill_pairs(CoefficientReport& rep, const std::vector<T>& a)
{
    for (int m = 2; m <= rep.n; ++m) {
        const T lhs = T(4) * a[static_cast<std::size_t>(2 * m - 1)];
        const T rhs = a[static_cast<std::size_t>(2 * m)];
        CoefficientPair p{m, to_double(lhs), to_double(rhs), lhs >= rhs};
        rep.all_hold = rep.all_hold && p.holds;
        rep.pairs.push_back(p);
    }
    for (const auto& v : a) rep.a_sq.push_back(to_double(v));
}

} // namespace detail

/// Checks 4 a_{2m-1}^2 >= a_{2m}^2 for m = 2..n and the index-set cardinalities.
/// With `exact` and n <= 6 the coefficients are rational; otherwise double.
[[nodiscard]] inline CoefficientReport coefficient_inequalities(int n, bool exact = false)
{
    require(n >= 2, "coefficient_inequalities needs n >= 2");
    CoefficientReport rep;
    rep.n = n;
    rep.exact = exact && n <= 6;
    if (rep.exact) {
        const auto a = squared_pi_coefficients<Rational>(n);
        detail::fill_pairs(rep, a);
        for (const auto& v : a) rep.a_sq_exact.push_back(v.str());
    } else {
        detail::fill_pairs(rep, squared_pi_coefficients<double>(n));
    }
    rep.gamma_lhs_expected = gamma_lhs_formula(n);
    rep.gamma_rhs_plus_expected = gamma_rhs_plus_formula(n);
    if (n <= 8) {
        rep.enumerated = true;
        rep.gamma_lhs = gamma_lhs_count(n);
        rep.gamma_lhs_strict = gamma_lhs_strict_count(n);
        rep.gamma_rhs_plus = gamma_rhs_plus_count(n);
    }
    const Rational t = telescoping_sum(n);
    rep.telescoping_exact = t.str();
    rep.telescoping_matches = (t == Rational(n - 1, n));
    return rep;
}

} // namespace kgw
