#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "kgw/errors.hpp"

namespace kgw {

/// First column of the Fourier second-derivative matrix on N points of [0, L).
[[nodiscard]] inline std::vector<double> second_derivative_kernel(int N, double L)
{
    require(N >= 4 && N % 2 == 0, "spectral kernels need even N >= 4");
    const double h = 2.0 * std::numbers::pi / N;
    const double s = std::pow(2.0 * std::numbers::pi / L, 2);
    std::vector<double> c(static_cast<std::size_t>(N));
    c[0] = s * (-std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0);
    for (int m = 1; m < N; ++m) {
        const double sn = std::sin(0.5 * m * h);
        c[static_cast<std::size_t>(m)] = s * (-((m % 2) ? -1.0 : 1.0) / (2.0 * sn * sn));
    }
    // make the kernel exactly even: c[m] == c[N - m]
    for (int m = 1; m < N / 2; ++m) c[static_cast<std::size_t>(N - m)] = c[static_cast<std::size_t>(m)];
    return c;
}

/// First column of the Fourier first-derivative matrix, Nyquist mode removed.
/// The kernel is exactly odd: c[N - m] == -c[m], c[0] = c[N/2] = 0.
[[nodiscard]] inline std::vector<double> first_derivative_kernel(int N, double L)
{
    require(N >= 4 && N % 2 == 0, "spectral kernels need even N >= 4");
    const double h = 2.0 * std::numbers::pi / N;
    const double s = 2.0 * std::numbers::pi / L;
    std::vector<double> c(static_cast<std::size_t>(N), 0.0);
    for (int m = 1; m < N / 2; ++m) {
        const double v = s * 0.5 * ((m % 2) ? -1.0 : 1.0) / std::tan(0.5 * m * h);
        c[static_cast<std::size_t>(m)] = v;
        c[static_cast<std::size_t>(N - m)] = -v;
    }
    return c;
}

/// Dense circulant matrix M(j, k) = col[(j - k) mod N].
[[nodiscard]] inline Eigen::MatrixXd circulant(const std::vector<double>& col)
{
    const int N = static_cast<int>(col.size());
    Eigen::MatrixXd M(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) M(j, k) = col[static_cast<std::size_t>(((j - k) % N + N) % N)];
    return M;
}

/// Applies an even or odd circulant kernel with reflection-paired sums.
/// Each output entry pairs u[j+m] with u[j-m], so odd/even input parity is
/// carried through exactly in floating point.
class PairedCirculant {
public:
    PairedCirculant() = default;
    PairedCirculant(std::vector<double> kernel, bool odd) : c_(std::move(kernel)), odd_(odd)
    {
        N_ = static_cast<int>(c_.size());
        ext_.resize(static_cast<std::size_t>(2 * N_));
    }

    [[nodiscard]] int size() const { return N_; }

    void apply(std::span<const double> u, std::span<double> out)
    {
        const int N = N_;
        for (int i = 0; i < 2 * N; ++i) ext_[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i % N)];
        const double* e = ext_.data();
        double* o = out.data();
        if (!odd_) {
            // rows sum to zero, so (D u)_j = sum_m c_m (u_{j+m} - u_j): constants map to exactly 0
            const double* u0 = e + N;
            for (int j = 0; j < N; ++j) o[j] = 0.0;
            for (int m = 1; m < N / 2; ++m) {
                const double cm = c_[static_cast<std::size_t>(m)];
                const double* a = e + m;
                const double* b = e + N - m;
                for (int j = 0; j < N; ++j) o[j] += cm * ((a[j] - u0[j]) + (b[j] - u0[j]));
            }
            const double cn = c_[static_cast<std::size_t>(N / 2)];
            const double* a = e + N / 2;
            for (int j = 0; j < N; ++j) o[j] += cn * (a[j] - u0[j]);
        } else {
            for (int j = 0; j < N; ++j) o[j] = 0.0;
            // (D u)_j = sum_m c_m (u_{j-m} - u_{j+m})
            for (int m = 1; m < N / 2; ++m) {
                const double cm = c_[static_cast<std::size_t>(m)];
                const double* a = e + N - m;
                const double* b = e + m;
                for (int j = 0; j < N; ++j) o[j] += cm * (a[j] - b[j]);
            }
        }
    }

    [[nodiscard]] std::vector<double> operator()(std::span<const double> u)
    {
        std::vector<double> out(u.size());
        apply(u, out);
        return out;
    }

private:
    std::vector<double> c_;
    std::vector<double> ext_;
    int N_ = 0;
    bool odd_ = false;
};

/// Spectral derivatives of periodic grid data through the FFT.
class FourierTools {
public:
    FourierTools(int N, double L) : N_(N), L_(L)
    {
        require(N >= 4 && N % 2 == 0, "FourierTools: N must be even and >= 4");
        kappa_.resize(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k) {
            const int kk = k <= N / 2 ? k : k - N;
            kappa_[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * kk / L;
        }
    }

    [[nodiscard]] int size() const { return N_; }
    [[nodiscard]] double length() const { return L_; }
    /// Wavenumber of FFT bin k (Nyquist bin returns +pi N / L).
    [[nodiscard]] double kappa(int k) const { return kappa_[static_cast<std::size_t>(k)]; }

    [[nodiscard]] std::vector<std::complex<double>> forward(std::span<const double> u) const
    {
        std::vector<double> in(u.begin(), u.end());
        std::vector<std::complex<double>> out;
        fft_.fwd(out, in);
        return out;
    }

    [[nodiscard]] std::vector<double> inverse(const std::vector<std::complex<double>>& U) const
    {
        std::vector<double> out;
        auto tmp = U;
        fft_.inv(out, tmp);
        return out;
    }

    /// First derivative with the Nyquist mode dropped.
    [[nodiscard]] std::vector<double> derivative(std::span<const double> u) const
    {
        auto U = forward(u);
        for (int k = 0; k < N_; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            U[kk] = k == N_ / 2 ? std::complex<double>(0.0) : U[kk] * std::complex<double>(0.0, kappa_[kk]);
        }
        return inverse(U);
    }

    /// Band-limited interpolant of u sampled on factor * N points.
    [[nodiscard]] std::vector<double> upsample(std::span<const double> u, int factor) const
    {
        require(factor >= 1, "upsample factor must be >= 1");
        const auto U = forward(u);
        const int M = factor * N_;
        std::vector<std::complex<double>> V(static_cast<std::size_t>(M), 0.0);
        for (int k = 0; k < N_ / 2; ++k) V[static_cast<std::size_t>(k)] = U[static_cast<std::size_t>(k)];
        for (int k = 1; k < N_ / 2; ++k)
            V[static_cast<std::size_t>(M - k)] = U[static_cast<std::size_t>(N_ - k)];
        if (factor > 1) {
            const auto nyq = U[static_cast<std::size_t>(N_ / 2)];
            V[static_cast<std::size_t>(N_ / 2)] = 0.5 * nyq;
            V[static_cast<std::size_t>(M - N_ / 2)] = 0.5 * nyq;
        } else {
            V[static_cast<std::size_t>(N_ / 2)] = U[static_cast<std::size_t>(N_ / 2)];
        }
        std::vector<double> out;
        fft_.inv(out, V);
        for (auto& v : out) v *= factor;
        return out;
    }

private:
    int N_;
    double L_;
    std::vector<double> kappa_;
    mutable Eigen::FFT<double> fft_;
};

/// Orthonormal basis of grid-odd vectors: sqrt(2/N) sin(2 pi k j / N), k = 1..N/2-1.
[[nodiscard]] inline Eigen::MatrixXd odd_basis(int N)
{
    Eigen::MatrixXd Q(N, N / 2 - 1);
    const double s = std::sqrt(2.0 / N);
    for (int k = 1; k < N / 2; ++k)
        for (int j = 0; j < N; ++j) Q(j, k - 1) = s * std::sin(2.0 * std::numbers::pi * k * j / N);
    return Q;
}

/// Orthonormal basis of grid-even vectors: constant, cosines k = 1..N/2-1, Nyquist.
[[nodiscard]] inline Eigen::MatrixXd even_basis(int N)
{
    Eigen::MatrixXd Q(N, N / 2 + 1);
    const double s = std::sqrt(2.0 / N), s0 = 1.0 / std::sqrt(static_cast<double>(N));
    for (int j = 0; j < N; ++j) {
        Q(j, 0) = s0;
        Q(j, N / 2) = s0 * ((j % 2) ? -1.0 : 1.0);
    }
    for (int k = 1; k < N / 2; ++k)
        for (int j = 0; j < N; ++j) Q(j, k) = s * std::cos(2.0 * std::numbers::pi * k * j / N);
    return Q;
}

/// max_j |u_j + u_{N-j}|: zero for data odd under x -> L - x.
[[nodiscard]] inline double odd_defect(std::span<const double> u)
{
    const std::size_t N = u.size();
    double d = 0.0;
    for (std::size_t j = 0; j < N; ++j) d = std::max(d, std::abs(u[j] + u[(N - j) % N]));
    return d;
}

/// Projects onto grid-odd data: u_j <- (u_j - u_{N-j}) / 2.
inline void make_odd(std::span<double> u)
{
    const std::size_t N = u.size();
    std::vector<double> r(u.begin(), u.end());
    for (std::size_t j = 0; j < N; ++j) u[j] = 0.5 * (r[j] - r[(N - j) % N]);
}

} // namespace kgw
