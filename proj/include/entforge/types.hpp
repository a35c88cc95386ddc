#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace entforge {

using cplx = std::complex<double>;
using Index = std::uint64_t;

/// Row-major 2x2 operator on one qubit.
using Mat2 = std::array<cplx, 4>;
/// Row-major 4x4 operator on an ordered wire pair; the first wire is the
/// most significant bit of the local index.
using Mat4 = std::array<cplx, 16>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr int kMaxQubits = 24;

/// Bad sizes, indices, or malformed configuration.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

/// A numerical precondition failed (non-unitary gate, non-Hermitian input, ...).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

template <std::size_t N>
constexpr std::array<cplx, N * N> identity_matrix() {
    std::array<cplx, N * N> m{};
    for (std::size_t i = 0; i < N; ++i) m[i * N + i] = 1.0;
    return m;
}

template <std::size_t N>
std::array<cplx, N * N> matmul(const std::array<cplx, N * N> &a, const std::array<cplx, N * N> &b) {
    std::array<cplx, N * N> c{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const cplx aik = a[i * N + k];
            for (std::size_t j = 0; j < N; ++j) c[i * N + j] += aik * b[k * N + j];
        }
    return c;
}

template <std::size_t N>
std::array<cplx, N * N> adjoint(const std::array<cplx, N * N> &a) {
    std::array<cplx, N * N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[j * N + i] = std::conj(a[i * N + j]);
    return r;
}

template <std::size_t N>
std::array<cplx, N * N> conjugate(const std::array<cplx, N * N> &a) {
    std::array<cplx, N * N> r{};
    for (std::size_t i = 0; i < N * N; ++i) r[i] = std::conj(a[i]);
    return r;
}

/// max |(U^dagger U - I)_ij|
template <std::size_t N>
double unitarity_defect(const std::array<cplx, N * N> &u) {
    const auto p = matmul<N>(adjoint<N>(u), u);
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            worst = std::max(worst, std::abs(p[i * N + j] - (i == j ? cplx{1.0} : cplx{0.0})));
    return worst;
}

inline double unitarity_defect(const Mat2 &u) { return unitarity_defect<2>(u); }
inline double unitarity_defect(const Mat4 &u) { return unitarity_defect<4>(u); }

}  // namespace entforge
