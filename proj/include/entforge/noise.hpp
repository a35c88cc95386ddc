#pragma once

// Single-qubit Kraus channels on density matrices. Each channel is applied by
// direct Kraus conjugation restricted to the affected wire, never through a
// 4^n superoperator.

#include <cmath>
#include <span>
#include <string>

#include "entforge/qstate.hpp"

namespace entforge {

/// Gate-level noise attached to every two-qubit block.
struct NoiseModel {
    double dephase_p = 0.01;
    double damping_gamma = 0.01;
    bool dephasing_enabled = false;
    bool damping_enabled = false;

    static NoiseModel dephasing_and_damping(double p, double gamma) { return {p, gamma, true, true}; }
    static NoiseModel damping_only(double gamma) { return {0.0, gamma, false, true}; }
    static NoiseModel dephasing_only(double p) { return {p, 0.0, true, false}; }
    /// Both channels off; still forces the density-matrix path.
    static NoiseModel disabled() { return {0.0, 0.0, false, false}; }

    void validate() const {
        if (!(dephase_p >= 0.0 && dephase_p <= 1.0))
            throw ConfigError("dephase_p must lie in [0,1], got " + std::to_string(dephase_p));
        if (!(damping_gamma >= 0.0 && damping_gamma <= 1.0))
            throw ConfigError("damping_gamma must lie in [0,1], got " + std::to_string(damping_gamma));
    }
};

namespace kernels {

// All kernels below act on a row-major 2^n x 2^n operator.

inline void dephase(std::span<cplx> m, int n, int wire, double p) {
    const Index d = Index{1} << n;
    const Index bit = Index{1} << bit_position(n, wire);
    const double f = 1.0 - 2.0 * p;
    for (Index r = 0; r < d; ++r) {
        cplx *row = &m[r * d];
        const Index rb = r & bit;
        for (Index c = 0; c < d; ++c)
            if ((c & bit) != rb) row[c] *= f;
    }
}

/// K0 rho K0^dag + K1 rho K1^dag with K0 = diag(1, sqrt(1-g)), K1 = sqrt(g)|0><1|.
inline void amplitude_damp(std::span<cplx> m, int n, int wire, double gamma) {
    const Index d = Index{1} << n;
    const Index pos = bit_position(n, wire);
    const Index bit = Index{1} << pos;
    const double s = std::sqrt(1.0 - gamma);
    for (Index kr = 0; kr < d / 2; ++kr) {
        const Index r0 = insert_zero_bit(kr, pos);
        const Index r1 = r0 | bit;
        for (Index kc = 0; kc < d / 2; ++kc) {
            const Index c0 = insert_zero_bit(kc, pos);
            const Index c1 = c0 | bit;
            const cplx x11 = m[r1 * d + c1];
            m[r0 * d + c0] += gamma * x11;
            m[r0 * d + c1] *= s;
            m[r1 * d + c0] *= s;
            m[r1 * d + c1] = (1.0 - gamma) * x11;
        }
    }
}

/// Heisenberg-picture (adjoint) amplitude damping: K0^dag G K0 + K1^dag G K1.
inline void amplitude_damp_adjoint(std::span<cplx> m, int n, int wire, double gamma) {
    const Index d = Index{1} << n;
    const Index pos = bit_position(n, wire);
    const Index bit = Index{1} << pos;
    const double s = std::sqrt(1.0 - gamma);
    for (Index kr = 0; kr < d / 2; ++kr) {
        const Index r0 = insert_zero_bit(kr, pos);
        const Index r1 = r0 | bit;
        for (Index kc = 0; kc < d / 2; ++kc) {
            const Index c0 = insert_zero_bit(kc, pos);
            const Index c1 = c0 | bit;
            m[r1 * d + c1] = (1.0 - gamma) * m[r1 * d + c1] + gamma * m[r0 * d + c0];
            m[r0 * d + c1] *= s;
            m[r1 * d + c0] *= s;
        }
    }
}

}  // namespace kernels

inline void check_probability(double p, const char *name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
}

/// (1-p) rho + p Z rho Z on `wire`.
inline void dephase_inplace(DensityMatrix &rho, double p, int wire) {
    check_probability(p, "dephasing probability");
    detail::check_wire(rho.num_qubits(), wire);
    kernels::dephase(rho.entries(), rho.num_qubits(), wire, p);
}

inline void amplitude_damp_inplace(DensityMatrix &rho, double gamma, int wire) {
    check_probability(gamma, "damping gamma");
    detail::check_wire(rho.num_qubits(), wire);
    kernels::amplitude_damp(rho.entries(), rho.num_qubits(), wire, gamma);
}

inline DensityMatrix dephase(DensityMatrix rho, double p, int wire) {
    dephase_inplace(rho, p, wire);
    return rho;
}

inline DensityMatrix amplitude_damp(DensityMatrix rho, double gamma, int wire) {
    amplitude_damp_inplace(rho, gamma, wire);
    return rho;
}

}  // namespace entforge
