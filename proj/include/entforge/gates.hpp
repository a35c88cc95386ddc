#pragma once

// Primitive gates and the two-qubit memristor-type beam-splitter block.
//
// Block on the ordered pair (A, B), applied left to right:
//   RY(ry) on A -> CNOT(B->A) -> CRX(A->B, -bs) -> CNOT(B->A) -> SWAP(A, B)
// Two-qubit matrices use (A, B) as (high, low) bit of the local index.

#include <cmath>
#include <optional>
#include <string>
#include <variant>

#include "entforge/noise.hpp"
#include "entforge/qstate.hpp"

namespace entforge {

/// exp(-i theta Y / 2)
inline Mat2 ry(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    return Mat2{c, -s, s, c};
}

/// exp(-i theta X / 2)
inline Mat2 rx(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    return Mat2{c, cplx{0.0, -s}, cplx{0.0, -s}, c};
}

inline Mat2 pauli_x() { return Mat2{0.0, 1.0, 1.0, 0.0}; }
inline Mat2 pauli_y() { return Mat2{0.0, cplx{0.0, -1.0}, cplx{0.0, 1.0}, 0.0}; }
inline Mat2 pauli_z() { return Mat2{1.0, 0.0, 0.0, -1.0}; }

/// Controlled RX, control = first wire.
inline Mat4 crx(double theta) {
    Mat4 m = identity_matrix<4>();
    const Mat2 r = rx(theta);
    m[2 * 4 + 2] = r[0];
    m[2 * 4 + 3] = r[1];
    m[3 * 4 + 2] = r[2];
    m[3 * 4 + 3] = r[3];
    return m;
}

/// CNOT with control = first wire, target = second.
inline Mat4 cnot() {
    Mat4 m{};
    m[0 * 4 + 0] = m[1 * 4 + 1] = m[2 * 4 + 3] = m[3 * 4 + 2] = 1.0;
    return m;
}

/// CNOT with control = second wire, target = first.
inline Mat4 cnot_reversed() {
    Mat4 m{};
    m[0 * 4 + 0] = m[1 * 4 + 3] = m[2 * 4 + 2] = m[3 * 4 + 1] = 1.0;
    return m;
}

inline Mat4 swap() {
    Mat4 m{};
    m[0 * 4 + 0] = m[1 * 4 + 2] = m[2 * 4 + 1] = m[3 * 4 + 3] = 1.0;
    return m;
}

inline Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) m[(2 * i + k) * 4 + (2 * j + l)] = a[2 * i + j] * b[2 * k + l];
    return m;
}

/// SWAP . CNOT(B->A) . CRX(A->B, -bs) . CNOT(B->A)
inline Mat4 pqm_entangler(double bs_angle) {
    const Mat4 c = cnot_reversed();
    return matmul<4>(swap(), matmul<4>(c, matmul<4>(crx(-bs_angle), c)));
}

/// Hermitian G with d/d(bs) pqm_entangler(bs) = -i G pqm_entangler(bs).
inline Mat4 pqm_entangler_generator() {
    // CRX(phi) = exp(-i phi |1><1| (x) X / 2); phi = -bs flips the sign.
    Mat4 h = kron(Mat2{0.0, 0.0, 0.0, 1.0}, pauli_x());
    for (auto &x : h) x *= -0.5;
    const Mat4 w = matmul<4>(swap(), cnot_reversed());
    return matmul<4>(w, matmul<4>(h, adjoint<4>(w)));
}

/// Full block unitary: entangler(bs) . (RY(ry) (x) I).
inline Mat4 pqm_block_unitary(double ry_angle, double bs_angle) {
    return matmul<4>(pqm_entangler(bs_angle), kron(ry(ry_angle), identity_matrix<2>()));
}

/// One block placed on a wire pair, with already-activated angles.
struct PqmBlockSpec {
    int wire_a = 0;
    int wire_b = 1;
    double ry_angle = 0.0;
    double bs_angle = 0.0;

    void validate(int n) const {
        detail::check_wire(n, wire_a);
        detail::check_wire(n, wire_b);
        if (wire_a == wire_b) throw ConfigError("block wires must differ");
        if (!std::isfinite(ry_angle) || !std::isfinite(bs_angle)) throw ConfigError("block angles must be finite");
    }
};

/// RY on A, dephasing on A, entangler on (A, B), amplitude damping on A and B.
inline void apply_block(DensityMatrix &rho, const PqmBlockSpec &spec, const std::optional<NoiseModel> &noise) {
    spec.validate(rho.num_qubits());
    if (noise) noise->validate();
    apply_1q_unchecked(rho, ry(spec.ry_angle), spec.wire_a);
    if (noise && noise->dephasing_enabled) dephase_inplace(rho, noise->dephase_p, spec.wire_a);
    apply_2q_unchecked(rho, pqm_entangler(spec.bs_angle), spec.wire_a, spec.wire_b);
    if (noise && noise->damping_enabled) {
        amplitude_damp_inplace(rho, noise->damping_gamma, spec.wire_a);
        amplitude_damp_inplace(rho, noise->damping_gamma, spec.wire_b);
    }
}

inline void apply_block(StateVector &psi, const PqmBlockSpec &spec, const std::optional<NoiseModel> &noise) {
    if (noise) throw ConfigError("apply_block: noise requires a DensityMatrix; lift the state with to_density first");
    spec.validate(psi.num_qubits());
    apply_2q_unchecked(psi, pqm_block_unitary(spec.ry_angle, spec.bs_angle), spec.wire_a, spec.wire_b);
}

inline void apply_block(State &state, const PqmBlockSpec &spec, const std::optional<NoiseModel> &noise) {
    std::visit([&](auto &s) { apply_block(s, spec, noise); }, state);
}

}  // namespace entforge
