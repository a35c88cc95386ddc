#pragma once

// Loss 1 - Q and its gradient with respect to the raw parameters.
//
// Three independent routes:
//  * adjoint: one forward and one reverse sweep (Heisenberg picture for the
//    noisy path). Default for training.
//  * parameter_shift: exact shift rules applied to the single-qubit marginals,
//    then chained through Q, which is quadratic in the state. RY needs the
//    two-term +-pi/2 rule; the controlled-RX inside the entangler has
//    generator eigenvalues {0, +-1/2} and needs the four-term rule.
//  * finite_difference: central differences on the raw parameters.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entforge/circuit.hpp"
#include "entforge/measures.hpp"

namespace entforge {

enum class GradientMode { adjoint, parameter_shift, finite_difference };

inline std::string to_string(GradientMode m) {
    switch (m) {
    case GradientMode::adjoint: return "adjoint";
    case GradientMode::parameter_shift: return "parameter_shift";
    case GradientMode::finite_difference: return "finite_difference";
    }
    return "?";
}

inline GradientMode gradient_mode_from_string(const std::string &s) {
    if (s == "adjoint") return GradientMode::adjoint;
    if (s == "parameter_shift") return GradientMode::parameter_shift;
    if (s == "finite_difference") return GradientMode::finite_difference;
    throw ConfigError("unknown gradient mode '" + s + "'");
}

inline double loss_of_state(const State &s) { return 1.0 - meyer_wallach(s); }

inline double loss(const Circuit &c, std::span<const double> params, const std::optional<NoiseModel> &noise) {
    return loss_of_state(forward(c, params, noise));
}

/// dL/d(angle) for each block's activated RY and beam-splitter angles.
struct AngleGradient {
    double loss = 0.0;
    std::vector<double> ry;
    std::vector<double> bs;
};

namespace kernels {

/// <l| H_{wire} |v> over a vector of `total_qubits`.
inline cplx sandwich_1q(std::span<const cplx> l, std::span<const cplx> v, int total_qubits, int wire, const Mat2 &h) {
    const Index pos = bit_position(total_qubits, wire);
    const Index stride = Index{1} << pos;
    cplx acc = 0.0;
    for (Index k = 0; k < v.size() / 2; ++k) {
        const Index i0 = insert_zero_bit(k, pos);
        const Index i1 = i0 | stride;
        acc += std::conj(l[i0]) * (h[0] * v[i0] + h[1] * v[i1]) + std::conj(l[i1]) * (h[2] * v[i0] + h[3] * v[i1]);
    }
    return acc;
}

inline cplx sandwich_2q(std::span<const cplx> l, std::span<const cplx> v, int total_qubits, int wire_a, int wire_b,
                        const Mat4 &h) {
    const Index pa = bit_position(total_qubits, wire_a);
    const Index pb = bit_position(total_qubits, wire_b);
    const Index lo = std::min(pa, pb), hi = std::max(pa, pb);
    const Index ma = Index{1} << pa, mb = Index{1} << pb;
    cplx acc = 0.0;
    for (Index k = 0; k < v.size() / 4; ++k) {
        const Index i00 = insert_zero_bit(insert_zero_bit(k, lo), hi);
        const Index idx[4] = {i00, i00 | mb, i00 | ma, i00 | ma | mb};
        const cplx in[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; ++r) {
            const cplx *row = &h[static_cast<std::size_t>(r) * 4];
            acc += std::conj(l[idx[r]]) * (row[0] * in[0] + row[1] * in[1] + row[2] * in[2] + row[3] * in[3]);
        }
    }
    return acc;
}

}  // namespace kernels

namespace detail {

inline std::vector<Mat2> all_marginals(const State &s) {
    const int n = num_qubits(s);
    std::vector<Mat2> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(reduced_single_qubit(s, i));
    return out;
}

inline double loss_from_marginals(const std::vector<Mat2> &m) {
    double acc = 0.0;
    for (const auto &r : m) acc += 1.0 - purity(r);
    return 1.0 - 2.0 * acc / static_cast<double>(m.size());
}

inline Mat2 scaled(const Mat2 &m, double f) {
    Mat2 r = m;
    for (auto &x : r) x *= f;
    return r;
}

inline Mat2 half_pauli_y() { return scaled(pauli_y(), 0.5); }

// dL = Tr[G drho] with G = (4/N) sum_i rho_i (x) I.
inline StateVector apply_loss_operator(const StateVector &psi, const std::vector<Mat2> &marg) {
    const int n = psi.num_qubits();
    const double f = 4.0 / n;
    StateVector out(n, std::vector<cplx>(psi.dim(), cplx{0.0}));
    for (int i = 0; i < n; ++i) {
        StateVector t = psi;
        kernels::apply_1q(t.amplitudes(), n, i, scaled(marg[static_cast<std::size_t>(i)], f));
        for (Index j = 0; j < psi.dim(); ++j) out[j] += t[j];
    }
    return out;
}

// Dense G for the density path. Stored in a DensityMatrix container purely as
// a 2^n x 2^n operator; it is not a state.
inline DensityMatrix loss_operator_matrix(int n, const std::vector<Mat2> &marg) {
    const Index d = Index{1} << n;
    const double f = 4.0 / n;
    DensityMatrix g(n, std::vector<cplx>(d * d, cplx{0.0}));
    for (int i = 0; i < n; ++i) {
        const Index bit = Index{1} << kernels::bit_position(n, i);
        const Mat2 &m = marg[static_cast<std::size_t>(i)];
        for (Index r = 0; r < d; ++r) {
            const int rb = (r & bit) ? 1 : 0;
            g(r, r) += f * m[static_cast<std::size_t>(rb * 3)];
            g(r, r ^ bit) += f * m[static_cast<std::size_t>(rb * 2 + (1 - rb))];
        }
    }
    return g;
}

inline AngleGradient adjoint_pure(int n, std::span<const PqmBlockSpec> blocks) {
    StateVector psi = zero_state(n);
    for (const auto &b : blocks) {
        b.validate(n);
        apply_1q_unchecked(psi, ry(b.ry_angle), b.wire_a);
        apply_2q_unchecked(psi, pqm_entangler(b.bs_angle), b.wire_a, b.wire_b);
    }
    const auto marg = all_marginals(psi);
    AngleGradient g{loss_from_marginals(marg), std::vector<double>(blocks.size()), std::vector<double>(blocks.size())};
    StateVector lam = apply_loss_operator(psi, marg);

    const Mat4 gen_bs = pqm_entangler_generator();
    const Mat2 gen_ry = half_pauli_y();
    for (std::size_t k = blocks.size(); k-- > 0;) {
        const auto &b = blocks[k];
        g.bs[k] = 2.0 * kernels::sandwich_2q(lam.amplitudes(), psi.amplitudes(), n, b.wire_a, b.wire_b, gen_bs).imag();
        const Mat4 ent_dag = adjoint<4>(pqm_entangler(b.bs_angle));
        apply_2q_unchecked(psi, ent_dag, b.wire_a, b.wire_b);
        apply_2q_unchecked(lam, ent_dag, b.wire_a, b.wire_b);
        g.ry[k] = 2.0 * kernels::sandwich_1q(lam.amplitudes(), psi.amplitudes(), n, b.wire_a, gen_ry).imag();
        const Mat2 ry_dag = adjoint<2>(ry(b.ry_angle));
        apply_1q_unchecked(psi, ry_dag, b.wire_a);
        apply_1q_unchecked(lam, ry_dag, b.wire_a);
    }
    return g;
}

inline AngleGradient adjoint_mixed(int n, std::span<const PqmBlockSpec> blocks, const NoiseModel &noise) {
    noise.validate();
    // Channels are not invertible: keep the input of every block.
    std::vector<DensityMatrix> checkpoints;
    checkpoints.reserve(blocks.size());
    DensityMatrix rho = to_density(zero_state(n));
    for (const auto &b : blocks) {
        checkpoints.push_back(rho);
        apply_block(rho, b, noise);
    }
    const auto marg = all_marginals(rho);
    AngleGradient g{loss_from_marginals(marg), std::vector<double>(blocks.size()), std::vector<double>(blocks.size())};
    DensityMatrix op = loss_operator_matrix(n, marg);
    rho = DensityMatrix();

    const Mat4 gen_bs = pqm_entangler_generator();
    const Mat2 gen_ry = half_pauli_y();
    for (std::size_t k = blocks.size(); k-- > 0;) {
        const auto &b = blocks[k];
        // Recompute the intermediate states of block k.
        DensityMatrix after_ry = std::move(checkpoints[k]);
        apply_1q_unchecked(after_ry, ry(b.ry_angle), b.wire_a);
        DensityMatrix after_ent = after_ry;
        if (noise.dephasing_enabled) kernels::dephase(after_ent.entries(), n, b.wire_a, noise.dephase_p);
        const Mat4 ent = pqm_entangler(b.bs_angle);
        apply_2q_unchecked(after_ent, ent, b.wire_a, b.wire_b);

        if (noise.damping_enabled) {
            kernels::amplitude_damp_adjoint(op.entries(), n, b.wire_b, noise.damping_gamma);
            kernels::amplitude_damp_adjoint(op.entries(), n, b.wire_a, noise.damping_gamma);
        }
        // Tr[G H rho] is <vec G| H_rows |vec rho> on the 2n-wire view.
        g.bs[k] = 2.0 * kernels::sandwich_2q(op.entries(), after_ent.entries(), 2 * n, b.wire_a, b.wire_b, gen_bs).imag();
        apply_2q_unchecked(op, adjoint<4>(ent), b.wire_a, b.wire_b);
        if (noise.dephasing_enabled) kernels::dephase(op.entries(), n, b.wire_a, noise.dephase_p);
        g.ry[k] = 2.0 * kernels::sandwich_1q(op.entries(), after_ry.entries(), 2 * n, b.wire_a, gen_ry).imag();
        apply_1q_unchecked(op, adjoint<2>(ry(b.ry_angle)), b.wire_a);
    }
    return g;
}

inline double marginal_derivative_to_loss(const std::vector<Mat2> &marg, const std::vector<Mat2> &dmarg) {
    // dL = (4/N) sum_i Tr[rho_i drho_i]
    double acc = 0.0;
    for (std::size_t i = 0; i < marg.size(); ++i)
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) acc += (marg[i][static_cast<std::size_t>(r * 2 + c)] * dmarg[i][static_cast<std::size_t>(c * 2 + r)]).real();
    return 4.0 * acc / static_cast<double>(marg.size());
}

inline AngleGradient shift_rule(int n, std::span<const PqmBlockSpec> blocks, const std::optional<NoiseModel> &noise) {
    const auto marg = all_marginals(run_blocks(n, blocks, noise));
    AngleGradient g{loss_from_marginals(marg), std::vector<double>(blocks.size()), std::vector<double>(blocks.size())};

    std::vector<PqmBlockSpec> work(blocks.begin(), blocks.end());
    auto shifted = [&](std::size_t k, bool bs, double delta) {
        double &angle = bs ? work[k].bs_angle : work[k].ry_angle;
        const double saved = angle;
        angle += delta;
        auto m = all_marginals(run_blocks(n, work, noise));
        angle = saved;
        return m;
    };
    auto combine = [&](std::initializer_list<std::pair<double, const std::vector<Mat2> *>> terms) {
        std::vector<Mat2> d(marg.size(), Mat2{});
        for (const auto &[w, m] : terms)
            for (std::size_t i = 0; i < d.size(); ++i)
                for (std::size_t e = 0; e < 4; ++e) d[i][e] += w * (*m)[i][e];
        return d;
    };

    const double c1 = (std::sqrt(2.0) + 1.0) / (4.0 * std::sqrt(2.0));
    const double c2 = (std::sqrt(2.0) - 1.0) / (4.0 * std::sqrt(2.0));
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto rp = shifted(k, false, kPi / 2), rm = shifted(k, false, -kPi / 2);
        g.ry[k] = marginal_derivative_to_loss(marg, combine({{0.5, &rp}, {-0.5, &rm}}));

        const auto bp1 = shifted(k, true, kPi / 2), bm1 = shifted(k, true, -kPi / 2);
        const auto bp3 = shifted(k, true, 1.5 * kPi), bm3 = shifted(k, true, -1.5 * kPi);
        g.bs[k] = marginal_derivative_to_loss(marg, combine({{c1, &bp1}, {-c1, &bm1}, {-c2, &bp3}, {c2, &bm3}}));
    }
    return g;
}

}  // namespace detail

/// Gradient with respect to the activated angles of each block.
inline AngleGradient angle_gradient(int n, std::span<const PqmBlockSpec> blocks, const std::optional<NoiseModel> &noise,
                                    GradientMode mode) {
    switch (mode) {
    case GradientMode::adjoint:
        return noise ? detail::adjoint_mixed(n, blocks, *noise) : detail::adjoint_pure(n, blocks);
    case GradientMode::parameter_shift: return detail::shift_rule(n, blocks, noise);
    case GradientMode::finite_difference: break;
    }
    throw ConfigError("angle_gradient: finite differences act on raw parameters, not angles");
}

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> grad;
};

inline LossAndGradient value_and_gradient(const Circuit &c, std::span<const double> params,
                                          const std::optional<NoiseModel> &noise, GradientMode mode,
                                          double fd_step = 1e-4) {
    c.validate();
    c.check_params(params);
    LossAndGradient out{0.0, std::vector<double>(params.size(), 0.0)};
    if (mode == GradientMode::finite_difference) {
        std::vector<double> p(params.begin(), params.end());
        out.loss = loss(c, p, noise);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double x = p[i];
            p[i] = x + fd_step;
            const double up = loss(c, p, noise);
            p[i] = x - fd_step;
            const double dn = loss(c, p, noise);
            p[i] = x;
            out.grad[i] = (up - dn) / (2.0 * fd_step);
        }
        return out;
    }
    const auto blocks = c.blocks(params);
    const AngleGradient ag = angle_gradient(c.num_qubits(), blocks, noise, mode);
    out.loss = ag.loss;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const std::size_t iry = c.ry_param(k), ibs = c.bs_param(k);
        out.grad[iry] += ag.ry[k] * activate_derivative(params[iry], c.activation);
        out.grad[ibs] += ag.bs[k] * activate_derivative(params[ibs], c.activation);
    }
    return out;
}

inline std::vector<double> gradient(const Circuit &c, std::span<const double> params,
                                    const std::optional<NoiseModel> &noise, GradientMode mode, double fd_step = 1e-4) {
    return value_and_gradient(c, params, noise, mode, fd_step).grad;
}

}  // namespace entforge
