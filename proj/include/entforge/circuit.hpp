#pragma once

// A network: a topology repeated `depth` times, one block per pair, angles
// produced by an activation from raw trainable parameters.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entforge/activation.hpp"
#include "entforge/gates.hpp"
#include "entforge/noise.hpp"
#include "entforge/qstate.hpp"
#include "entforge/topology.hpp"

namespace entforge {

struct Circuit {
    Topology topology;
    int depth = 1;
    Activation activation = Activation::sine();
    /// 1: one parameter drives both RY and the beam-splitter angle.
    /// 2: independent RY and beam-splitter parameters, both activated.
    int params_per_block = 1;

    int num_qubits() const { return topology.num_qubits; }
    std::size_t num_blocks() const { return static_cast<std::size_t>(depth) * topology.pairs.size(); }
    std::size_t num_params() const { return num_blocks() * static_cast<std::size_t>(params_per_block); }

    void validate() const {
        topology.validate();
        activation.validate();
        if (depth < 1 || depth > 2) throw ConfigError("circuit depth must be 1 or 2, got " + std::to_string(depth));
        if (params_per_block < 1 || params_per_block > 2)
            throw ConfigError("params_per_block must be 1 or 2, got " + std::to_string(params_per_block));
    }

    void check_params(std::span<const double> params) const {
        if (params.size() != num_params())
            throw ConfigError("parameter vector has length " + std::to_string(params.size()) + ", circuit needs " +
                              std::to_string(num_params()));
    }

    /// Raw parameter index feeding the RY angle of block k (bs index = ry + ppb - 1).
    std::size_t ry_param(std::size_t block) const { return block * static_cast<std::size_t>(params_per_block); }
    std::size_t bs_param(std::size_t block) const { return ry_param(block) + static_cast<std::size_t>(params_per_block) - 1; }

    /// Activated block list in application order.
    std::vector<PqmBlockSpec> blocks(std::span<const double> params) const {
        check_params(params);
        std::vector<PqmBlockSpec> out;
        out.reserve(num_blocks());
        const auto &pairs = topology.pairs;
        for (std::size_t k = 0; k < num_blocks(); ++k) {
            const auto &[a, b] = pairs[k % pairs.size()];
            out.push_back({a, b, activate(params[ry_param(k)], activation), activate(params[bs_param(k)], activation)});
        }
        return out;
    }
};

/// Runs explicit blocks from |0...0>; density path iff noise is present.
inline State run_blocks(int num_qubits, std::span<const PqmBlockSpec> blocks, const std::optional<NoiseModel> &noise) {
    StateVector psi = zero_state(num_qubits);
    if (!noise) {
        for (const auto &b : blocks) apply_block(psi, b, std::nullopt);
        return psi;
    }
    DensityMatrix rho = to_density(psi);
    for (const auto &b : blocks) apply_block(rho, b, noise);
    return rho;
}

inline State forward(const Circuit &c, std::span<const double> params, const std::optional<NoiseModel> &noise) {
    c.validate();
    const auto b = c.blocks(params);
    return run_blocks(c.num_qubits(), b, noise);
}

}  // namespace entforge
