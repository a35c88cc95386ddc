#pragma once

// Meyer-Wallach global entanglement and bipartite negativity.

#include <cmath>
#include <vector>

#include "entforge/linalg.hpp"
#include "entforge/qstate.hpp"

namespace entforge {

/// Q = (2/N) sum_i (1 - Tr[rho_i^2]); 0 for product states, 1 for GHZ.
/// Mixed inputs use the same formula on their single-qubit marginals.
template <class S>
double meyer_wallach(const S &state) {
    const int n = state.num_qubits();
    if (n < 2) throw ConfigError("meyer_wallach needs at least 2 qubits");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += 1.0 - purity(reduced_single_qubit(state, i));
    return 2.0 * acc / n;
}

inline double meyer_wallach(const State &s) {
    return std::visit([](const auto &x) { return meyer_wallach(x); }, s);
}

/// (||rho^{T_B}||_1 - 1) / 2
inline double negativity(const DensityMatrix &rho, const Bipartition &part) {
    return 0.5 * (trace_norm(partial_transpose(rho, part)) - 1.0);
}

/// Pure-state route through the Schmidt coefficients s_k:
/// ((sum_k s_k)^2 - 1) / 2. Equal to the density-matrix route on |psi><psi|.
inline double negativity(const StateVector &psi, const Bipartition &part) {
    const int n = psi.num_qubits();
    part.validate(n);
    // Reduce onto the smaller side; its Gram matrix has the squared Schmidt
    // coefficients as eigenvalues.
    const Bipartition small = part.size() * 2 <= static_cast<std::size_t>(n) ? part : part.complement(n);
    const Index m_small = small.mask(n);
    const std::size_t ks = small.size();
    const Index ds = Index{1} << ks;
    const Index dl = Index{1} << (n - static_cast<int>(ks));

    std::vector<cplx> mat(ds * dl);
    const auto a = psi.amplitudes();
    for (Index i = 0; i < a.size(); ++i) {
        Index s = 0, l = 0;
        int sb = 0, lb = 0;
        for (int pos = 0; pos < n; ++pos) {
            const Index bit = (i >> pos) & 1;
            if ((m_small >> pos) & 1) s |= bit << sb++;
            else l |= bit << lb++;
        }
        mat[s * dl + l] = a[i];
    }
    std::vector<cplx> gram(ds * ds, cplx{0.0});
    for (Index r = 0; r < ds; ++r)
        for (Index c = r; c < ds; ++c) {
            cplx acc = 0.0;
            for (Index k = 0; k < dl; ++k) acc += mat[r * dl + k] * std::conj(mat[c * dl + k]);
            gram[r * ds + c] = acc;
            gram[c * ds + r] = std::conj(acc);
        }
    double sum_s = 0.0;
    for (double lam : linalg::hermitian_eigenvalues(std::move(gram), ds)) sum_s += std::sqrt(std::max(lam, 0.0));
    return 0.5 * (sum_s * sum_s - 1.0);
}

inline double negativity(const State &s, const Bipartition &part) {
    return std::visit([&](const auto &x) { return negativity(x, part); }, s);
}

/// (d_min - 1) / 2 with d_min = 2^min(|B|, n - |B|): the pure-state maximum.
inline double negativity_upper_bound(int num_qubits, const Bipartition &part) {
    part.validate(num_qubits);
    const int k = std::min<int>(static_cast<int>(part.size()), num_qubits - static_cast<int>(part.size()));
    return 0.5 * (std::ldexp(1.0, k) - 1.0);
}

struct MeasureReport {
    double mw = 0.0;
    std::vector<std::pair<Bipartition, double>> negativities;
    std::vector<std::pair<Bipartition, double>> bounds;
};

inline MeasureReport measure_report(const State &s, const std::vector<Bipartition> &parts) {
    MeasureReport r;
    r.mw = meyer_wallach(s);
    const int n = num_qubits(s);
    for (const auto &p : parts) {
        r.negativities.emplace_back(p, negativity(s, p));
        r.bounds.emplace_back(p, negativity_upper_bound(n, p));
    }
    return r;
}

}  // namespace entforge
