#pragma once

// Pure and mixed n-qubit states and the tensor primitives built on them.
//
// Basis convention: qubit 0 is the most significant bit of a basis index, so
// in |q0 q1 ... q_{n-1}> qubit q lives at bit position (n - 1 - q).
//
// A density matrix is stored row-major; its entry (r, c) sits at r * 2^n + c.
// Viewed as a 2n-qubit vector, row qubit q is "wire" q and column qubit q is
// "wire" n + q, so U rho U^dagger is U on the row wires and conj(U) on the
// column wires.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "entforge/linalg.hpp"
#include "entforge/types.hpp"

namespace entforge {

namespace kernels {

inline constexpr Index bit_position(int total_qubits, int wire) {
    return static_cast<Index>(total_qubits - 1 - wire);
}

inline constexpr Index insert_zero_bit(Index i, Index pos) {
    const Index low = i & ((Index{1} << pos) - 1);
    return ((i >> pos) << (pos + 1)) | low;
}

/// Applies a single-qubit operator to `wire` of a vector over `total_qubits`.
inline void apply_1q(std::span<cplx> v, int total_qubits, int wire, const Mat2 &m) {
    const Index pos = bit_position(total_qubits, wire);
    const Index stride = Index{1} << pos;
    const Index half = v.size() / 2;
    for (Index k = 0; k < half; ++k) {
        const Index i0 = insert_zero_bit(k, pos);
        const Index i1 = i0 | stride;
        const cplx a0 = v[i0];
        const cplx a1 = v[i1];
        v[i0] = m[0] * a0 + m[1] * a1;
        v[i1] = m[2] * a0 + m[3] * a1;
    }
}

/// Applies a two-qubit operator; `wire_a` is the high bit of the local index.
inline void apply_2q(std::span<cplx> v, int total_qubits, int wire_a, int wire_b, const Mat4 &m) {
    const Index pa = bit_position(total_qubits, wire_a);
    const Index pb = bit_position(total_qubits, wire_b);
    const Index lo = std::min(pa, pb);
    const Index hi = std::max(pa, pb);
    const Index ma = Index{1} << pa;
    const Index mb = Index{1} << pb;
    const Index quarter = v.size() / 4;
    for (Index k = 0; k < quarter; ++k) {
        const Index i00 = insert_zero_bit(insert_zero_bit(k, lo), hi);
        const Index idx[4] = {i00, i00 | mb, i00 | ma, i00 | ma | mb};
        const cplx in[4] = {v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
        for (int r = 0; r < 4; ++r) {
            const cplx *row = &m[static_cast<std::size_t>(r) * 4];
            v[idx[r]] = row[0] * in[0] + row[1] * in[1] + row[2] * in[2] + row[3] * in[3];
        }
    }
}

}  // namespace kernels

inline void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits)
        throw ConfigError("qubit count " + std::to_string(n) + " outside [1, " + std::to_string(kMaxQubits) + "]");
}

class StateVector {
  public:
    StateVector() = default;
    StateVector(int num_qubits, std::vector<cplx> amplitudes) : n_(num_qubits), amps_(std::move(amplitudes)) {
        check_qubit_count(n_);
        if (amps_.size() != (Index{1} << n_)) throw ConfigError("StateVector: amplitude count must be 2^n");
    }

    int num_qubits() const { return n_; }
    Index dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    std::span<cplx> amplitudes() { return amps_; }
    const cplx &operator[](Index i) const { return amps_[i]; }
    cplx &operator[](Index i) { return amps_[i]; }

    double norm_squared() const {
        double s = 0.0;
        for (const auto &a : amps_) s += std::norm(a);
        return s;
    }

  private:
    int n_ = 0;
    std::vector<cplx> amps_;
};

class DensityMatrix {
  public:
    DensityMatrix() = default;
    DensityMatrix(int num_qubits, std::vector<cplx> entries) : n_(num_qubits), entries_(std::move(entries)) {
        check_qubit_count(n_);
        const Index d = Index{1} << n_;
        if (entries_.size() != d * d) throw ConfigError("DensityMatrix: entry count must be 4^n");
    }

    int num_qubits() const { return n_; }
    Index dim() const { return Index{1} << n_; }
    std::span<const cplx> entries() const { return entries_; }
    std::span<cplx> entries() { return entries_; }
    const cplx &operator()(Index r, Index c) const { return entries_[r * dim() + c]; }
    cplx &operator()(Index r, Index c) { return entries_[r * dim() + c]; }

    cplx trace() const {
        cplx t = 0.0;
        for (Index i = 0; i < dim(); ++i) t += (*this)(i, i);
        return t;
    }

  private:
    int n_ = 0;
    std::vector<cplx> entries_;
};

using State = std::variant<StateVector, DensityMatrix>;

inline int num_qubits(const State &s) {
    return std::visit([](const auto &x) { return x.num_qubits(); }, s);
}

/// Subsystem B of a bipartition; the complement is implied. Indices are kept
/// sorted and unique.
class Bipartition {
  public:
    Bipartition() = default;
    Bipartition(std::initializer_list<int> side_b) : Bipartition(std::vector<int>(side_b)) {}
    explicit Bipartition(std::vector<int> side_b) : side_b_(std::move(side_b)) {
        std::sort(side_b_.begin(), side_b_.end());
        if (side_b_.empty()) throw ConfigError("bipartition: side B is empty");
        if (std::adjacent_find(side_b_.begin(), side_b_.end()) != side_b_.end())
            throw ConfigError("bipartition: duplicate qubit index");
        if (side_b_.front() < 0) throw ConfigError("bipartition: negative qubit index");
    }

    std::span<const int> side_b() const { return side_b_; }
    std::size_t size() const { return side_b_.size(); }

    /// Throws unless B is a proper subset of {0..n-1}.
    void validate(int n) const {
        if (side_b_.empty()) throw ConfigError("bipartition: side B is empty");
        if (side_b_.back() >= n)
            throw ConfigError("bipartition " + to_string() + " out of range for " + std::to_string(n) + " qubits");
        if (static_cast<int>(side_b_.size()) >= n)
            throw ConfigError("bipartition " + to_string() + " is not a proper subset");
    }

    Bipartition complement(int n) const {
        validate(n);
        std::vector<int> rest;
        for (int q = 0; q < n; ++q)
            if (!std::binary_search(side_b_.begin(), side_b_.end(), q)) rest.push_back(q);
        return Bipartition(std::move(rest));
    }

    /// Bit mask of side B in basis-index coordinates for an n-qubit register.
    Index mask(int n) const {
        Index m = 0;
        for (int q : side_b_) m |= Index{1} << kernels::bit_position(n, q);
        return m;
    }

    /// Serialized as a sorted index list, e.g. "[0,1,2]".
    std::string to_string() const {
        std::string s = "[";
        for (std::size_t i = 0; i < side_b_.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(side_b_[i]);
        }
        return s + "]";
    }

    static Bipartition parse(const std::string &text) {
        std::vector<int> idx;
        std::string tok;
        for (char c : text) {
            if (c == '[' || c == ']' || c == ' ') continue;
            if (c == ',') {
                if (tok.empty()) throw ConfigError("bipartition: empty element in '" + text + "'");
                idx.push_back(std::stoi(tok));
                tok.clear();
            } else if ((c >= '0' && c <= '9') || c == '-') {
                tok += c;
            } else {
                throw ConfigError("bipartition: unexpected character in '" + text + "'");
            }
        }
        if (!tok.empty()) idx.push_back(std::stoi(tok));
        return Bipartition(std::move(idx));
    }

    friend bool operator==(const Bipartition &, const Bipartition &) = default;

  private:
    std::vector<int> side_b_;
};

inline StateVector zero_state(int num_qubits) {
    check_qubit_count(num_qubits);
    std::vector<cplx> a(Index{1} << num_qubits, cplx{0.0});
    a[0] = 1.0;
    return StateVector(num_qubits, std::move(a));
}

inline DensityMatrix to_density(const StateVector &psi) {
    const Index d = psi.dim();
    std::vector<cplx> e(d * d);
    const auto a = psi.amplitudes();
    for (Index r = 0; r < d; ++r) {
        const cplx ar = a[r];
        for (Index c = 0; c < d; ++c) e[r * d + c] = ar * std::conj(a[c]);
    }
    return DensityMatrix(psi.num_qubits(), std::move(e));
}

namespace detail {

inline void check_wire(int n, int w) {
    if (w < 0 || w >= n)
        throw ConfigError("qubit index " + std::to_string(w) + " out of range for " + std::to_string(n) + " qubits");
}

inline void check_unitary_1q(const Mat2 &u) {
    if (unitarity_defect<2>(u) > 1e-10) throw NumericalError("apply_unitary: operator is not unitary");
}

inline void check_unitary_2q(const Mat4 &u) {
    if (unitarity_defect<4>(u) > 1e-10) throw NumericalError("apply_unitary: operator is not unitary");
}

}  // namespace detail

// Unchecked variants used on hot paths where the operator is unitary by
// construction.
inline void apply_1q_unchecked(StateVector &s, const Mat2 &u, int w) {
    kernels::apply_1q(s.amplitudes(), s.num_qubits(), w, u);
}
inline void apply_1q_unchecked(DensityMatrix &rho, const Mat2 &u, int w) {
    const int n = rho.num_qubits();
    kernels::apply_1q(rho.entries(), 2 * n, w, u);
    kernels::apply_1q(rho.entries(), 2 * n, n + w, conjugate<2>(u));
}
inline void apply_2q_unchecked(StateVector &s, const Mat4 &u, int a, int b) {
    kernels::apply_2q(s.amplitudes(), s.num_qubits(), a, b, u);
}
inline void apply_2q_unchecked(DensityMatrix &rho, const Mat4 &u, int a, int b) {
    const int n = rho.num_qubits();
    kernels::apply_2q(rho.entries(), 2 * n, a, b, u);
    kernels::apply_2q(rho.entries(), 2 * n, n + a, n + b, conjugate<4>(u));
}

/// psi <- U psi, or rho <- U rho U^dagger, for a one-qubit U on `wire`.
template <class S>
void apply_unitary(S &state, const Mat2 &u, int wire) {
    detail::check_wire(state.num_qubits(), wire);
    detail::check_unitary_1q(u);
    apply_1q_unchecked(state, u, wire);
}

/// Two-qubit U on the ordered pair (wire_a, wire_b); wire_a is the first
/// (most significant) index of U's local basis.
template <class S>
void apply_unitary(S &state, const Mat4 &u, int wire_a, int wire_b) {
    detail::check_wire(state.num_qubits(), wire_a);
    detail::check_wire(state.num_qubits(), wire_b);
    if (wire_a == wire_b) throw ConfigError("apply_unitary: wire collision");
    detail::check_unitary_2q(u);
    apply_2q_unchecked(state, u, wire_a, wire_b);
}

/// Partial trace down to qubit i (2x2, row-major).
inline Mat2 reduced_single_qubit(const StateVector &psi, int i) {
    detail::check_wire(psi.num_qubits(), i);
    const Index pos = kernels::bit_position(psi.num_qubits(), i);
    const Index stride = Index{1} << pos;
    const auto a = psi.amplitudes();
    double p0 = 0.0, p1 = 0.0;
    cplx c01 = 0.0;
    for (Index k = 0; k < a.size() / 2; ++k) {
        const Index i0 = kernels::insert_zero_bit(k, pos);
        const cplx x0 = a[i0];
        const cplx x1 = a[i0 | stride];
        p0 += std::norm(x0);
        p1 += std::norm(x1);
        c01 += x0 * std::conj(x1);
    }
    return Mat2{cplx{p0}, c01, std::conj(c01), cplx{p1}};
}

inline Mat2 reduced_single_qubit(const DensityMatrix &rho, int i) {
    detail::check_wire(rho.num_qubits(), i);
    const Index pos = kernels::bit_position(rho.num_qubits(), i);
    const Index stride = Index{1} << pos;
    const Index d = rho.dim();
    Mat2 out{};
    for (Index k = 0; k < d / 2; ++k) {
        const Index i0 = kernels::insert_zero_bit(k, pos);
        const Index i1 = i0 | stride;
        out[0] += rho(i0, i0);
        out[1] += rho(i0, i1);
        out[2] += rho(i1, i0);
        out[3] += rho(i1, i1);
    }
    return out;
}

inline Mat2 reduced_single_qubit(const State &s, int i) {
    return std::visit([i](const auto &x) { return reduced_single_qubit(x, i); }, s);
}

/// Tr[rho^2] for a 2x2 density matrix.
inline double purity(const Mat2 &rho) {
    cplx t = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) t += rho[i * 2 + k] * rho[k * 2 + i];
    return t.real();
}

/// Tr[rho^2] for a full density matrix, as sum |rho_jk|^2 (Hermitian input).
inline double purity(const DensityMatrix &rho) {
    double s = 0.0;
    for (const auto &x : rho.entries()) s += std::norm(x);
    return s;
}

/// Row-major dim x dim Hermitian matrix with its register width.
struct HermitianMatrix {
    int num_qubits = 0;
    std::vector<cplx> entries;
    Index dim() const { return Index{1} << num_qubits; }
};

namespace detail {

inline HermitianMatrix partial_transpose(std::span<const cplx> m, int n, const Bipartition &part) {
    part.validate(n);
    const Index mb = part.mask(n);
    const Index d = Index{1} << n;
    HermitianMatrix out{n, std::vector<cplx>(d * d)};
    for (Index r = 0; r < d; ++r)
        for (Index c = 0; c < d; ++c) {
            const Index r2 = (r & ~mb) | (c & mb);
            const Index c2 = (c & ~mb) | (r & mb);
            out.entries[r2 * d + c2] = m[r * d + c];
        }
    return out;
}

}  // namespace detail

/// Transposes the side-B indices of rho.
inline HermitianMatrix partial_transpose(const DensityMatrix &rho, const Bipartition &part) {
    return detail::partial_transpose(rho.entries(), rho.num_qubits(), part);
}

inline HermitianMatrix partial_transpose(const HermitianMatrix &h, const Bipartition &part) {
    return detail::partial_transpose(h.entries, h.num_qubits, part);
}

/// Sum of |eigenvalue| of a Hermitian matrix.
inline double trace_norm(std::vector<cplx> entries, std::size_t dim) {
    if (linalg::hermiticity_defect(entries, dim) > 1e-8) throw NumericalError("trace_norm: input is not Hermitian");
    double s = 0.0;
    for (double l : linalg::hermitian_eigenvalues(std::move(entries), dim)) s += std::abs(l);
    return s;
}

inline double trace_norm(const HermitianMatrix &h) { return trace_norm(h.entries, h.dim()); }

}  // namespace entforge
