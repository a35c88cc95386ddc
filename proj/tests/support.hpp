#pragma once

#include <span>

#include "entforge/qstate.hpp"
#include "oracle.hpp"

namespace support {

inline oracle::Dense dense(const entforge::DensityMatrix &rho) {
    const auto d = static_cast<int>(rho.dim());
    oracle::Dense m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) m(r, c) = rho(r, c);
    return m;
}

inline oracle::Dense dense(const entforge::HermitianMatrix &h) {
    return oracle::to_dense(h.entries, static_cast<int>(h.dim()));
}

inline Eigen::VectorXcd vec(const entforge::StateVector &psi) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(psi.dim()));
    for (entforge::Index i = 0; i < psi.dim(); ++i) v(static_cast<Eigen::Index>(i)) = psi[i];
    return v;
}

inline entforge::StateVector state(int n, const Eigen::VectorXcd &v) {
    std::vector<entforge::cplx> a(v.data(), v.data() + v.size());
    return entforge::StateVector(n, std::move(a));
}

inline entforge::DensityMatrix density(int n, const oracle::Dense &m) {
    return entforge::DensityMatrix(n, oracle::from_dense(m));
}

inline oracle::Dense projector(const Eigen::VectorXcd &v) { return v * v.adjoint(); }

inline Eigen::VectorXcd ghz(int n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << n);
    v(0) = v((1 << n) - 1) = 1.0 / std::sqrt(2.0);
    return v;
}

inline Eigen::VectorXcd basis(int n, int index) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << n);
    v(index) = 1.0;
    return v;
}

inline double max_abs_diff(const oracle::Dense &a, const oracle::Dense &b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace support
