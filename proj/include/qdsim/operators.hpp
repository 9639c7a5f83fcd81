#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>

#include "geometry.hpp"

namespace qd {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

struct dimension_overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mutable process-wide cap on the dense-operator qubit count. The CLI sets it
// once at startup (flag or QDOT_MAX_QUBITS); builders read it afterwards.
inline std::size_t& max_qubits_limit() {
    static std::size_t limit = 14;
    return limit;
}

inline void check_qubit_count(std::size_t n) {
    if (n == 0) throw invalid_input("operator: need at least one qubit");
    if (n > max_qubits_limit())
        throw dimension_overflow("operator: qubit count exceeds limit");
}

inline std::size_t dim_of(std::size_t n) { return std::size_t{1} << n; }

inline cmat kron(const cmat& a, const cmat& b) {
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

inline cmat identity(std::size_t dim) {
    return cmat::Identity(static_cast<Eigen::Index>(dim),
                          static_cast<Eigen::Index>(dim));
}

inline cmat pauli_x() {
    cmat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline cmat pauli_y() {
    cmat m(2, 2);
    const std::complex<double> i(0, 1);
    m << 0, -i, i, 0;
    return m;
}

inline cmat pauli_z() {
    cmat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// Basis convention: |0> = excess charge on the upper dot (spin up),
// qubit 0 occupies the most significant bit of the basis index.
// I_gamma = sigma_gamma / 2, so I_z|0> = +1/2 |0>.
inline cmat op_on_qubit(const cmat& op2, std::size_t qubit, std::size_t n) {
    check_qubit_count(n);
    if (qubit >= n) throw invalid_input("operator: qubit index out of range");
    cmat out = identity(dim_of(qubit));
    out = kron(out, op2);
    out = kron(out, identity(dim_of(n - 1 - qubit)));
    return out;
}

inline cmat spin_x(std::size_t qubit, std::size_t n) {
    return 0.5 * op_on_qubit(pauli_x(), qubit, n);
}
inline cmat spin_y(std::size_t qubit, std::size_t n) {
    return 0.5 * op_on_qubit(pauli_y(), qubit, n);
}
inline cmat spin_z(std::size_t qubit, std::size_t n) {
    return 0.5 * op_on_qubit(pauli_z(), qubit, n);
}

inline double hermiticity_error(const cmat& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double unitarity_error(const cmat& u) {
    return (u.adjoint() * u - identity(static_cast<std::size_t>(u.rows())))
        .cwiseAbs()
        .maxCoeff();
}

// exp(i s H) for Hermitian H, by eigendecomposition. Exactly unitary up to
// rounding for any step size.
inline cmat expi_hermitian(const cmat& h, double s) {
    Eigen::SelfAdjointEigenSolver<cmat> es(h);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("expi_hermitian: eigensolver failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    cvec phases(ev.size());
    const std::complex<double> i(0, 1);
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        phases(k) = std::exp(i * (s * ev(k)));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
}

} // namespace qd
