#pragma once

// Dense complex linear algebra for Hilbert-space dimensions 2, 4 and 16,
// plus the quantum-information primitives (partial trace, entropies) used
// throughout the library. Eigen provides the matrix engine; this header
// fixes the conventions:
//
//   * tensor products are built with the LEFT factor most significant,
//   * the global slot order is (S1, S2, A1, A2),
//   * the qubit basis is ordered |sigma_z = +1> = index 0,
//   * vectorization is column-stacking (Eigen's native storage order).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tolerances.hpp"

namespace qcollide {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index   = Eigen::Index;

// ---------------------------------------------------------------------------
// Elementary operators
// ---------------------------------------------------------------------------

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

inline const Matrix& pauli_x() {
    static const Matrix m = (Matrix(2, 2) << 0, 1, 1, 0).finished();
    return m;
}
inline const Matrix& pauli_y() {
    static const Matrix m =
        (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
    return m;
}
inline const Matrix& pauli_z() {
    static const Matrix m = (Matrix(2, 2) << 1, 0, 0, -1).finished();
    return m;
}
// sigma_+ = |sz=+1><sz=-1| raises the spin; sigma_- lowers it.
inline const Matrix& sigma_plus() {
    static const Matrix m = (Matrix(2, 2) << 0, 1, 0, 0).finished();
    return m;
}
inline const Matrix& sigma_minus() {
    static const Matrix m = (Matrix(2, 2) << 0, 0, 1, 0).finished();
    return m;
}

// ---------------------------------------------------------------------------
// Checked access and structural validation
// ---------------------------------------------------------------------------

inline Complex entry(const Matrix& m, Index i, Index j) {
    if (i < 0 || j < 0 || i >= m.rows() || j >= m.cols())
        throw std::out_of_range("matrix entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") out of bounds for " +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
    return m(i, j);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double eps = tol::hermiticity) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= eps;
}

inline void require_hermitian(const Matrix& m, const char* what) {
    if (!is_hermitian(m))
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

inline void require_unitary(const Matrix& u, const char* what) {
    if (u.rows() != u.cols() ||
        max_abs(u.adjoint() * u - identity(u.rows())) > tol::unitarity)
        throw std::invalid_argument(std::string(what) + ": matrix is not unitary");
}

// Validates the density-matrix invariants: Hermitian, unit trace, positive
// semidefinite up to the documented floor.
inline void require_density(const Matrix& rho, const char* what) {
    require_hermitian(rho, what);
    if (std::abs(rho.trace().real() - 1.0) > tol::unit_trace ||
        std::abs(rho.trace().imag()) > tol::unit_trace)
        throw std::invalid_argument(std::string(what) + ": trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::psd_floor)
        throw std::invalid_argument(std::string(what) +
                                    ": state has a negative eigenvalue");
}

// Thin validating wrappers. Construction checks the invariants once; the
// wrapped matrix is then freely usable through Eigen. at() is bounds-checked.
class DensityMatrix {
  public:
    explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
        require_density(m_, "DensityMatrix");
    }
    const Matrix& matrix() const { return m_; }
    operator const Matrix&() const { return m_; }
    Complex at(Index i, Index j) const { return entry(m_, i, j); }
    Index dim() const { return m_.rows(); }

  private:
    Matrix m_;
};

class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(Matrix m) : m_(std::move(m)) {
        require_unitary(m_, "UnitaryMatrix");
    }
    const Matrix& matrix() const { return m_; }
    operator const Matrix&() const { return m_; }
    Complex at(Index i, Index j) const { return entry(m_, i, j); }
    Index dim() const { return m_.rows(); }

  private:
    Matrix m_;
};

// ---------------------------------------------------------------------------
// Tensor algebra
// ---------------------------------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Partial trace over the slots NOT listed in `keep`. `dims` gives the
// dimension of every tensor slot, most significant first; `keep` lists the
// slot indices to retain (ascending). The kept slots keep their relative
// order, so tracing (S1,S2,A1,A2) down to {0,1} yields the system pair.
inline Matrix partial_trace(const Matrix& rho, const std::vector<int>& keep,
                            const std::vector<int>& dims) {
    Index total = 1;
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("partial_trace: bad slot dimension");
        total *= d;
    }
    if (total != rho.rows() || rho.rows() != rho.cols())
        throw std::invalid_argument("partial_trace: layout does not match matrix");
    for (size_t i = 1; i < keep.size(); ++i)
        if (keep[i] <= keep[i - 1])
            throw std::invalid_argument("partial_trace: keep list must be ascending");

    const int n = static_cast<int>(dims.size());
    std::vector<int> is_kept(n, 0);
    Index dkeep = 1, dtrace = 1;
    for (int s : keep) {
        if (s < 0 || s >= n) throw std::invalid_argument("partial_trace: bad slot");
        is_kept[s] = 1;
        dkeep *= dims[s];
    }
    for (int s = 0; s < n; ++s)
        if (!is_kept[s]) dtrace *= dims[s];

    // Strides of each slot in the flattened index (row-major over slots).
    std::vector<Index> stride(n, 1);
    for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];

    // Enumerate kept and traced multi-indices, mapping each to its offset.
    std::vector<Index> keep_offsets(dkeep, 0), trace_offsets(dtrace, 0);
    {
        Index count = 0;
        std::vector<int> idx(n, 0);
        auto enumerate = [&](bool kept_slots, std::vector<Index>& out) {
            std::fill(idx.begin(), idx.end(), 0);
            count = 0;
            while (true) {
                Index off = 0;
                for (int s = 0; s < n; ++s)
                    if (is_kept[s] == static_cast<int>(kept_slots)) off += idx[s] * stride[s];
                out[count++] = off;
                int s;
                for (s = n - 1; s >= 0; --s) {
                    if (is_kept[s] != static_cast<int>(kept_slots)) continue;
                    if (++idx[s] < dims[s]) break;
                    idx[s] = 0;
                }
                if (s < 0) break;
            }
        };
        enumerate(true, keep_offsets);
        enumerate(false, trace_offsets);
    }

    Matrix out = Matrix::Zero(dkeep, dkeep);
    for (Index i = 0; i < dkeep; ++i)
        for (Index j = 0; j < dkeep; ++j) {
            Complex acc = 0;
            for (Index t = 0; t < dtrace; ++t)
                acc += rho(keep_offsets[i] + trace_offsets[t],
                           keep_offsets[j] + trace_offsets[t]);
            out(i, j) = acc;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Hermitian spectral calculus
// ---------------------------------------------------------------------------

struct HermitianEig {
    RealVector values;  // ascending
    Matrix vectors;     // columns; m = V diag(values) V^dagger
};

inline HermitianEig hermitian_eig(const Matrix& m) {
    require_hermitian(m, "hermitian_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

// exp(-i h t) through the spectral decomposition of the Hermitian h.
inline Matrix unitary_exp(const Matrix& h, double t) {
    HermitianEig eig = hermitian_eig(h);
    Vector phases(eig.values.size());
    for (Index k = 0; k < eig.values.size(); ++k)
        phases(k) = std::exp(Complex(0, -eig.values(k) * t));
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Entropies (natural log throughout)
// ---------------------------------------------------------------------------

inline double von_neumann_entropy(const Matrix& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
        double p = es.eigenvalues()(k);
        if (p > tol::entropy_floor) s -= p * std::log(p);
    }
    return s;
}

// D(rho || sigma) = Tr rho ln rho - Tr rho ln sigma. Returns +infinity when
// rho has weight outside sigma's support.
inline double relative_entropy(const Matrix& rho, const Matrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    HermitianEig se = hermitian_eig(sigma);
    double tr_rho_ln_sigma = 0.0;
    for (Index k = 0; k < se.values.size(); ++k) {
        double w = (se.vectors.col(k).adjoint() * rho * se.vectors.col(k))(0).real();
        if (se.values(k) < tol::support_floor) {
            if (w > tol::support_weight)
                return std::numeric_limits<double>::infinity();
        } else {
            tr_rho_ln_sigma += w * std::log(se.values(k));
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> re(rho, Eigen::EigenvaluesOnly);
    double tr_rho_ln_rho = 0.0;
    for (Index k = 0; k < re.eigenvalues().size(); ++k) {
        double p = re.eigenvalues()(k);
        if (p > tol::entropy_floor) tr_rho_ln_rho += p * std::log(p);
    }
    return tr_rho_ln_rho - tr_rho_ln_sigma;
}

// Half the trace norm of (a - b); the standard distinguishability metric.
inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace qcollide
