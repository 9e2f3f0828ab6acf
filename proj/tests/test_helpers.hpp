#pragma once

// Shared fixtures for the unit tests: seeded random states and independent
// closed-form reference implementations used as oracles.

#include <qcollide/qcollide.hpp>

#include <cmath>
#include <vector>

namespace testutil {

using qcollide::Complex;
using qcollide::GaussianStream;
using qcollide::Index;
using qcollide::Matrix;

inline Matrix random_complex(GaussianStream& g, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            double re = g.gaussian();
            double im = g.gaussian();
            m(i, j) = Complex(re, im);
        }
    return m;
}

inline Matrix random_hermitian(GaussianStream& g, Index dim) {
    Matrix m = random_complex(g, dim, dim);
    return Matrix(0.5 * (m + m.adjoint()));
}

// Full-rank random density matrix via the Ginibre construction.
inline Matrix random_density(GaussianStream& g, Index dim) {
    Matrix m = random_complex(g, dim, dim);
    Matrix rho = m * m.adjoint();
    rho /= rho.trace();
    return Matrix(0.5 * (rho + rho.adjoint()));
}

// Random unitary of any dimension (exact Haar is only needed for 4x4, where
// qcollide::haar_unitary applies; this generic version is for invariance
// checks that just need "some" unitary).
inline Matrix random_unitary(GaussianStream& g, Index dim) {
    return qcollide::unitary_exp(random_hermitian(g, dim), 1.0);
}

// Independent closed-form reference for the partially swapped thermal pair,
// written directly from the matrix elements (not via matrix exponentials):
//   diagonal  [n1 n2,
//              n1(1+n2)cos^2 + n2(1+n1)sin^2,
//              n2(1+n1)cos^2 + n1(1+n2)sin^2,
//              (1+n1)(1+n2)] / Z,
//   entry(1,2) = entry(2,1) = (n2-n1) sin(phi) cos(phi) / Z,
// with Z = (1+2n1)(1+2n2).
inline Matrix bath_pair_reference(double phi, double n1, double n2) {
    const double z = (1.0 + 2.0 * n1) * (1.0 + 2.0 * n2);
    const double c2 = std::cos(phi) * std::cos(phi);
    const double s2 = std::sin(phi) * std::sin(phi);
    Matrix rho = Matrix::Zero(4, 4);
    rho(0, 0) = n1 * n2 / z;
    rho(1, 1) = (n1 * (1.0 + n2) * c2 + n2 * (1.0 + n1) * s2) / z;
    rho(2, 2) = (n2 * (1.0 + n1) * c2 + n1 * (1.0 + n2) * s2) / z;
    rho(3, 3) = (1.0 + n1) * (1.0 + n2) / z;
    rho(1, 2) = (n2 - n1) * std::sin(phi) * std::cos(phi) / z;
    rho(2, 1) = rho(1, 2);
    return rho;
}

// Switching-work closed form for the partial swap.
inline double switching_work_reference(double phi, double n1, double n2, double b1,
                                       double b2) {
    const double z = (1.0 + 2.0 * n1) * (1.0 + 2.0 * n2);
    const double s = std::sin(phi);
    return -2.0 * (b1 - b2) * (n1 - n2) * s * s / z;
}

// The two-qubit exchange permutation |ij> -> |ji> (a plain permutation
// matrix; the partial swap at pi/2 differs from it by a phase on |01>,|10>).
inline Matrix exchange_permutation() {
    Matrix p = Matrix::Zero(4, 4);
    p(0, 0) = 1.0;
    p(1, 2) = 1.0;
    p(2, 1) = 1.0;
    p(3, 3) = 1.0;
    return p;
}

// Reference parameter set used for the random-unitary ensemble figures:
// like the defaults but with the weaker second field.
inline qcollide::ModelParams ensemble_params() {
    qcollide::ModelParams p;
    p.B2 = 0.15;
    return p;
}

} // namespace testutil
