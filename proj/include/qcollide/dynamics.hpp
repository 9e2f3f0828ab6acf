#pragma once

// Collision dynamics: the repeated-interaction channel, its fixed point, and
// the continuous-time generator recovered in the short-collision limit.
//
// Superoperators act on column-stacked density matrices (Eigen's native
// layout): vec(A X B) = (B^T kron A) vec(X).

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "linalg.hpp"
#include "model.hpp"
#include "tolerances.hpp"

namespace qcollide {

// Thrown when the collision map (or Lindblad generator) has more than one
// invariant state up to the degeneracy tolerance.
struct DegenerateSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an iterative or spectral solve fails its residual check.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Collision channel
// ---------------------------------------------------------------------------

// One collision: rho_S -> Tr_B[ U_col (rho_S kron rho_B) U_col^dagger ],
// with a fresh copy of rho_B supplied every round.
struct CollisionChannel {
    Matrix collision_unitary; // 16x16, exp(-i H_tot tau)
    Matrix bath_state;        // 4x4 flying-pair state fed to every collision
    Matrix superoperator;     // 16x16 matrix acting on vec(rho_S)
};

// Full post-collision joint state U (rho_S kron rho_B) U^dagger (16x16).
inline Matrix collide_joint(const Matrix& collision_unitary, const Matrix& rho_s,
                            const Matrix& rho_b) {
    Matrix joint = kron(rho_s, rho_b);
    return collision_unitary * joint * collision_unitary.adjoint();
}

// Reduced channel evaluated directly (no superoperator), for cross-checks.
inline Matrix apply_direct(const Matrix& collision_unitary, const Matrix& rho_s,
                           const Matrix& rho_b) {
    return partial_trace(collide_joint(collision_unitary, rho_s, rho_b), {0, 1},
                         {2, 2, 2, 2});
}

// Assemble the channel from an explicit collision unitary (16x16) and bath
// state. The model-parameter overload below is the usual entry point; this
// one also serves decoupled or synthetic collisions.
inline CollisionChannel build_channel(const Matrix& collision_unitary,
                                      const Matrix& bath_state) {
    if (collision_unitary.rows() != 16 || collision_unitary.cols() != 16)
        throw std::invalid_argument("build_channel: collision unitary must be 16x16");
    require_unitary(collision_unitary, "build_channel collision unitary");
    if (bath_state.rows() != 4 || bath_state.cols() != 4)
        throw std::invalid_argument("build_channel: bath state must be 4x4");
    require_density(bath_state, "build_channel bath state");

    CollisionChannel ch;
    ch.collision_unitary = collision_unitary;
    ch.bath_state = bath_state;

    // Column l*4+k of the superoperator is vec(Phi(E_kl)) with E_kl = |k><l|.
    ch.superoperator = Matrix::Zero(16, 16);
    for (Index l = 0; l < 4; ++l) {
        for (Index k = 0; k < 4; ++k) {
            Matrix e = Matrix::Zero(4, 4);
            e(k, l) = Complex(1.0, 0.0);
            Matrix image = apply_direct(ch.collision_unitary, e, bath_state);
            ch.superoperator.col(l * 4 + k) =
                Eigen::Map<const Vector>(image.data(), 16);
        }
    }
    return ch;
}

inline CollisionChannel build_channel(const ModelParams& p, const Matrix& bath_state) {
    p.validate();
    return build_channel(unitary_exp(total_hamiltonian(p), p.tau), bath_state);
}

// Convenience overload: prepare the bath with a correlating unitary first.
inline CollisionChannel build_channel(const ModelParams& p, const UnitaryMatrix& bath_unitary) {
    return build_channel(p, correlated_bath_state(p, bath_unitary));
}

inline Matrix apply_channel(const CollisionChannel& ch, const Matrix& rho_s) {
    if (rho_s.rows() != 4 || rho_s.cols() != 4)
        throw std::invalid_argument("apply_channel: system state must be 4x4");
    Vector v = Eigen::Map<const Vector>(rho_s.data(), 16);
    Vector w = ch.superoperator * v;
    return Eigen::Map<const Matrix>(w.data(), 4, 4);
}

// Choi matrix C = sum_kl E_kl kron Phi(E_kl): complete positivity of the
// channel is positivity of C, trace preservation is Tr_2 C = 1.
inline Matrix choi_matrix(const CollisionChannel& ch) {
    Matrix c = Matrix::Zero(16, 16);
    for (Index k = 0; k < 4; ++k) {
        for (Index l = 0; l < 4; ++l) {
            Matrix e = Matrix::Zero(4, 4);
            e(k, l) = Complex(1.0, 0.0);
            Matrix image = apply_channel(ch, e);
            c += kron(e, image);
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Steady state
// ---------------------------------------------------------------------------

struct SteadyStateResult {
    Matrix rho;          // 4x4 invariant state, Hermitized and unit trace
    double spectral_gap; // 1 - |second largest channel eigenvalue|
    double residual;     // max-abs of Phi(rho) - rho
    std::string method;  // "spectral" or "power-iteration"
};

// Invariant state from the channel spectrum: the eigenvector of the
// superoperator with eigenvalue closest to 1. Throws DegenerateSteadyState
// if a second eigenvalue sits within tol::degeneracy_gap of unit modulus,
// NonConvergence if the fixed-point residual exceeds tol::steady_residual.
inline SteadyStateResult steady_state(const CollisionChannel& ch) {
    Eigen::ComplexEigenSolver<Matrix> solver(ch.superoperator);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("steady_state: eigensolver failed");

    const Vector& evals = solver.eigenvalues();
    Index best = 0;
    double best_dist = std::abs(evals(0) - Complex(1.0, 0.0));
    int near_unit_modulus = 0;
    double second_modulus = 0.0;
    for (Index k = 0; k < evals.size(); ++k) {
        double dist = std::abs(evals(k) - Complex(1.0, 0.0));
        if (dist < best_dist) {
            best = k;
            best_dist = dist;
        }
        if (std::abs(std::abs(evals(k)) - 1.0) <= tol::degeneracy_gap)
            ++near_unit_modulus;
    }
    for (Index k = 0; k < evals.size(); ++k) {
        if (k == best) continue;
        second_modulus = std::max(second_modulus, std::abs(evals(k)));
    }
    if (near_unit_modulus >= 2)
        throw DegenerateSteadyState(
            "steady_state: " + std::to_string(near_unit_modulus) +
            " eigenvalues within " + std::to_string(tol::degeneracy_gap) +
            " of unit modulus");

    Vector v = solver.eigenvectors().col(best);
    Matrix rho = Eigen::Map<const Matrix>(v.data(), 4, 4);
    rho = Matrix(0.5 * (rho + rho.adjoint()));
    Complex tr = rho.trace();
    if (std::abs(tr) < 1e-14)
        throw NonConvergence("steady_state: traceless invariant eigenvector");
    rho /= tr;

    SteadyStateResult out;
    out.rho = rho;
    out.spectral_gap = 1.0 - second_modulus;
    out.residual = max_abs(apply_channel(ch, rho) - rho);
    out.method = "spectral";
    if (out.residual > tol::steady_residual)
        throw NonConvergence("steady_state: fixed-point residual " +
                             std::to_string(out.residual));
    return out;
}

// Independent cross-check: iterate the channel from the maximally mixed
// state until successive iterates agree to tol::steady_residual. Slower and
// blind to degeneracy, but shares no code path with the spectral solve.
struct PowerIterationResult {
    Matrix rho;
    long iterations;
    double residual;
};

inline PowerIterationResult power_iteration_steady(const CollisionChannel& ch) {
    Matrix rho = Matrix(Matrix::Identity(4, 4) / 4.0);
    for (long it = 1; it <= tol::power_max_iters; ++it) {
        Matrix next = apply_channel(ch, rho);
        double step = max_abs(next - rho);
        rho = next;
        if (step <= tol::steady_residual) {
            PowerIterationResult out;
            out.rho = Matrix(0.5 * (rho + rho.adjoint()));
            out.rho /= out.rho.trace();
            out.iterations = it;
            out.residual = max_abs(apply_channel(ch, out.rho) - out.rho);
            return out;
        }
    }
    throw NonConvergence("power_iteration_steady: no convergence within iteration cap");
}

// ---------------------------------------------------------------------------
// Continuous-time generator (short-collision limit)
// ---------------------------------------------------------------------------

// Master equation recovered from the collision model as tau -> 0 with a weak
// bath correlation angle phi:
//   drho/dt = -i[H_S, rho]
//           + gamma sum_i [(1+n_i) L(sm_i) + n_i L(sp_i)] rho
//           + c [M(sp1,sm2) + M(sm2,sp1) + M(sp2,sm1) + M(sm1,sp2)] rho
// with L(a) rho = 2 a rho a^dag - a^dag a rho - rho a^dag a,
//      M(a,b) rho = 2 a rho b - b a rho - rho b a,
// and cross-rate c = gamma * phi * (n2-n1) / sqrt((1+2 n1)(1+2 n2)).
struct LindbladGenerator {
    Matrix generator; // 16x16 acting on vec(rho)
    double cross_rate;
};

namespace detail {

inline Matrix dissipator_matrix(const Matrix& a) {
    const Matrix id = identity(4);
    Matrix ada = a.adjoint() * a;
    return 2.0 * kron(a.conjugate(), a) - kron(id, ada) - kron(ada.transpose(), id);
}

inline Matrix cross_dissipator_matrix(const Matrix& a, const Matrix& b) {
    const Matrix id = identity(4);
    Matrix ba = b * a;
    return 2.0 * kron(b.transpose(), a) - kron(id, ba) - kron(ba.transpose(), id);
}

} // namespace detail

inline LindbladGenerator lindblad_generator(const ModelParams& p, double phi) {
    p.validate();
    const Matrix id2 = identity(2);
    const Matrix sp1 = kron(sigma_plus(), id2);
    const Matrix sm1 = kron(sigma_minus(), id2);
    const Matrix sp2 = kron(id2, sigma_plus());
    const Matrix sm2 = kron(id2, sigma_minus());
    const Matrix hs = system_hamiltonian(p);
    const Matrix id4 = identity(4);

    LindbladGenerator out;
    out.cross_rate = p.gamma * phi * (p.n2 - p.n1) /
                     std::sqrt((1.0 + 2.0 * p.n1) * (1.0 + 2.0 * p.n2));

    Matrix gen = Complex(0.0, -1.0) * (kron(id4, hs) - kron(hs.transpose(), id4));
    gen += p.gamma * ((1.0 + p.n1) * detail::dissipator_matrix(sm1) +
                      p.n1 * detail::dissipator_matrix(sp1) +
                      (1.0 + p.n2) * detail::dissipator_matrix(sm2) +
                      p.n2 * detail::dissipator_matrix(sp2));
    gen += out.cross_rate * (detail::cross_dissipator_matrix(sp1, sm2) +
                             detail::cross_dissipator_matrix(sm2, sp1) +
                             detail::cross_dissipator_matrix(sp2, sm1) +
                             detail::cross_dissipator_matrix(sm1, sp2));
    out.generator = gen;
    return out;
}

inline Matrix lindblad_rhs(const LindbladGenerator& gen, const Matrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("lindblad_rhs: state must be 4x4");
    Vector v = Eigen::Map<const Vector>(rho.data(), 16);
    Vector w = gen.generator * v;
    return Eigen::Map<const Matrix>(w.data(), 4, 4);
}

// Stationary state of the generator: the null-space direction, Hermitized
// and trace-normalized. Degeneracy and residual checks mirror steady_state.
inline SteadyStateResult lindblad_steady_state(const LindbladGenerator& gen) {
    Eigen::ComplexEigenSolver<Matrix> solver(gen.generator);
    if (solver.info() != Eigen::Success)
        throw NonConvergence("lindblad_steady_state: eigensolver failed");

    const Vector& evals = solver.eigenvalues();
    Index best = 0;
    double best_mod = std::abs(evals(0));
    int near_null = 0;
    double gap = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < evals.size(); ++k) {
        if (std::abs(evals(k)) < best_mod) {
            best = k;
            best_mod = std::abs(evals(k));
        }
        if (std::abs(evals(k)) <= tol::degeneracy_gap) ++near_null;
    }
    for (Index k = 0; k < evals.size(); ++k) {
        if (k == best) continue;
        gap = std::min(gap, std::abs(evals(k)));
    }
    if (near_null >= 2)
        throw DegenerateSteadyState("lindblad_steady_state: " +
                                    std::to_string(near_null) +
                                    " eigenvalues within tolerance of zero");

    Vector v = solver.eigenvectors().col(best);
    Matrix rho = Eigen::Map<const Matrix>(v.data(), 4, 4);
    rho = Matrix(0.5 * (rho + rho.adjoint()));
    Complex tr = rho.trace();
    if (std::abs(tr) < 1e-14)
        throw NonConvergence("lindblad_steady_state: traceless null vector");
    rho /= tr;

    SteadyStateResult out;
    out.rho = rho;
    out.spectral_gap = gap; // smallest nonzero decay rate
    out.residual = max_abs(lindblad_rhs(gen, rho));
    out.method = "spectral";
    if (out.residual > tol::steady_residual)
        throw NonConvergence("lindblad_steady_state: residual " +
                             std::to_string(out.residual));
    return out;
}

// Classic fourth-order Runge-Kutta integration of the master equation, for
// relaxation cross-checks. dt defaults to a small fraction of the fastest
// dissipative timescale.
inline Matrix rk4_evolve(const LindbladGenerator& gen, const Matrix& rho0,
                         double total_time, double dt) {
    if (!(dt > 0) || !(total_time >= 0))
        throw std::invalid_argument("rk4_evolve: need dt > 0 and total_time >= 0");
    Vector v = Eigen::Map<const Vector>(rho0.data(), 16);
    double t = 0.0;
    const Matrix& g = gen.generator;
    while (t < total_time) {
        double h = std::min(dt, total_time - t);
        Vector k1 = g * v;
        Vector k2 = g * (v + 0.5 * h * k1);
        Vector k3 = g * (v + 0.5 * h * k2);
        Vector k4 = g * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    Matrix rho = Eigen::Map<const Matrix>(v.data(), 4, 4);
    return Matrix(0.5 * (rho + rho.adjoint()));
}

} // namespace qcollide
