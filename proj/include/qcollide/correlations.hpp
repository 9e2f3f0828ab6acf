#pragma once

// Correlation measures for qubit pairs: mutual information, Wootters
// concurrence, and quantum discord with projective measurements on the
// first qubit (an upper bound to the POVM-optimized discord).
//
// All entropic quantities are in nats.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "tolerances.hpp"

namespace qcollide {

// I(A:B) = S(rho_A) + S(rho_B) - S(rho_AB) for a bipartite state with local
// dimensions (dim_a, dim_b).
inline double mutual_information(const Matrix& rho, Index dim_a, Index dim_b) {
    if (rho.rows() != dim_a * dim_b || rho.cols() != dim_a * dim_b)
        throw std::invalid_argument("mutual_information: dimension mismatch");
    std::vector<int> dims = {static_cast<int>(dim_a), static_cast<int>(dim_b)};
    Matrix rho_a = partial_trace(rho, {0}, dims);
    Matrix rho_b = partial_trace(rho, {1}, dims);
    return von_neumann_entropy(rho_a) + von_neumann_entropy(rho_b) -
           von_neumann_entropy(rho);
}

// Wootters concurrence of a two-qubit state: C = max(0, l1 - l2 - l3 - l4)
// with l_i the decreasing square roots of the eigenvalues of
// rho (sy kron sy) rho^* (sy kron sy).
inline double concurrence(const Matrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("concurrence: state must be 4x4");
    Matrix yy = kron(pauli_y(), pauli_y());
    Matrix rho_tilde = yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Matrix> solver(Matrix(rho * rho_tilde));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("concurrence: eigensolver failed");
    std::array<double, 4> lams{};
    for (Index k = 0; k < 4; ++k)
        lams[static_cast<std::size_t>(k)] =
            std::sqrt(std::max(0.0, solver.eigenvalues()(k).real()));
    std::sort(lams.begin(), lams.end(), std::greater<double>());
    return std::max(0.0, lams[0] - lams[1] - lams[2] - lams[3]);
}

// ---------------------------------------------------------------------------
// Quantum discord (projective measurement on qubit 1)
// ---------------------------------------------------------------------------

namespace detail {

inline double binary_entropy(double x) {
    double lo = std::clamp(x, 0.0, 1.0);
    double hi = 1.0 - lo;
    double s = 0.0;
    if (lo > tol::entropy_floor) s -= lo * std::log(lo);
    if (hi > tol::entropy_floor) s -= hi * std::log(hi);
    return s;
}

// Bloch decomposition rho = 1/4 (1 + a.sigma x 1 + 1 x b.sigma
//                              + sum_ij T_ij sigma_i x sigma_j).
struct TwoQubitBloch {
    Eigen::Vector3d a;
    Eigen::Vector3d b;
    Eigen::Matrix3d t;
};

inline TwoQubitBloch bloch_decomposition(const Matrix& rho) {
    const std::array<const Matrix*, 3> paulis = {&pauli_x(), &pauli_y(), &pauli_z()};
    const Matrix id = identity(2);
    TwoQubitBloch out;
    for (int i = 0; i < 3; ++i) {
        out.a(i) = (rho * kron(*paulis[static_cast<std::size_t>(i)], id)).trace().real();
        out.b(i) = (rho * kron(id, *paulis[static_cast<std::size_t>(i)])).trace().real();
        for (int j = 0; j < 3; ++j)
            out.t(i, j) = (rho * kron(*paulis[static_cast<std::size_t>(i)],
                                      *paulis[static_cast<std::size_t>(j)]))
                              .trace()
                              .real();
    }
    return out;
}

// Average conditional entropy of qubit 2 after projecting qubit 1 along
// n(theta, phi): sum_pm q_pm H2((1 + |s_pm|)/2) with q_pm = (1 pm n.a)/2 and
// conditional Bloch vector s_pm = (b pm T^t n) / (2 q_pm).
inline double conditional_entropy(const TwoQubitBloch& bl, double theta, double phi) {
    Eigen::Vector3d n(std::sin(theta) * std::cos(phi),
                      std::sin(theta) * std::sin(phi), std::cos(theta));
    Eigen::Vector3d ttn = bl.t.transpose() * n;
    double total = 0.0;
    for (double sign : {1.0, -1.0}) {
        double q = 0.5 * (1.0 + sign * n.dot(bl.a));
        if (q < 1e-14) continue; // outcome never occurs; contributes nothing
        Eigen::Vector3d s = (bl.b + sign * ttn) / (2.0 * q);
        double r = std::min(1.0, s.norm());
        total += q * binary_entropy(0.5 * (1.0 + r));
    }
    return total;
}

// Minimal 2-parameter Nelder-Mead refinement of the measurement direction.
template <typename F>
inline std::array<double, 3> nelder_mead_2d(F f, double x0, double y0, double step,
                                            double ftol, int max_iters) {
    std::array<std::array<double, 2>, 3> pts = {{{x0, y0}, {x0 + step, y0}, {x0, y0 + step}}};
    std::array<double, 3> val = {f(pts[0][0], pts[0][1]), f(pts[1][0], pts[1][1]),
                                 f(pts[2][0], pts[2][1])};
    for (int it = 0; it < max_iters; ++it) {
        std::array<std::size_t, 3> ord = {0, 1, 2};
        std::sort(ord.begin(), ord.end(),
                  [&](std::size_t u, std::size_t v) { return val[u] < val[v]; });
        if (val[ord[2]] - val[ord[0]] < ftol) break;
        const auto& best = pts[ord[0]];
        const auto& good = pts[ord[1]];
        auto& worst = pts[ord[2]];
        double cx = 0.5 * (best[0] + good[0]);
        double cy = 0.5 * (best[1] + good[1]);
        double rx = cx + (cx - worst[0]);
        double ry = cy + (cy - worst[1]);
        double fr = f(rx, ry);
        if (fr < val[ord[0]]) {
            double ex = cx + 2.0 * (cx - worst[0]);
            double ey = cy + 2.0 * (cy - worst[1]);
            double fe = f(ex, ey);
            if (fe < fr) {
                worst = {ex, ey};
                val[ord[2]] = fe;
            } else {
                worst = {rx, ry};
                val[ord[2]] = fr;
            }
        } else if (fr < val[ord[1]]) {
            worst = {rx, ry};
            val[ord[2]] = fr;
        } else {
            double sx = cx + 0.5 * (worst[0] - cx);
            double sy = cy + 0.5 * (worst[1] - cy);
            double fs = f(sx, sy);
            if (fs < val[ord[2]]) {
                worst = {sx, sy};
                val[ord[2]] = fs;
            } else {
                for (std::size_t k : {ord[1], ord[2]}) {
                    pts[k][0] = best[0] + 0.5 * (pts[k][0] - best[0]);
                    pts[k][1] = best[1] + 0.5 * (pts[k][1] - best[1]);
                    val[k] = f(pts[k][0], pts[k][1]);
                }
            }
        }
    }
    std::size_t arg = 0;
    for (std::size_t k = 1; k < 3; ++k)
        if (val[k] < val[arg]) arg = k;
    return {pts[arg][0], pts[arg][1], val[arg]};
}

} // namespace detail

// Minimum average conditional entropy over a (theta, phi) measurement grid,
// without local refinement. Exposed for convergence studies.
inline double min_conditional_entropy_grid(const Matrix& rho, int n_theta, int n_phi) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("min_conditional_entropy_grid: state must be 4x4");
    if (n_theta < 2 || n_phi < 2)
        throw std::invalid_argument("min_conditional_entropy_grid: grid too small");
    detail::TwoQubitBloch bl = detail::bloch_decomposition(rho);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n_theta; ++i) {
        double theta = M_PI * i / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2.0 * M_PI * j / n_phi;
            best = std::min(best, detail::conditional_entropy(bl, theta, phi));
        }
    }
    return best;
}

struct DiscordResult {
    double mutual_information;    // I(1:2)
    double classical_information; // J = S(rho_2) - min_n <S(rho_2 | outcome)>
    double discord;               // I - J (projective upper bound)
    double best_theta;
    double best_phi;
};

// Grid scan plus Nelder-Mead refinement of the optimal projective
// measurement on qubit 1.
inline DiscordResult quantum_discord(const Matrix& rho, int n_theta = 60, int n_phi = 120) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("quantum_discord: state must be 4x4");
    detail::TwoQubitBloch bl = detail::bloch_decomposition(rho);

    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0;
    for (int i = 0; i <= n_theta; ++i) {
        double theta = M_PI * i / n_theta;
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2.0 * M_PI * j / n_phi;
            double v = detail::conditional_entropy(bl, theta, phi);
            if (v < best) {
                best = v;
                best_theta = theta;
                best_phi = phi;
            }
        }
    }
    auto objective = [&bl](double th, double ph) {
        return detail::conditional_entropy(bl, th, ph);
    };
    std::array<double, 3> refined = detail::nelder_mead_2d(
        objective, best_theta, best_phi, 0.05, tol::discord_objective, 500);
    if (refined[2] < best) {
        best = refined[2];
        best_theta = refined[0];
        best_phi = refined[1];
    }

    Matrix rho_b = partial_trace(rho, {1}, {2, 2});
    DiscordResult out;
    out.mutual_information = mutual_information(rho, 2, 2);
    out.classical_information = von_neumann_entropy(rho_b) - best;
    out.discord = out.mutual_information - out.classical_information;
    out.best_theta = best_theta;
    out.best_phi = best_phi;
    return out;
}

inline double classical_information(const Matrix& rho, int n_theta = 60, int n_phi = 120) {
    return quantum_discord(rho, n_theta, n_phi).classical_information;
}

// ---------------------------------------------------------------------------
// Correlation summary of one evaluated configuration
// ---------------------------------------------------------------------------

struct CorrelationRecord {
    double mi_s1s2;          // system pair, steady state
    double mi_a1a2;          // flying pair after preparation
    double mi_as;            // system pair vs flying pair after the collision
    double discord_s1s2;     // projective-measurement discord, steady system pair
    double concurrence_a1a2; // entanglement of the prepared flying pair
};

inline CorrelationRecord compute_correlations(const Matrix& steady_rho,
                                              const Matrix& bath_state,
                                              const Matrix& post_joint) {
    if (post_joint.rows() != 16 || post_joint.cols() != 16)
        throw std::invalid_argument("compute_correlations: joint state must be 16x16");
    CorrelationRecord out;
    out.mi_s1s2 = mutual_information(steady_rho, 2, 2);
    out.mi_a1a2 = mutual_information(bath_state, 2, 2);
    out.mi_as = mutual_information(post_joint, 4, 4);
    out.discord_s1s2 = quantum_discord(steady_rho).discord;
    out.concurrence_a1a2 = concurrence(bath_state);
    return out;
}

} // namespace qcollide
