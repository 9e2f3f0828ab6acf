#pragma once

// Physical model: two XXZ-coupled system qubits, each colliding with a
// stream of thermally prepared flying qubits that may be correlated by a
// unitary before the collision. This header builds every Hamiltonian and
// state of that model from a ModelParams record.
//
// Slot order everywhere: (S1, S2, A1, A2); system pair is the left (most
// significant) factor of the 16-dimensional collision space.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

namespace qcollide {

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

// Occupations n1, n2 (not temperatures) are the primary thermal inputs; the
// inverse temperatures follow from n_i = (e^{2 B_i beta_i} - 1)^{-1} and are
// exposed read-only. Defaults reproduce the reference parameter set used for
// the swap sweep: J=1, Delta=1, B1=0.1, B2=0.3, gamma=1, n1=0.1, n2=2,
// tau=0.1.
struct ModelParams {
    double J     = 1.0;
    double Delta = 1.0;
    double B1    = 0.1;
    double B2    = 0.3;
    double gamma = 1.0;
    double n1    = 0.1;
    double n2    = 2.0;
    double tau   = 0.1;

    void validate() const {
        if (!(gamma > 0)) throw std::invalid_argument("ModelParams: gamma must be > 0");
        if (!(tau > 0))   throw std::invalid_argument("ModelParams: tau must be > 0");
        if (n1 < 0 || n2 < 0)
            throw std::invalid_argument("ModelParams: occupations must be >= 0");
    }

    // beta_i = ln(1 + 1/n_i) / (2 B_i); undefined (absent) at zero field or
    // zero occupation.
    std::optional<double> beta(int i) const {
        double n = (i == 1) ? n1 : n2;
        double B = (i == 1) ? B1 : B2;
        if (i != 1 && i != 2) throw std::invalid_argument("beta: index must be 1 or 2");
        if (B == 0.0 || n == 0.0) return std::nullopt;
        return std::log1p(1.0 / n) / (2.0 * B);
    }

    double occupation(int i) const {
        if (i != 1 && i != 2) throw std::invalid_argument("occupation: index must be 1 or 2");
        return i == 1 ? n1 : n2;
    }
    double field(int i) const {
        if (i != 1 && i != 2) throw std::invalid_argument("field: index must be 1 or 2");
        return i == 1 ? B1 : B2;
    }
};

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

// H_S = J (sx sx + sy sy + Delta sz sz) + B1 sz1 + B2 sz2 on the system pair.
inline Matrix system_hamiltonian(const ModelParams& p) {
    const Matrix& sx = pauli_x();
    const Matrix& sy = pauli_y();
    const Matrix& sz = pauli_z();
    const Matrix id = identity(2);
    return p.J * (kron(sx, sx) + kron(sy, sy) + p.Delta * kron(sz, sz)) +
           p.B1 * kron(sz, id) + p.B2 * kron(id, sz);
}

struct BathHamiltonians {
    Matrix hb1; // B1 sz on flying qubit 1 (4x4 on the bath pair)
    Matrix hb2; // B2 sz on flying qubit 2
    Matrix hb;  // sum
};

inline BathHamiltonians bath_hamiltonian(const ModelParams& p) {
    const Matrix id = identity(2);
    BathHamiltonians out;
    out.hb1 = p.B1 * kron(pauli_z(), id);
    out.hb2 = p.B2 * kron(id, pauli_z());
    out.hb  = out.hb1 + out.hb2;
    return out;
}

// H_SB = sum_i sqrt(gamma (2 n_i + 1) / (2 tau)) (sx_i sx~_i + sy_i sy~_i):
// an excitation-exchange coupling between each system qubit and its own
// flying qubit, scaled so that the tau -> 0 limit produces collision rates
// gamma (1 + n_i) and gamma n_i.
inline Matrix interaction_hamiltonian(const ModelParams& p) {
    if (!(p.tau > 0)) throw std::invalid_argument("interaction_hamiltonian: tau must be > 0");
    const Matrix& sx = pauli_x();
    const Matrix& sy = pauli_y();
    const Matrix id = identity(2);
    const double g1 = std::sqrt(p.gamma * (2.0 * p.n1 + 1.0) / (2.0 * p.tau));
    const double g2 = std::sqrt(p.gamma * (2.0 * p.n2 + 1.0) / (2.0 * p.tau));
    // Slots (S1, S2, A1, A2): pair i couples slots i-1 and i+1.
    Matrix t1 = kron(kron(kron(sx, id), sx), id) + kron(kron(kron(sy, id), sy), id);
    Matrix t2 = kron(kron(kron(id, sx), id), sx) + kron(kron(kron(id, sy), id), sy);
    return g1 * t1 + g2 * t2;
}

// Lift a system-pair operator or a bath-pair operator into the full
// 16-dimensional collision space.
inline Matrix lift_system(const Matrix& m4) { return kron(m4, identity(4)); }
inline Matrix lift_bath(const Matrix& m4) { return kron(identity(4), m4); }

inline Matrix total_hamiltonian(const ModelParams& p) {
    return lift_system(system_hamiltonian(p)) + lift_bath(bath_hamiltonian(p).hb) +
           interaction_hamiltonian(p);
}

// ---------------------------------------------------------------------------
// Bath preparation
// ---------------------------------------------------------------------------

// Thermal qubit rho~_th(n) = 1/2 [1 - (1+2n)^{-1} sz]: populations
// (n/(1+2n), (1+n)/(1+2n)) on (sz=+1, sz=-1).
inline Matrix thermal_qubit(double n) {
    if (n < 0) throw std::invalid_argument("thermal_qubit: occupation must be >= 0");
    Matrix rho = Matrix::Zero(2, 2);
    rho(0, 0) = n / (1.0 + 2.0 * n);
    rho(1, 1) = (1.0 + n) / (1.0 + 2.0 * n);
    return rho;
}

inline Matrix thermal_bath_pair(const ModelParams& p) {
    return kron(thermal_qubit(p.n1), thermal_qubit(p.n2));
}

// Partial swap S_phi = exp{-i (phi/2)(sx~1 sy~2 - sy~1 sx~2)}: rotates the
// single-excitation pair {|01>,|10>} by angle phi and fixes |00>, |11>.
// phi = pi/2 is the total swap.
inline Matrix partial_swap(double phi) {
    Matrix g = kron(pauli_x(), pauli_y()) - kron(pauli_y(), pauli_x());
    return unitary_exp(g, phi / 2.0);
}

// rho'_B = U rho_B U^dagger for an arbitrary correlating unitary.
inline Matrix correlated_bath_state(const ModelParams& p, const Matrix& u) {
    if (u.rows() != 4 || u.cols() != 4)
        throw std::invalid_argument("correlated_bath_state: unitary must be 4x4");
    require_unitary(u, "correlated_bath_state");
    return u * thermal_bath_pair(p) * u.adjoint();
}

// Effective occupation of flying qubit i after the partial swap: the local
// marginal of rho'_B stays thermal with
//   N_i = 1/2 [n1 + n2 + 4 n1 n2 + (-1)^i (n2 - n1) cos 2phi]
//             / [1 + n1 + n2 - (-1)^i (n2 - n1) cos 2phi].
inline double effective_population(const ModelParams& p, double phi, int i) {
    if (i != 1 && i != 2)
        throw std::invalid_argument("effective_population: index must be 1 or 2");
    const double sign = (i == 1) ? -1.0 : 1.0;
    const double c = sign * (p.n2 - p.n1) * std::cos(2.0 * phi);
    return 0.5 * (p.n1 + p.n2 + 4.0 * p.n1 * p.n2 + c) / (1.0 + p.n1 + p.n2 - c);
}

// ---------------------------------------------------------------------------
// The eight non-correlating unitaries
// ---------------------------------------------------------------------------

// Labeled I..VIII; each maps a product diagonal bath state to a product
// diagonal bath state (pure population permutations, no correlations).
enum class NoncorrOp { I = 1, II, III, IV, V, VI, VII, VIII };

inline const std::array<NoncorrOp, 8>& all_noncorr_ops() {
    static const std::array<NoncorrOp, 8> ops = {
        NoncorrOp::I,  NoncorrOp::II,  NoncorrOp::III, NoncorrOp::IV,
        NoncorrOp::V,  NoncorrOp::VI,  NoncorrOp::VII, NoncorrOp::VIII};
    return ops;
}

inline const char* to_string(NoncorrOp op) {
    switch (op) {
        case NoncorrOp::I:    return "I";
        case NoncorrOp::II:   return "II";
        case NoncorrOp::III:  return "III";
        case NoncorrOp::IV:   return "IV";
        case NoncorrOp::V:    return "V";
        case NoncorrOp::VI:   return "VI";
        case NoncorrOp::VII:  return "VII";
        case NoncorrOp::VIII: return "VIII";
    }
    throw std::invalid_argument("to_string: bad NoncorrOp");
}

inline std::optional<NoncorrOp> parse_noncorr_label(const std::string& s) {
    for (NoncorrOp op : all_noncorr_ops())
        if (s == to_string(op)) return op;
    return std::nullopt;
}

// Population action on diag(p1,p2,p3,p4), for reference and tests:
//   I:(1234) II:(1324) III:(2143) IV:(2413) V:(3142) VI:(3412)
//   VII:(4231) VIII:(4321)
inline Matrix noncorrelating_unitary(NoncorrOp op) {
    const Matrix id = identity(2);
    const Matrix sx1 = kron(pauli_x(), id);  // flips flying qubit 1
    const Matrix sx2 = kron(id, pauli_x());  // flips flying qubit 2
    const Matrix swap = partial_swap(M_PI / 2.0);
    switch (op) {
        case NoncorrOp::I:    return identity(4);
        case NoncorrOp::II:   return swap;
        case NoncorrOp::III:  return sx2;
        case NoncorrOp::IV:   return swap * sx2;
        case NoncorrOp::V:    return swap * sx1;
        case NoncorrOp::VI:   return sx1;
        case NoncorrOp::VII:  return swap * sx1 * sx2;
        case NoncorrOp::VIII: return sx1 * sx2;
    }
    throw std::invalid_argument("noncorrelating_unitary: bad label");
}

} // namespace qcollide
