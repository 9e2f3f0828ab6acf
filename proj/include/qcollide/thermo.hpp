#pragma once

// Thermodynamic bookkeeping for one collision at the steady state.
//
// Two accounting scenarios are tracked side by side:
//   partial  - the bath pair arrives already correlated; only the
//              switching work of the collision coupling is counted.
//   complete - the correlating unitary is part of the machine; its work
//              cost W_U and the heats measured against the raw thermal
//              bath are counted.
// Sign convention: positive work and heat flow INTO the system.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "correlations.hpp"
#include "dynamics.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "tolerances.hpp"

namespace qcollide {

enum class Scenario { Partial, Complete };

inline const char* to_string(Scenario s) {
    return s == Scenario::Partial ? "partial" : "complete";
}

enum class Mode { Engine, Refrigerator, Accelerator, Heater, Degenerate };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::Engine:       return "engine";
        case Mode::Refrigerator: return "refrigerator";
        case Mode::Accelerator:  return "accelerator";
        case Mode::Heater:       return "heater";
        case Mode::Degenerate:   return "degenerate";
    }
    throw std::invalid_argument("to_string: bad Mode");
}

// The hot bath is the one with the larger occupation.
inline int hot_bath_index(const ModelParams& p) { return p.n2 >= p.n1 ? 2 : 1; }

// Operating mode from the signs of (W, Q_hot, Q_cold), with a dead band of
// tol::mode_epsilon around zero:
//   W < 0               -> engine (work is extracted)
//   W > 0 and Q_cold > 0 -> refrigerator (heat drawn out of the cold bath)
//   W > 0 and Q_hot  > 0 -> accelerator (work assists the natural flow)
//   W > 0 and Q_hot  < 0 -> heater (work dumped into both baths)
//   otherwise            -> degenerate
inline Mode classify_mode(double w, double q_hot, double q_cold) {
    const double eps = tol::mode_epsilon;
    if (w < -eps) return Mode::Engine;
    if (w > eps) {
        if (q_cold > eps) return Mode::Refrigerator;
        if (q_hot > eps) return Mode::Accelerator;
        if (q_hot < -eps) return Mode::Heater;
    }
    return Mode::Degenerate;
}

struct ThermoRecord {
    double W_partial = 0.0;
    double Q1_partial = 0.0;
    double Q2_partial = 0.0;
    double W_U = 0.0;
    double W_complete = 0.0;
    double Q1_complete = 0.0;
    double Q2_complete = 0.0;
    double Sigma_partial = 0.0;
    double Sigma_complete = 0.0;
    Mode mode_partial = Mode::Degenerate;
    Mode mode_complete = Mode::Degenerate;

    double work(Scenario s) const {
        return s == Scenario::Partial ? W_partial : W_complete;
    }
    double heat(Scenario s, int bath) const {
        if (bath != 1 && bath != 2) throw std::invalid_argument("heat: index must be 1 or 2");
        if (s == Scenario::Partial) return bath == 1 ? Q1_partial : Q2_partial;
        return bath == 1 ? Q1_complete : Q2_complete;
    }
    double entropy_production(Scenario s) const {
        return s == Scenario::Partial ? Sigma_partial : Sigma_complete;
    }
    Mode mode(Scenario s) const {
        return s == Scenario::Partial ? mode_partial : mode_complete;
    }
};

// ---------------------------------------------------------------------------
// Individual energy flows (states supplied explicitly)
// ---------------------------------------------------------------------------

namespace detail {

inline double real_trace_product(const Matrix& a, const Matrix& b) {
    return (a * b).trace().real();
}

} // namespace detail

// Switching work of one collision: the energy that the time-dependent
// turn-on/turn-off of the collision coupling injects,
// W = Tr[(H_S + H_B)(rho'_SB - rho_SB)].
inline double partial_work(const ModelParams& p, const Matrix& pre_joint,
                           const Matrix& post_joint) {
    Matrix h = lift_system(system_hamiltonian(p)) + lift_bath(bath_hamiltonian(p).hb);
    return detail::real_trace_product(h, post_joint - pre_joint);
}

// Heat from flying qubit i during the collision, positive into the system:
// Q_i = -Tr[H_Bi (rho'_SB - rho_SB)].
inline double partial_heat(const ModelParams& p, int bath, const Matrix& pre_joint,
                           const Matrix& post_joint) {
    if (bath != 1 && bath != 2)
        throw std::invalid_argument("partial_heat: index must be 1 or 2");
    BathHamiltonians hb = bath_hamiltonian(p);
    Matrix h = lift_bath(bath == 1 ? hb.hb1 : hb.hb2);
    return -detail::real_trace_product(h, post_joint - pre_joint);
}

// Work cost of correlating the thermal pair: W_U = Tr[H_B (rho'_B - rho_B)],
// from the prepared state itself.
inline double unitary_work(const ModelParams& p, const Matrix& bath_state) {
    Matrix delta = bath_state - thermal_bath_pair(p);
    return detail::real_trace_product(bath_hamiltonian(p).hb, delta);
}

// Same, from the correlating unitary.
inline double unitary_work(const ModelParams& p, const UnitaryMatrix& u) {
    return unitary_work(p, correlated_bath_state(p, u));
}

// Heat in the complete accounting, measured against the raw thermal pair:
// Q_i = -Tr[H_Bi (rho'_SB - rho_S kron rho_B_thermal)].
inline double complete_heat(const ModelParams& p, int bath, const Matrix& bath_state,
                            const Matrix& pre_joint, const Matrix& post_joint) {
    double partial = partial_heat(p, bath, pre_joint, post_joint);
    BathHamiltonians hb = bath_hamiltonian(p);
    const Matrix& h = (bath == 1) ? hb.hb1 : hb.hb2;
    double prep = detail::real_trace_product(h, bath_state - thermal_bath_pair(p));
    return partial - prep;
}

// Entropy produced per collision. Both scenarios share the system-bath
// mutual information built up by the collision; they differ in the reference
// state of the discarded bath pair:
//   Sigma_partial  = I(S:B)_{rho'_SB} + D(rho''_B || rho'_B)
//   Sigma_complete = I(S:B)_{rho'_SB} + D(rho''_B || rho_B_thermal)
inline double entropy_production(const ModelParams& p, Scenario s, const Matrix& bath_state,
                                 const Matrix& post_joint) {
    Matrix discarded = partial_trace(post_joint, {2, 3}, {2, 2, 2, 2});
    const Matrix reference = (s == Scenario::Partial) ? bath_state : thermal_bath_pair(p);
    return mutual_information(post_joint, 4, 4) + relative_entropy(discarded, reference);
}

// Steadiness guard for the checked operations below: the supplied system
// state must be a fixed point of the collision to the solver tolerance.
inline void require_steady(const Matrix& collision_unitary, const Matrix& steady,
                           const Matrix& bath_state, const char* who) {
    double res = max_abs(apply_direct(collision_unitary, steady, bath_state) - steady);
    if (res > tol::steady_residual)
        throw std::invalid_argument(std::string(who) +
                                    ": input state is not steady (residual " +
                                    std::to_string(res) + ")");
}

// Checked variants taking the steady state, the prepared bath, and the
// collision unitary explicitly; non-steady input is rejected.
inline double partial_work(const ModelParams& p, const Matrix& steady,
                           const Matrix& bath_state, const Matrix& collision_unitary) {
    require_steady(collision_unitary, steady, bath_state, "partial_work");
    Matrix pre = kron(steady, bath_state);
    return partial_work(p, pre, collide_joint(collision_unitary, steady, bath_state));
}

inline double partial_heat(const ModelParams& p, int bath, const Matrix& steady,
                           const Matrix& bath_state, const Matrix& collision_unitary) {
    require_steady(collision_unitary, steady, bath_state, "partial_heat");
    Matrix pre = kron(steady, bath_state);
    return partial_heat(p, bath, pre, collide_joint(collision_unitary, steady, bath_state));
}

// Clausius combination -sum_i beta_i Q_i^complete; equals Sigma_complete
// exactly when both bath temperatures are defined.
inline double clausius_sum(const ModelParams& p, const ThermoRecord& r) {
    std::optional<double> b1 = p.beta(1), b2 = p.beta(2);
    if (!b1 || !b2)
        throw std::invalid_argument("clausius_sum: bath temperature undefined (zero field or occupation)");
    return -(*b1 * r.Q1_complete + *b2 * r.Q2_complete);
}

// ---------------------------------------------------------------------------
// One-shot evaluation of a configuration
// ---------------------------------------------------------------------------

struct EvaluatedConfiguration {
    ModelParams params;
    Matrix bath_state;   // rho'_B fed to every collision (4x4)
    Matrix steady_rho;   // invariant system state (4x4)
    Matrix post_joint;   // rho'_SB after one steady-state collision (16x16)
    ThermoRecord thermo;
    double spectral_gap = 0.0;
    double residual = 0.0;
};

inline ThermoRecord make_record(const ModelParams& p, const Matrix& steady_rho,
                                const Matrix& bath_state, const Matrix& post_joint) {
    Matrix pre_joint = kron(steady_rho, bath_state);
    ThermoRecord rec;
    rec.W_partial = partial_work(p, pre_joint, post_joint);
    rec.Q1_partial = partial_heat(p, 1, pre_joint, post_joint);
    rec.Q2_partial = partial_heat(p, 2, pre_joint, post_joint);
    rec.W_U = unitary_work(p, bath_state);
    rec.W_complete = rec.W_partial + rec.W_U;
    rec.Q1_complete = complete_heat(p, 1, bath_state, pre_joint, post_joint);
    rec.Q2_complete = complete_heat(p, 2, bath_state, pre_joint, post_joint);

    // Both entropy productions share the collision-built mutual information;
    // compute it once (the 16x16 eigensolve dominates this record).
    double mi_sb = mutual_information(post_joint, 4, 4);
    Matrix discarded = partial_trace(post_joint, {2, 3}, {2, 2, 2, 2});
    rec.Sigma_partial = mi_sb + relative_entropy(discarded, bath_state);
    rec.Sigma_complete = mi_sb + relative_entropy(discarded, thermal_bath_pair(p));

    const int hot = hot_bath_index(p);
    double qh_p = (hot == 2) ? rec.Q2_partial : rec.Q1_partial;
    double qc_p = (hot == 2) ? rec.Q1_partial : rec.Q2_partial;
    double qh_c = (hot == 2) ? rec.Q2_complete : rec.Q1_complete;
    double qc_c = (hot == 2) ? rec.Q1_complete : rec.Q2_complete;
    rec.mode_partial = classify_mode(rec.W_partial, qh_p, qc_p);
    rec.mode_complete = classify_mode(rec.W_complete, qh_c, qc_c);
    return rec;
}

// Record from explicitly supplied states; rejects non-steady input.
inline ThermoRecord make_record_checked(const ModelParams& p, const Matrix& steady,
                                        const Matrix& bath_state,
                                        const Matrix& collision_unitary) {
    require_steady(collision_unitary, steady, bath_state, "make_record_checked");
    return make_record(p, steady, bath_state,
                       collide_joint(collision_unitary, steady, bath_state));
}

// Full pipeline with a caller-supplied collision unitary (hoist it when
// evaluating many bath preparations under the same parameters).
inline EvaluatedConfiguration evaluate_configuration(const ModelParams& p,
                                                     const Matrix& bath_state,
                                                     const Matrix& collision_unitary) {
    CollisionChannel ch = build_channel(collision_unitary, bath_state);
    SteadyStateResult ss = steady_state(ch);

    EvaluatedConfiguration out;
    out.params = p;
    out.bath_state = bath_state;
    out.steady_rho = ss.rho;
    out.post_joint = collide_joint(collision_unitary, ss.rho, bath_state);
    out.thermo = make_record(p, ss.rho, bath_state, out.post_joint);
    out.spectral_gap = ss.spectral_gap;
    out.residual = ss.residual;
    return out;
}

inline EvaluatedConfiguration evaluate_configuration(const ModelParams& p,
                                                     const Matrix& bath_state) {
    p.validate();
    return evaluate_configuration(p, bath_state, unitary_exp(total_hamiltonian(p), p.tau));
}

inline CorrelationRecord compute_correlations(const EvaluatedConfiguration& cfg) {
    return compute_correlations(cfg.steady_rho, cfg.bath_state, cfg.post_joint);
}

// ---------------------------------------------------------------------------
// Otto reference figures
// ---------------------------------------------------------------------------

// For population-permuting bath preparations the machine runs an Otto cycle
// between the two local fields: efficiency 1 - B_min/B_max as an engine and
// coefficient of performance B_min/|B2 - B1| as a refrigerator.
struct OttoReference {
    double efficiency;
    double cop;
};

inline OttoReference otto_reference(const ModelParams& p) {
    double bmin = std::min(std::abs(p.B1), std::abs(p.B2));
    double bmax = std::max(std::abs(p.B1), std::abs(p.B2));
    if (!(bmax > 0))
        throw std::invalid_argument("otto_reference: needs a nonzero field");
    OttoReference out;
    out.efficiency = 1.0 - bmin / bmax;
    out.cop = (bmax > bmin) ? bmin / (bmax - bmin)
                            : std::numeric_limits<double>::infinity();
    return out;
}

// Measured engine efficiency -W/Q_hot (meaningful when W < 0, Q_hot > 0).
inline double measured_efficiency(double w, double q_hot) {
    if (!(std::abs(q_hot) > 0)) throw std::invalid_argument("measured_efficiency: Q_hot is zero");
    return -w / q_hot;
}

// Measured coefficient of performance Q_cold/W (refrigerator: W > 0, Q_cold > 0).
inline double measured_cop(double w, double q_cold) {
    if (!(std::abs(w) > 0)) throw std::invalid_argument("measured_cop: W is zero");
    return q_cold / w;
}

} // namespace qcollide
