// Minimal library walkthrough: sweep the partial-swap angle of the bath
// preparation and watch the machine change operating mode.
//
// Build target: demo_swap_sweep (no arguments, prints a table to stdout).

#include <qcollide/qcollide.hpp>

#include <cmath>
#include <cstdio>

using namespace qcollide;

int main() {
    ModelParams p; // two-qubit chain with B1 = 0.1, B2 = 0.3, n1 = 0.1, n2 = 2
    const double pi = std::acos(-1.0);

    std::printf("# phi/pi    W_partial      Q2_partial     W_complete     mode_partial\n");
    double best_phi = 0.0, best_w = 0.0;
    for (int k = 0; k <= 24; ++k) {
        const double phi = k * (pi / 2.0) / 24.0;
        Matrix bath = correlated_bath_state(p, partial_swap(phi));
        EvaluatedConfiguration cfg = evaluate_configuration(p, bath);
        const ThermoRecord& t = cfg.thermo;
        std::printf("%8.4f  %+.6e  %+.6e  %+.6e  %s\n", phi / pi, t.W_partial,
                    t.Q2_partial, t.W_complete, to_string(t.mode_partial));
        if (t.W_complete < best_w) {
            best_w = t.W_complete;
            best_phi = phi;
        }
    }

    const OttoReference otto = otto_reference(p);
    std::printf("\nmost negative complete work %.6e at phi = %.4f pi\n", best_w,
                best_phi / pi);
    std::printf("engine efficiency is pinned to 1 - Bmin/Bmax = %.6f\n",
                otto.efficiency);
    return 0;
}
