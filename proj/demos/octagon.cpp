// Minimal library walkthrough: the eight correlation-free bath preparations
// (population permutations of the thermal pair) traced out in the plane of
// complete heat versus complete work, together with the convex hull of all
// 24 permutations that bounds every correlated preparation.
//
// Build target: demo_octagon (no arguments, prints to stdout).

#include <qcollide/qcollide.hpp>

#include <cstdio>

using namespace qcollide;

int main() {
    ModelParams p;
    p.B2 = 0.15; // weak second field: engine, accelerator, and heater coexist

    OctagonAnalysis oct = octagon_analysis(p);

    std::printf("label  pattern   Q2_complete     W_complete      mode\n");
    for (const OctagonPoint& pt : oct.labeled)
        std::printf("%-5s  %s      %+.6e  %+.6e  %s\n", pt.label.c_str(),
                    permutation_pattern(pt.permutation).c_str(), pt.x(), pt.y(),
                    to_string(pt.thermo.mode_complete));

    std::printf("\nconvex hull of all 24 population permutations (counterclockwise):\n ");
    for (std::size_t h : oct.hull)
        std::printf(" %s", oct.permutations[h].label.c_str());
    std::printf("\n");

    PartialExtremes ext = partial_extremes(oct);
    std::printf("\npartial-work range across permutations: [%+.6e, %+.6e] (%s to %s)\n",
                ext.w_min, ext.w_max, ext.argmin_label.c_str(),
                ext.argmax_label.c_str());
    std::printf("Otto efficiency %.4f, coefficient of performance %.4f\n",
                oct.otto.efficiency, oct.otto.cop);
    return 0;
}
