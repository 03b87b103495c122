// Emission rate of (e,0) against coupling strength for a few drive frequencies,
// with the exact partial rates next to the closed form.

#include <cstdio>

#include "polar_tls/rates.hpp"

using namespace polar_tls;

int main() {
    std::printf("%8s %8s %12s %12s %12s\n", "wL/w0", "Oa/w0", "closed", "summed", "n'=0");
    for (double wl : {0.25, 0.5, 1.5}) {
        for (double wa : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const auto p = ModelParams::from_ratios(wl, wa);
            const auto table = total_rate({Branch::excited, 0}, p);
            std::printf("%8.3f %8.3f %12.6f %12.6f %12.6f\n", wl, wa, suppression_rate_e0(p), table.total_over_gamma0,
                        table.transitions.front().rate_over_gamma0);
        }
    }
    const auto blue = ModelParams::from_ratios(2.0, 4.0);
    std::printf("\nspontaneous absorption (g,1)->(e,0) at wL=2w0, Oa=2wL: %.12f (1/e)\n", absorption_rate_g1(blue));
    return 0;
}
