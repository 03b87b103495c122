// A short cascade ensemble from (e,5) and its emission spectrum.

#include <cstdio>

#include "polar_tls/cascade.hpp"

using namespace polar_tls;

int main() {
    const auto p = ModelParams::from_ratios(0.5, 0.5);
    const auto trajs = sample_ensemble({Branch::excited, 5}, p, 2024, 20000, 1000, 2);

    double jumps = 0;
    for (const auto& t : trajs) jumps += static_cast<double>(t.jumps.size());
    std::printf("mean jumps per trajectory: %.4f\n", jumps / static_cast<double>(trajs.size()));

    std::printf("\n%10s %10s\n", "freq/w0", "weight");
    for (const auto& bin : emission_spectrum(trajs, 0.05)) std::printf("%10.3f %10.5f\n", bin.center, bin.weight);
    return 0;
}
