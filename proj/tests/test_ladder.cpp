#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "polar_tls/ladder.hpp"

using namespace polar_tls;

namespace {

std::vector<std::int64_t> collect(IndexRange r) { return {r.begin(), r.end()}; }

}  // namespace

TEST(DressedEnergy, Examples) {
    const auto p = ModelParams::from_ratios(0.4, 0.3);
    EXPECT_EQ(dressed_energy({Branch::ground, 0}, p), -0.5);
    EXPECT_DOUBLE_EQ(dressed_energy({Branch::excited, 3}, p), 1.7);
    for (double wl : {0.01, 0.3, 1.0, 7.5}) {
        const auto q = ModelParams::from_ratios(wl, 1.0);
        EXPECT_EQ(dressed_energy({Branch::excited, 0}, q) - dressed_energy({Branch::ground, 0}, q), 1.0);
    }
}

TEST(DressedEnergy, ShiftFlagRestoresConstant) {
    const auto p = ModelParams::from_ratios(0.5, 2.0);
    const DressedState s{Branch::excited, 4};
    EXPECT_DOUBLE_EQ(dressed_energy(s, p) - dressed_energy(s, p, true), 4.0 / (16.0 * 0.5));
}

TEST(AllowedFinalIndices, Examples) {
    EXPECT_EQ(collect(allowed_final_indices({Branch::excited, 0}, ModelParams::from_ratios(1.3, 0.5))),
              (std::vector<std::int64_t>{0}));
    EXPECT_TRUE(allowed_final_indices({Branch::ground, 0}, ModelParams::from_ratios(0.7, 0.5)).empty());
    EXPECT_EQ(collect(allowed_final_indices({Branch::excited, 0}, ModelParams::from_ratios(0.5, 0.5))),
              (std::vector<std::int64_t>{0, 1, 2}));
    EXPECT_EQ(collect(allowed_final_indices({Branch::ground, 1}, ModelParams::from_ratios(2.0, 0.5))),
              (std::vector<std::int64_t>{0}));
}

TEST(AllowedFinalIndices, IntegerBoundaryIncluded) {
    for (int k = 1; k <= 12; ++k) {
        const auto p = ModelParams::from_ratios(1.0 / k, 0.1);
        const auto r = allowed_final_indices({Branch::excited, 3}, p);
        EXPECT_EQ(*r.end(), 3 + k + 1) << k;
        EXPECT_EQ(photon_frequency({Branch::excited, 3}, 3 + k, p), 0.0);
    }
}

TEST(AllowedFinalIndices, MatchesBruteForce) {
    for (double wl : {0.05, 0.1, 0.3, 1.0 / 3.0, 0.7, 1.0, 1.7, 3.0})
        for (Branch b : {Branch::excited, Branch::ground})
            for (std::int64_t n = 0; n <= 25; ++n) {
                const auto p = ModelParams::from_ratios(wl, 0.2);
                const DressedState s{b, n};
                std::vector<std::int64_t> brute;
                for (std::int64_t np = 0; np <= n + 100; ++np)
                    if (photon_frequency(s, np, p) >= 0.0) brute.push_back(np);
                EXPECT_EQ(collect(allowed_final_indices(s, p)), brute) << to_string(s) << " wl=" << wl;
            }
}

TEST(AllowedFinalIndices, ShrinksAsDriveFrequencyGrows) {
    std::int64_t previous = -1;
    for (double wl = 0.02; wl <= 3.0; wl *= 1.03) {
        const auto size = allowed_final_indices({Branch::excited, 7}, ModelParams::from_ratios(wl, 1.0)).size();
        if (previous >= 0) EXPECT_LE(size, previous) << wl;
        previous = static_cast<std::int64_t>(size);
    }
}

TEST(PhotonFrequency, Examples) {
    const auto p1 = ModelParams::from_ratios(0.5, 0.0);
    EXPECT_EQ(photon_frequency({Branch::excited, 0}, 0, p1), 1.0);
    EXPECT_EQ(photon_frequency({Branch::excited, 0}, 1, p1), 0.5);
    EXPECT_EQ(photon_frequency({Branch::ground, 1}, 0, ModelParams::from_ratios(2.0, 0.0)), 1.0);
}

TEST(PhotonFrequency, CheckedRejectsNegative) {
    const auto p = ModelParams::from_ratios(0.5, 0.0);
    EXPECT_THROW(checked_photon_frequency({Branch::excited, 0}, 3, p), std::domain_error);
    EXPECT_THROW(checked_photon_frequency({Branch::ground, 0}, 0, p), std::domain_error);
    EXPECT_THROW(checked_photon_frequency({Branch::excited, 0}, -1, p), std::domain_error);
    EXPECT_EQ(checked_photon_frequency({Branch::excited, 0}, 2, p), 0.0);
}

TEST(PhotonFrequency, EnergyBookkeeping) {
    // Energy difference and photon frequency are computed from different
    // expressions; they agree to a few ulps of the level energy.
    for (double wl : {0.05, 0.37, 0.5, 1.0, 2.3})
        for (Branch b : {Branch::excited, Branch::ground})
            for (std::int64_t n = 0; n <= 40; n += 3) {
                const auto p = ModelParams::from_ratios(wl, 0.4);
                const DressedState from{b, n};
                for (const auto np : allowed_final_indices(from, p)) {
                    const DressedState to{other(b), np};
                    const double de = dressed_energy(from, p) - dressed_energy(to, p);
                    const double scale = std::max(std::fabs(dressed_energy(from, p)), 1.0);
                    EXPECT_NEAR(de, photon_frequency(from, np, p), 4.0 * scale * 0x1.0p-52);
                }
            }
}

TEST(Branch, Helpers) {
    EXPECT_EQ(branch_sign(Branch::excited), 1);
    EXPECT_EQ(branch_sign(Branch::ground), -1);
    EXPECT_EQ(other(Branch::ground), Branch::excited);
    EXPECT_EQ(parse_branch("e"), Branch::excited);
    EXPECT_EQ(parse_branch("ground"), Branch::ground);
    EXPECT_THROW(parse_branch("x"), std::invalid_argument);
    EXPECT_EQ(to_string(DressedState{Branch::ground, 12}), "(g,12)");
}

TEST(ModelParams, Validation) {
    EXPECT_THROW(ModelParams::from_ratios(0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(ModelParams::from_ratios(1.0, -1.0), std::invalid_argument);
    EXPECT_THROW(ModelParams::from_ratios(1.0, 1.0, NAN), std::invalid_argument);
    const auto p = ModelParams::from_ratios(0.25, 0.5);
    EXPECT_EQ(p.beta(), 1.0);
    EXPECT_EQ(std::abs(p.alpha0()), 0.5);
}
