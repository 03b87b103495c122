// ladder.hpp: the two dressed harmonic ladders and the transitions between them.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ranges>
#include <stdexcept>
#include <string>

#include "polar_tls/model.hpp"

namespace polar_tls {

enum class Branch { excited, ground };

/// s_i: +1 for the excited ladder, -1 for the ground one.
inline constexpr int branch_sign(Branch b) { return b == Branch::excited ? 1 : -1; }
inline constexpr Sign ladder_sign(Branch b) { return b == Branch::excited ? Sign::plus : Sign::minus; }
inline constexpr Branch other(Branch b) { return b == Branch::excited ? Branch::ground : Branch::excited; }
inline constexpr char branch_letter(Branch b) { return b == Branch::excited ? 'e' : 'g'; }

inline Branch parse_branch(const std::string& s) {
    if (s == "e" || s == "excited") return Branch::excited;
    if (s == "g" || s == "ground") return Branch::ground;
    throw std::invalid_argument("unknown branch '" + s + "' (expected e or g)");
}

/// Eigenstate |i> ⊗ |n>_{s_i} of the driven TLS.
struct DressedState {
    Branch branch = Branch::excited;
    std::int64_t n = 0;

    friend bool operator==(const DressedState&, const DressedState&) = default;
};

inline std::string to_string(const DressedState& s) {
    return std::string("(") + branch_letter(s.branch) + "," + std::to_string(s.n) + ")";
}

/// One spontaneous jump between the ladders.
struct TransitionRecord {
    DressedState from;
    DressedState to;
    double rate_over_gamma0 = 0.0;
    double photon_freq = 0.0;  // units of omega_0
};

/// s_i omega_0 / 2 + n omega_L, in the caller's frequency unit. With
/// `include_shift` the constant -|Omega_a|^2 / (16 omega_L) of the
/// transformed frame is restored.
inline double dressed_energy(const DressedState& state, const ModelParams& params, bool include_shift = false) {
    double e = branch_sign(state.branch) * 0.5 * params.omega0 + static_cast<double>(state.n) * params.omegaL;
    if (include_shift) e -= params.omegaA_abs * params.omegaA_abs / (16.0 * params.omegaL);
    return e;
}

/// Frequency s_i omega_0 + (n - n') omega_L of the reservoir photon emitted in
/// the jump from `from` to index `to_index` of the other ladder, caller units.
inline double photon_frequency(const DressedState& from, std::int64_t to_index, const ModelParams& params) {
    return branch_sign(from.branch) * params.omega0 + static_cast<double>(from.n - to_index) * params.omegaL;
}

/// photon_frequency with the precondition checked.
inline double checked_photon_frequency(const DressedState& from, std::int64_t to_index, const ModelParams& params) {
    const double w = photon_frequency(from, to_index, params);
    if (to_index < 0 || w < 0.0)
        throw std::domain_error("photon_frequency: transition " + to_string(from) + " -> " +
                                std::to_string(to_index) + " would need a negative photon frequency");
    return w;
}

using IndexRange = std::ranges::iota_view<std::int64_t, std::int64_t>;

/// Final indices n' >= 0 on the other ladder reachable from `state`:
/// n' <= n + s_i omega_0 / omega_L. The boundary is decided with the same
/// expression as photon_frequency, so an exact integer ratio includes the
/// zero-frequency endpoint.
inline IndexRange allowed_final_indices(const DressedState& state, const ModelParams& params) {
    const double bound = static_cast<double>(state.n) + branch_sign(state.branch) * (params.omega0 / params.omegaL);
    if (bound < -1.0) return IndexRange(0, 0);
    auto last = static_cast<std::int64_t>(std::floor(bound));
    while (last + 1 >= 0 && photon_frequency(state, last + 1, params) >= 0.0) ++last;
    while (last >= 0 && photon_frequency(state, last, params) < 0.0) --last;
    if (last < 0) return IndexRange(0, 0);
    return IndexRange(0, last + 1);
}

}  // namespace polar_tls

template <>
struct std::hash<polar_tls::DressedState> {
    std::size_t operator()(const polar_tls::DressedState& s) const noexcept {
        return std::hash<std::int64_t>{}(s.n * 2 + (s.branch == polar_tls::Branch::excited ? 1 : 0));
    }
};
