// rates.hpp: spontaneous transition rates between the dressed ladders, in units of Γ0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "polar_tls/ladder.hpp"
#include "polar_tls/model.hpp"
#include "polar_tls/numerics.hpp"
#include "polar_tls/overlaps.hpp"

namespace polar_tls {

/// Γ_{i n n'} / Γ0 = |_{s_i}<n|n'>_{-s_i}|^2 (s_i + (n - n') omega_L/omega_0)^3.
inline double partial_rate(const DressedState& from, std::int64_t n_prime, const ModelParams& params) {
    const auto allowed = allowed_final_indices(from, params);
    if (n_prime < 0 || allowed.empty() || n_prime >= *allowed.end())
        throw std::domain_error("partial_rate: transition " + to_string(from) + " -> n'=" + std::to_string(n_prime) +
                                " is not allowed");
    const double w = photon_frequency(from, n_prime, params) / params.omega0;
    const auto ov = overlap_exact(from.n, n_prime, params, ladder_sign(from.branch));
    if (ov.is_zero() || w == 0.0) return 0.0;
    return std::exp(2.0 * ov.log_abs + 3.0 * std::log(w));
}

/// All allowed jumps out of one dressed state and their summed rate.
struct RateTable {
    DressedState initial;
    std::vector<TransitionRecord> transitions;
    double total_over_gamma0 = 0.0;
};

/// Γ_{i,n} / Γ0 = Σ_{n'} Γ_{i n n'} / Γ0 over the allowed final indices.
inline RateTable total_rate(const DressedState& from, const ModelParams& params) {
    RateTable table;
    table.initial = from;
    const auto allowed = allowed_final_indices(from, params);
    table.transitions.reserve(static_cast<std::size_t>(allowed.size()));
    detail::CompensatedSum<long double> total;
    const DressedState to_base{other(from.branch), 0};
    for (const std::int64_t np : allowed) {
        TransitionRecord rec;
        rec.from = from;
        rec.to = {to_base.branch, np};
        rec.photon_freq = photon_frequency(from, np, params) / params.omega0;
        rec.rate_over_gamma0 = partial_rate(from, np, params);
        total.add(rec.rate_over_gamma0);
        table.transitions.push_back(rec);
    }
    table.total_over_gamma0 = static_cast<double>(total.value());
    return table;
}

/// Closed form for the state (e,0):
/// e^{-beta^2} Σ_{n'=0}^{floor(omega_0/omega_L)} beta^{2n'}/n'! (1 - n' omega_L/omega_0)^3 <= 1.
/// Each term is taken as a Poisson weight in log space so large beta cannot overflow.
inline double suppression_rate_e0(const ModelParams& params) {
    const double b2 = params.beta() * params.beta();
    const double r = params.drive_ratio();
    const auto allowed = allowed_final_indices({Branch::excited, 0}, params);
    detail::CompensatedSum<long double> sum;
    for (const std::int64_t k : allowed) {
        const double cubic = 1.0 - static_cast<double>(k) * r;
        if (cubic <= 0.0) continue;
        double weight;
        if (b2 == 0.0)
            weight = (k == 0) ? 1.0 : 0.0;
        else
            weight = std::exp(static_cast<double>(k) * std::log(b2) - log_gamma(static_cast<double>(k) + 1.0) - b2);
        sum.add(weight * cubic * cubic * cubic);
    }
    return static_cast<double>(sum.value());
}

/// Γ_{g10} / Γ0 = e^{-beta^2} beta^2 (omega_L/omega_0 - 1)^3 for omega_L > omega_0, else 0.
inline double absorption_rate_g1(const ModelParams& params) {
    const double r = params.drive_ratio();
    if (r <= 1.0) return 0.0;
    const double b2 = params.beta() * params.beta();
    const double d = r - 1.0;
    return std::exp(-b2) * b2 * d * d * d;
}

// ---------------------------------------------------------------------------
// Photon-number distributions of the drive.

/// Normalised weights |c_n|^2 over ladder indices.
class PhotonDistribution {
public:
    static constexpr double kNormTolerance = 1e-12;

    /// Takes weights that already sum to one (within 1e-12).
    static PhotonDistribution from_weights(std::map<std::int64_t, double> weights) {
        long double total = 0.0L;
        for (const auto& [n, w] : weights) {
            if (n < 0) throw std::invalid_argument("PhotonDistribution: negative photon number");
            if (!(w >= 0.0)) throw std::invalid_argument("PhotonDistribution: weights must be non-negative");
            total += w;
        }
        if (std::fabs(static_cast<double>(total) - 1.0) > kNormTolerance)
            throw std::invalid_argument("PhotonDistribution: weights sum to " + std::to_string(static_cast<double>(total)));
        PhotonDistribution d;
        d.weights_ = std::move(weights);
        return d;
    }

    /// Rescales arbitrary non-negative weights to unit sum.
    static PhotonDistribution normalized(std::map<std::int64_t, double> weights) {
        long double total = 0.0L;
        for (const auto& [n, w] : weights) total += w;
        if (!(total > 0.0L)) throw std::invalid_argument("PhotonDistribution: weights sum to zero");
        for (auto& [n, w] : weights) w = static_cast<double>(w / total);
        return from_weights(std::move(weights));
    }

    static PhotonDistribution delta(std::int64_t n) { return from_weights({{n, 1.0}}); }

    /// Poisson weights of a coherent state with mean photon number `mean`,
    /// truncated where the tail is below 1e-30 and renormalised.
    static PhotonDistribution poisson(double mean) {
        if (!(mean > 0.0)) throw std::invalid_argument("PhotonDistribution::poisson: mean must be positive");
        const double spread = 12.0 * std::sqrt(mean) + 30.0;
        const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(mean - spread)));
        const auto hi = static_cast<std::int64_t>(std::ceil(mean + spread));
        std::map<std::int64_t, double> w;
        const double log_mean = std::log(mean);
        for (std::int64_t n = lo; n <= hi; ++n) {
            const double lw = static_cast<double>(n) * log_mean - mean - log_gamma(static_cast<double>(n) + 1.0);
            if (lw > -69.0) w[n] = std::exp(lw);
        }
        return normalized(std::move(w));
    }

    const std::map<std::int64_t, double>& weights() const { return weights_; }

private:
    std::map<std::int64_t, double> weights_;
};

/// Σ_n |c_n|^2 Γ_{i,n} / Γ0 for a drive in the given photon distribution.
inline double weighted_total_rate(Branch branch, const PhotonDistribution& dist, const ModelParams& params) {
    detail::CompensatedSum<long double> sum;
    for (const auto& [n, w] : dist.weights()) {
        if (w == 0.0) continue;
        sum.add(static_cast<long double>(w) * total_rate({branch, n}, params).total_over_gamma0);
    }
    return static_cast<double>(sum.value());
}

// ---------------------------------------------------------------------------
// Semiclassical (large n̄) limit.

/// [x]: nearest integer, ties to even.
inline std::int64_t nearest_photon_number(double n_bar) {
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar)) throw std::domain_error("photon number must be finite and >= 0");
    const double fl = std::floor(n_bar);
    const double frac = n_bar - fl;
    auto r = static_cast<std::int64_t>(fl);
    if (frac > 0.5 || (frac == 0.5 && r % 2 != 0)) ++r;
    return r;
}

/// Bessel argument |Omega_a| sqrt([n̄]) / omega_L.
inline double semiclassical_argument(std::int64_t n_round, const ModelParams& params) {
    return params.omegaA_abs * std::sqrt(static_cast<double>(n_round)) / params.omegaL;
}

/// Γ_{i n̄ p} / Γ0 ≈ J_p(x)^2 (s_i + p omega_L/omega_0)^3.
inline double semiclassical_partial(Branch branch, double n_bar, std::int64_t p, const ModelParams& params) {
    const std::int64_t nr = nearest_photon_number(n_bar);
    if (nr < 10 * std::abs(p))
        throw std::domain_error("semiclassical_partial: need [n_bar] >= 10|p|");
    const double w = branch_sign(branch) + static_cast<double>(p) * params.drive_ratio();
    if (w < 0.0) throw std::domain_error("semiclassical_partial: p violates p >= -s_i omega_0/omega_L");
    const double j = bessel_j(p, semiclassical_argument(nr, params));
    return j * j * w * w * w;
}

struct SemiclassicalTotals {
    double gamma_e = 0.0;
    double gamma_g = 0.0;
};

/// Γ_g = Σ_{p >= omega_0/omega_L} J_p(x)^2 (p omega_L/omega_0 - 1)^3 and
/// Γ_e = 1 + 3|Omega_a|^2 [n̄] / (2 omega_0^2) + Γ_g, both over Γ0.
/// The p-sum runs to x + 40 x^{1/3} + 20, past which J_p^2 falls off
/// super-exponentially and the weighted tail is below 1e-12.
inline SemiclassicalTotals semiclassical_totals(double n_bar, const ModelParams& params) {
    const std::int64_t nr = nearest_photon_number(n_bar);
    if (nr < 1) throw std::domain_error("semiclassical_totals: need [n_bar] >= 1");
    const double r = params.drive_ratio();
    const double x = semiclassical_argument(nr, params);

    SemiclassicalTotals out;
    const auto p_first = static_cast<std::int64_t>(std::max(1.0, std::ceil(1.0 / r)));
    const int p_last = bessel_truncation_order(x);
    if (x > 0.0 && p_first <= p_last) {
        const auto j = bessel_j_sequence(p_last, x);
        detail::CompensatedSum<long double> sum;
        for (std::int64_t p = p_first; p <= p_last; ++p) {
            const double w = static_cast<double>(p) * r - 1.0;
            if (w <= 0.0) continue;
            const double jp = j[static_cast<std::size_t>(p)];
            sum.add(static_cast<long double>(jp * jp) * w * w * w);
        }
        out.gamma_g = static_cast<double>(sum.value());
    }
    const double coupling = params.omegaA_abs / params.omega0;
    out.gamma_e = 1.0 + 1.5 * coupling * coupling * static_cast<double>(nr) + out.gamma_g;
    return out;
}

// ---------------------------------------------------------------------------
// SI normalisation.

namespace si {
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double epsilon0 = 8.8541878128e-12;   // F / m
inline constexpr double c = 299792458.0;               // m / s
inline constexpr double debye = 1e-21 / 299792458.0;   // C m
}  // namespace si

struct Gamma0Params {
    double omega0 = 0.0;  // rad / s
    double dipole = 0.0;  // C m
};

/// Γ0 = omega_0^3 d^2 / (3 pi hbar epsilon_0 c^3), in 1/s.
inline double gamma0_si(const Gamma0Params& p) {
    if (!(p.omega0 > 0.0)) throw std::invalid_argument("gamma0_si: omega0 must be positive");
    if (!(p.dipole >= 0.0)) throw std::invalid_argument("gamma0_si: dipole must be non-negative");
    return p.omega0 * p.omega0 * p.omega0 * p.dipole * p.dipole /
           (3.0 * std::numbers::pi * si::hbar * si::epsilon0 * si::c * si::c * si::c);
}

}  // namespace polar_tls
