// model.hpp: drive/system parameters of the longitudinally driven two-level system.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace polar_tls {

/// Sign of a field displacement; +1 labels the excited-state ladder, -1 the ground one.
enum class Sign : int { plus = 1, minus = -1 };

inline constexpr int to_int(Sign s) { return static_cast<int>(s); }
inline constexpr Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

/// Frequencies of the TLS, the drive and the longitudinal coupling.
///
/// Any consistent frequency unit works; every rate below depends only on the
/// ratios omega_L/omega_0 and |Omega_a|/omega_L.
struct ModelParams {
    double omega0 = 1.0;      // TLS transition frequency
    double omegaL = 1.0;      // drive frequency
    double omegaA_abs = 0.0;  // |Omega_a|
    double phi = 0.0;         // arg Omega_a, radians

    /// Build from ratios in units of omega_0.
    static ModelParams from_ratios(double omegaL_over_omega0, double omegaA_over_omega0, double phi = 0.0) {
        ModelParams p{1.0, omegaL_over_omega0, omegaA_over_omega0, phi};
        p.validate();
        return p;
    }

    void validate() const {
        if (!(omega0 > 0.0) || !std::isfinite(omega0))
            throw std::invalid_argument("ModelParams: omega0 must be positive, got " + std::to_string(omega0));
        if (!(omegaL > 0.0) || !std::isfinite(omegaL))
            throw std::invalid_argument("ModelParams: omegaL must be positive, got " + std::to_string(omegaL));
        if (!(omegaA_abs >= 0.0) || !std::isfinite(omegaA_abs))
            throw std::invalid_argument("ModelParams: |Omega_a| must be non-negative");
        if (!std::isfinite(phi)) throw std::invalid_argument("ModelParams: phi must be finite");
    }

    /// beta = |Omega_a| / (2 omega_L): separation of the two ladders' displacements.
    double beta() const { return omegaA_abs / (2.0 * omegaL); }

    /// Displacement Omega_a / (4 omega_L) of the excited-ladder field states.
    std::complex<double> alpha0() const { return std::polar(omegaA_abs / (4.0 * omegaL), phi); }

    /// omega_L / omega_0.
    double drive_ratio() const { return omegaL / omega0; }
};

}  // namespace polar_tls
