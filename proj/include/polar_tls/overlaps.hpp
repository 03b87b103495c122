// overlaps.hpp: overlaps between displaced Fock states of the two dressed ladders.
//
// |n>_± = D(∓ Omega_a / 4 omega_L) |n>. Same-sign states are orthonormal;
// opposite-sign states overlap as <l| D(± Omega_a / 2 omega_L) |n>.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "polar_tls/model.hpp"
#include "polar_tls/numerics.hpp"

namespace polar_tls {

/// A complex overlap stored as ln|value| and phase, so that magnitudes far
/// below the double range survive.
struct OverlapValue {
    double log_abs = -std::numeric_limits<double>::infinity();
    double phase = 0.0;  // radians, in (-pi, pi]
    bool precision_loss = false;

    bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }
    double modulus() const { return std::exp(log_abs); }
    double norm_sq() const { return std::exp(2.0 * log_abs); }
    std::complex<double> to_complex() const { return std::polar(modulus(), phase); }
};

namespace detail {

inline double wrap_phase(double phase) {
    double w = std::remainder(phase, 2.0 * std::numbers::pi);
    if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
    return w;
}

inline void check_indices(std::int64_t ell, std::int64_t n) {
    if (ell < 0 || n < 0) throw std::domain_error("overlap: ladder indices must be non-negative");
}

/// ln|T_k| for T_k = sqrt(l! n!) beta^{l+n-2k} / (k! (l-k)! (n-k)!), written
/// as sqrt(C(l,k) C(n,k) / ((l-k)! (n-k)!)) beta^{l+n-2k}.
inline double log_overlap_term(std::int64_t ell, std::int64_t n, std::int64_t k, double log_beta) {
    const double powers = (log_beta == -std::numeric_limits<double>::infinity() && ell + n - 2 * k == 0)
                              ? 0.0
                              : static_cast<double>(ell + n - 2 * k) * log_beta;
    return powers + 0.5 * (log_binomial(ell, k) + log_binomial(n, k)) -
           0.5 * (log_gamma(static_cast<double>(ell - k) + 1.0) + log_gamma(static_cast<double>(n - k) + 1.0));
}

/// Σ_k (-1)^k T_k in log space for opposite-sign ladders.
///
/// ln|Σ| = ln T_max + ln|Σ (-1)^k exp(ln T_k - ln T_max)|. The shifted
/// exponentials are generated from the largest term by the exact term ratio
/// T_{k+1}/T_k = (l-k)(n-k) / ((k+1) beta^2) and summed in wide precision with
/// positive and negative parts separated. Terms below 1e-40 of the largest are
/// dropped. If the sum still cancels below 1e-20 of its largest term, the
/// Laguerre recurrence is used instead.
struct AlternatingResult {
    double log_abs = -std::numeric_limits<double>::infinity();
    int sign = 0;
    bool precision_loss = false;
};

inline constexpr double kWideCancellationThreshold = 1e-20;

/// The same sum through the Laguerre form
/// Σ_k (-1)^k T_k = (-1)^m sqrt(m!/M!) beta^{M-m} L_m^{(M-m)}(beta^2), m = min(l,n), M = max(l,n).
/// The recurrence in m does not cancel the way the k-sum does once
/// beta sqrt(n) is large, so it takes over when the wide sum runs out of digits.
inline AlternatingResult laguerre_overlap_sum(std::int64_t ell, std::int64_t n, double beta) {
    const std::int64_t m = std::min(ell, n);
    const std::int64_t big = std::max(ell, n);
    const auto lag = assoc_laguerre(m, static_cast<double>(big - m), beta * beta);
    AlternatingResult out;
    out.precision_loss = lag.precision_loss;
    if (lag.value.is_zero()) return out;
    out.sign = lag.value.sign * ((m % 2 == 0) ? 1 : -1);
    // ln(M!/m!), summed directly for the usual small |l - n|.
    long double log_ratio = 0.0L;
    if (big - m <= 64) {
        for (std::int64_t j = m + 1; j <= big; ++j) log_ratio += std::log(static_cast<long double>(j));
    } else {
        int s1 = 0, s2 = 0;
        log_ratio = ::lgammal_r(static_cast<long double>(big) + 1.0L, &s1) -
                    ::lgammal_r(static_cast<long double>(m) + 1.0L, &s2);
    }
    out.log_abs = static_cast<double>(lag.value.log_abs - 0.5L * log_ratio +
                                      static_cast<long double>(big - m) * std::log(static_cast<long double>(beta)));
    return out;
}

inline AlternatingResult alternating_overlap_sum(std::int64_t ell, std::int64_t n, double beta) {
    const std::int64_t top = std::min(ell, n);
    if (beta == 0.0) {
        if (ell != n) return {};
        // Only k = n survives: T_n = 1.
        return {0.0, (n % 2 == 0) ? 1 : -1, false};
    }
    const double beta_sq = beta * beta;

    // Term magnitudes are log-concave in k; the largest sits at the first k
    // whose forward ratio drops below one.
    auto ratio_below_one = [&](std::int64_t k) {
        return static_cast<double>(ell - k) * static_cast<double>(n - k) < static_cast<double>(k + 1) * beta_sq;
    };
    std::int64_t lo = 0;
    std::int64_t hi = top;  // ratio at k = top is zero, so the predicate holds there
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (ratio_below_one(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    const std::int64_t k_max = lo;
    const double log_t_max = log_overlap_term(ell, n, k_max, std::log(beta));

    const wide_float beta_sq_w = static_cast<wide_float>(beta) * static_cast<wide_float>(beta);
    const wide_float cutoff = static_cast<wide_float>(1e-40);
    auto forward_ratio = [&](std::int64_t k) -> wide_float {
        return static_cast<wide_float>(ell - k) * static_cast<wide_float>(n - k) /
               (static_cast<wide_float>(k + 1) * beta_sq_w);
    };

    SplitSum<wide_float> acc;
    const int sign_at_max = (k_max % 2 == 0) ? 1 : -1;
    acc.add(static_cast<wide_float>(sign_at_max));
    wide_float t = 1;
    int s = sign_at_max;
    for (std::int64_t k = k_max; k < top; ++k) {
        t *= forward_ratio(k);
        s = -s;
        if (t < cutoff) break;
        acc.add(s > 0 ? t : -t);
    }
    t = 1;
    s = sign_at_max;
    for (std::int64_t k = k_max; k > 0; --k) {
        t /= forward_ratio(k - 1);
        s = -s;
        if (t < cutoff) break;
        acc.add(s > 0 ? t : -t);
    }

    const wide_float total = acc.value();
    AlternatingResult out;
    out.precision_loss = acc.cancelled(kWideCancellationThreshold) || total == 0;
    if (out.precision_loss) return laguerre_overlap_sum(ell, n, beta);
    const double mag = static_cast<double>(total < 0 ? -total : total);
    out.sign = total > 0 ? 1 : -1;
    out.log_abs = log_t_max + std::log(mag);
    return out;
}

}  // namespace detail

/// ln|±<l|n>∓| in log space:
/// -beta^2/2 + ln T_max + ln|Σ (-1)^k exp(ln T_k - ln T_max)|, where T_k
/// already carries the sqrt(l! n!) normalisation.
inline double overlap_log_abs(std::int64_t ell, std::int64_t n, const ModelParams& params, Sign bra_sign = Sign::plus) {
    (void)bra_sign;  // the modulus does not depend on which ladder is the bra
    detail::check_indices(ell, n);
    const double beta = params.beta();
    const auto sum = detail::alternating_overlap_sum(ell, n, beta);
    if (sum.sign == 0) return -std::numeric_limits<double>::infinity();
    return std::min(0.0, -0.5 * beta * beta + sum.log_abs);
}

/// Overlap between field states of ladders `bra_sign` and `ket_sign`.
///
/// Same signs give δ_{ln}. Opposite signs give
/// (±)^l (∓)^n e^{-beta^2/2} e^{i(l-n)phi} sqrt(l! n!) Σ_k (-1)^k beta^{l+n-2k} / (k!(l-k)!(n-k)!).
inline OverlapValue overlap_exact(std::int64_t ell, std::int64_t n, const ModelParams& params, Sign bra_sign,
                                  Sign ket_sign) {
    detail::check_indices(ell, n);
    if (bra_sign == ket_sign) {
        OverlapValue v;
        if (ell == n) v.log_abs = 0.0;
        return v;
    }
    const double beta = params.beta();
    const auto sum = detail::alternating_overlap_sum(ell, n, beta);
    OverlapValue v;
    v.precision_loss = sum.precision_loss;
    if (sum.sign == 0) return v;
    v.log_abs = std::min(0.0, -0.5 * beta * beta + sum.log_abs);

    // (±)^l (∓)^n: a factor -1 for every odd power of the minus sign.
    const std::int64_t minus_power = (bra_sign == Sign::plus) ? n : ell;
    double phase = static_cast<double>(ell - n) * params.phi;
    if (minus_power % 2 != 0) phase += std::numbers::pi;
    if (sum.sign < 0) phase += std::numbers::pi;
    v.phase = detail::wrap_phase(phase);
    return v;
}

/// ±<l|n>∓ (ket on the opposite ladder to the bra).
inline OverlapValue overlap_exact(std::int64_t ell, std::int64_t n, const ModelParams& params, Sign bra_sign) {
    return overlap_exact(ell, n, params, bra_sign, opposite(bra_sign));
}

/// The textbook evaluation of ±<l|n>∓ with double factorials and powers.
/// Kept to show where the direct formula breaks down (factorials overflow
/// past n ≈ 170); returns NaN or inf once it does.
inline std::complex<double> overlap_regular(std::int64_t ell, std::int64_t n, const ModelParams& params,
                                            Sign bra_sign) {
    detail::check_indices(ell, n);
    const double beta = params.beta();
    const auto fact = [](std::int64_t m) { return std::tgamma(static_cast<double>(m) + 1.0); };
    double sum = 0.0;
    for (std::int64_t k = 0; k <= std::min(ell, n); ++k) {
        const double term = std::pow(beta, static_cast<double>(ell + n - 2 * k)) / fact(k) / fact(ell - k) / fact(n - k);
        sum += (k % 2 == 0) ? term : -term;
    }
    const double mag = std::sqrt(fact(ell)) * std::sqrt(fact(n)) * std::exp(-0.5 * beta * beta) * sum;
    const std::int64_t minus_power = (bra_sign == Sign::plus) ? n : ell;
    const double sign = (minus_power % 2 == 0) ? 1.0 : -1.0;
    return sign * mag * std::polar(1.0, static_cast<double>(ell - n) * params.phi);
}

/// Large-n approximation ±<n|n-p>∓ ≈ (±)^p e^{ipφ} J_p(|Omega_a| sqrt(n) / omega_L).
/// Requires n >= 1 and |p| <= n/10.
inline OverlapValue overlap_bessel(std::int64_t n, std::int64_t p, const ModelParams& params, Sign bra_sign) {
    if (n < 1) throw std::domain_error("overlap_bessel: n must be >= 1");
    if (10 * std::abs(p) > n)
        throw std::domain_error("overlap_bessel: need |p| <= n/10, got p=" + std::to_string(p) +
                                " n=" + std::to_string(n));
    const double x = params.omegaA_abs * std::sqrt(static_cast<double>(n)) / params.omegaL;
    const double j = bessel_j(p, x);
    OverlapValue v;
    if (j == 0.0) return v;
    v.log_abs = std::log(std::fabs(j));
    double phase = static_cast<double>(p) * params.phi;
    if (bra_sign == Sign::minus && p % 2 != 0) phase += std::numbers::pi;
    if (j < 0.0) phase += std::numbers::pi;
    v.phase = detail::wrap_phase(phase);
    return v;
}

// ---------------------------------------------------------------------------
// Independent oracle: the truncated displacement matrix.

struct DisplacementMatrix {
    int dim = 0;
    std::vector<std::complex<double>> elements;  // row-major, (m, n) -> <m|D|n>
    /// Largest |1 - column norm^2| over the interior columns.
    double truncation_error = 0.0;
    /// Columns n < interior_columns have their displaced support inside the basis.
    int interior_columns = 0;

    std::complex<double> operator()(int m, int n) const {
        return elements[static_cast<std::size_t>(m) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(n)];
    }
};

inline constexpr int kOracleMaxDim = 2000;
inline constexpr double kOracleMaxDeficit = 1e-8;

/// Number of columns n whose displaced state D(alpha)|n> lives inside a
/// dim-dimensional Fock basis: (sqrt(n) + |alpha| + 6)^2 <= dim.
inline int displacement_interior_columns(double alpha_abs, int dim) {
    const double root = std::sqrt(static_cast<double>(dim)) - alpha_abs - 6.0;
    if (root < 0.0) return 0;
    return std::min(dim, static_cast<int>(std::floor(root * root)) + 1);
}

/// <m|D(alpha)|n> for m, n < dim from
/// sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)  (m >= n)
/// and <m|D(alpha)|n> = conj(<n|D(-alpha)|m>) for m < n. Computed in long
/// double with the Laguerre recurrence run along each diagonal.
inline DisplacementMatrix displacement_matrix_oracle(std::complex<double> alpha, int dim) {
    if (dim < 1 || dim > kOracleMaxDim) throw std::domain_error("displacement_matrix_oracle: dim must be in [1, 2000]");
    const double a2 = std::norm(alpha);
    if (a2 > dim / 4.0) throw std::domain_error("displacement_matrix_oracle: |alpha|^2 must not exceed dim/4");

    using ld = long double;
    DisplacementMatrix out;
    out.dim = dim;
    out.elements.assign(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), {0.0, 0.0});
    const ld x = static_cast<ld>(a2);
    const ld abs_alpha = std::sqrt(x);
    const ld arg = (a2 > 0.0) ? static_cast<ld>(std::arg(alpha)) : 0.0L;
    const ld log_abs_alpha = (a2 > 0.0) ? std::log(abs_alpha) : -std::numeric_limits<ld>::infinity();

    for (int diag = 0; diag < dim; ++diag) {
        const ld a = diag;
        ld prev = 0.0L;
        ld cur = 1.0L;  // L_0^{(a)}
        for (int n = 0; n + diag < dim; ++n) {
            if (n == 1) {
                prev = 1.0L;
                cur = 1.0L + a - x;
            } else if (n > 1) {
                const ld next = ((2.0L * (n - 1) + 1.0L + a - x) * cur - ((n - 1) + a) * prev) / n;
                prev = cur;
                cur = next;
            }
            const int m = n + diag;
            int sg = 0;
            ld log_pref = 0.5L * (::lgammal_r(static_cast<ld>(n) + 1.0L, &sg) - ::lgammal_r(static_cast<ld>(m) + 1.0L, &sg)) -
                          0.5L * x;
            if (diag > 0) log_pref += a * log_abs_alpha;
            const ld mag = std::exp(log_pref) * cur;
            const ld lower_phase = a * arg;
            const auto mn = static_cast<std::size_t>(m) * dim + n;
            out.elements[mn] = {static_cast<double>(mag * std::cos(lower_phase)),
                                static_cast<double>(mag * std::sin(lower_phase))};
            if (diag > 0) {
                // conj of (-alpha)^a: (-1)^a e^{-i a arg}.
                const ld sgn = (diag % 2 == 0) ? 1.0L : -1.0L;
                const auto nm = static_cast<std::size_t>(n) * dim + m;
                out.elements[nm] = {static_cast<double>(sgn * mag * std::cos(lower_phase)),
                                    static_cast<double>(-sgn * mag * std::sin(lower_phase))};
            }
        }
    }

    out.interior_columns = displacement_interior_columns(std::sqrt(a2), dim);
    double worst = 0.0;
    for (int n = 0; n < out.interior_columns; ++n) {
        ld norm = 0.0L;
        for (int m = 0; m < dim; ++m) norm += std::norm(std::complex<ld>(out(m, n).real(), out(m, n).imag()));
        worst = std::max(worst, static_cast<double>(std::fabs(1.0L - norm)));
    }
    out.truncation_error = worst;
    if (worst > kOracleMaxDeficit)
        throw std::runtime_error("displacement_matrix_oracle: column-norm deficit " + std::to_string(worst) +
                                 " exceeds 1e-8; increase dim");
    return out;
}

}  // namespace polar_tls
