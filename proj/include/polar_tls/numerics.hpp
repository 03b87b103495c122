// numerics.hpp: special-function kernels (log-gamma, integer-order Bessel J,
// associated Laguerre polynomials) and sign-aware log-space summation.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polar_tls {

/// Floating type used where double cannot carry enough digits through an
/// alternating sum. Arithmetic only; no libquadmath calls are needed.
#if defined(__SIZEOF_FLOAT128__) && !defined(POLAR_TLS_NO_FLOAT128)
using wide_float = __float128;
#else
using wide_float = long double;
#endif

/// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// |sum| / max|term| below this marks a double-precision sum as unreliable.
inline constexpr double kCancellationThreshold = 1e-13;

/// Value plus a flag that the computation lost most of its significant digits.
template <class T>
struct Flagged {
    T value{};
    bool precision_loss = false;
};

/// A real number stored as sign and natural log of its magnitude.
///
/// The log is kept in long double so that exp(log_abs) reproduces any finite
/// double to a few ulp even when |log_abs| is in the hundreds.
struct SignedLog {
    long double log_abs = -std::numeric_limits<long double>::infinity();
    int sign = 0;

    static SignedLog zero() { return {}; }

    static SignedLog from_value(double x) {
        if (x == 0.0) return zero();
        return {std::log(std::fabs(static_cast<long double>(x))), x > 0 ? 1 : -1};
    }

    static SignedLog from_log(long double log_abs, int sign) {
        if (sign == 0 || log_abs == -std::numeric_limits<long double>::infinity()) return zero();
        return {log_abs, sign > 0 ? 1 : -1};
    }

    bool is_zero() const { return sign == 0; }

    double value() const {
        if (sign == 0) return 0.0;
        return static_cast<double>(sign * std::exp(log_abs));
    }

    friend SignedLog operator*(const SignedLog& a, const SignedLog& b) {
        if (a.sign == 0 || b.sign == 0) return zero();
        return {a.log_abs + b.log_abs, a.sign * b.sign};
    }

    friend SignedLog operator/(const SignedLog& a, const SignedLog& b) {
        if (b.sign == 0) throw std::domain_error("SignedLog: division by zero");
        if (a.sign == 0) return zero();
        return {a.log_abs - b.log_abs, a.sign * b.sign};
    }
};

namespace detail {

inline long double wide_abs(long double x) { return std::fabs(x); }
#if defined(__SIZEOF_FLOAT128__) && !defined(POLAR_TLS_NO_FLOAT128)
inline __float128 wide_abs(__float128 x) { return x < 0 ? -x : x; }
#endif
inline double wide_abs(double x) { return std::fabs(x); }

/// Neumaier-compensated running sum.
template <class Real>
class CompensatedSum {
public:
    void add(Real x) {
        const Real t = sum_ + x;
        if (wide_abs(sum_) >= wide_abs(x))
            carry_ += (sum_ - t) + x;
        else
            carry_ += (x - t) + sum_;
        sum_ = t;
    }
    Real value() const { return sum_ + carry_; }

private:
    Real sum_ = 0;
    Real carry_ = 0;
};

}  // namespace detail

/// Accumulates terms of mixed sign with positive and negative parts kept
/// apart, then recombines once. Terms are expected to be pre-scaled by the
/// largest magnitude (the max-shift of a log-space sum).
template <class Real>
class SplitSum {
public:
    void add(Real term) {
        const Real mag = detail::wide_abs(term);
        if (mag > max_abs_) max_abs_ = mag;
        if (term > 0)
            positive_.add(term);
        else if (term < 0)
            negative_.add(-term);
    }

    Real value() const { return positive_.value() - negative_.value(); }
    Real max_abs() const { return max_abs_; }

    /// True when the recombined value is smaller than `threshold` times the
    /// largest single term.
    bool cancelled(double threshold) const {
        if (max_abs_ == 0) return false;
        return detail::wide_abs(value()) < static_cast<Real>(threshold) * max_abs_;
    }

private:
    detail::CompensatedSum<Real> positive_;
    detail::CompensatedSum<Real> negative_;
    Real max_abs_ = 0;
};

/// ln Γ(x) for x > 0. Backed by the reentrant libm routine.
inline double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive, got " + std::to_string(x));
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

/// ln C(n, k) for integers 0 <= k <= n. Short products are summed directly,
/// which keeps full relative precision when k or n-k is small.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    const std::int64_t m = std::min(k, n - k);
    if (m == 0) return 0.0;
    if (m <= 48) {
        double acc = 0.0;
        for (std::int64_t i = 1; i <= m; ++i)
            acc += std::log(static_cast<double>(n - m + i) / static_cast<double>(i));
        return acc;
    }
    return log_gamma(static_cast<double>(n) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) -
           log_gamma(static_cast<double>(n - k) + 1.0);
}

/// Σ terms evaluated in log space: shift by the largest log, exponentiate,
/// accumulate positive and negative parts separately, recombine.
inline Flagged<SignedLog> signed_log_sum(std::span<const SignedLog> terms) {
    long double max_log = -std::numeric_limits<long double>::infinity();
    for (const auto& t : terms)
        if (t.sign != 0) max_log = std::max(max_log, t.log_abs);
    if (max_log == -std::numeric_limits<long double>::infinity()) return {SignedLog::zero(), false};

    SplitSum<long double> acc;
    for (const auto& t : terms) {
        if (t.sign == 0) continue;
        acc.add(t.sign * std::exp(t.log_abs - max_log));
    }
    const long double shifted = acc.value();
    const bool cancelled = acc.cancelled(kCancellationThreshold);
    if (shifted == 0) return {SignedLog::zero(), true};
    return {SignedLog{max_log + std::log(std::fabs(shifted)), shifted > 0 ? 1 : -1}, cancelled};
}

inline Flagged<SignedLog> signed_log_sum(std::initializer_list<SignedLog> terms) {
    return signed_log_sum(std::span<const SignedLog>(terms.begin(), terms.size()));
}

// ---------------------------------------------------------------------------
// Bessel functions of the first kind, integer order.

inline constexpr int kBesselMaxOrder = 1'000'000;
inline constexpr double kBesselMaxArgument = 1e6;

namespace detail {

inline void check_bessel_domain(std::int64_t p, double x) {
    if (p > kBesselMaxOrder || p < -kBesselMaxOrder)
        throw std::domain_error("bessel_j: |order| exceeds 1e6");
    if (!(x >= 0.0) || x > kBesselMaxArgument)
        throw std::domain_error("bessel_j: argument must lie in [0, 1e6]");
}

/// Power series; used only where (x/2)^2 <= p + 1 so the terms shrink from
/// the first one and cancellation is mild.
inline double bessel_series(int p, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= -q / (static_cast<double>(k) * static_cast<double>(k + p));
        sum += term;
        if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    }
    double lead;
    if (p <= 128) {
        lead = 1.0;
        const double half_x = 0.5 * x;
        for (int j = 1; j <= p; ++j) lead *= half_x / j;
    } else {
        lead = std::exp(p * std::log(0.5 * x) - log_gamma(p + 1.0));
    }
    return lead * sum;
}

/// Hankel asymptotic expansion for x large against p^2. Returns nullopt when
/// the asymptotic series stops shrinking before reaching double precision.
inline std::optional<double> bessel_hankel(int p, double x) {
    const double mu = 4.0 * static_cast<double>(p) * static_cast<double>(p);
    double big_p = 0.0;
    double big_q = 0.0;
    double term = 1.0;
    bool converged = false;
    for (int k = 0; k < 400; ++k) {
        const int quarter = k / 2;
        const double sgn = (quarter % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0)
            big_p += sgn * term;
        else
            big_q += sgn * term;
        const double odd = 2.0 * k + 1.0;
        const double next = term * (mu - odd * odd) / ((k + 1.0) * 8.0 * x);
        if (std::fabs(next) < 1e-17) {
            converged = true;
            break;
        }
        if (std::fabs(next) > std::fabs(term) && k > 2) break;
        term = next;
    }
    if (!converged) return std::nullopt;

    // chi = x - (2p+1) pi/4; expand cos/sin of the difference so that the
    // large argument x is reduced by libm on its own.
    constexpr double r = 0.70710678118654752440;
    double cphi = 0.0;
    double sphi = 0.0;
    switch (((2 * p + 1) % 8 + 8) % 8) {
        case 1: cphi = r; sphi = r; break;
        case 3: cphi = -r; sphi = r; break;
        case 5: cphi = -r; sphi = -r; break;
        default: cphi = r; sphi = -r; break;
    }
    const double cx = std::cos(x);
    const double sx = std::sin(x);
    const double cchi = cx * cphi + sx * sphi;
    const double schi = sx * cphi - cx * sphi;
    constexpr double two_over_pi = 0.63661977236758134308;
    return std::sqrt(two_over_pi / x) * (big_p * cchi - big_q * schi);
}

inline int miller_start(int max_order, double x) {
    const double top = std::max(static_cast<double>(max_order), std::ceil(x));
    int start = static_cast<int>(top + 20.0 * std::cbrt(top) + 20.0);
    if (start % 2 != 0) ++start;
    return start;
}

/// Miller's downward recurrence. Fills J_0..J_max_order (unnormalised ratios
/// are fixed up at the end). For x <= 25 the sum rule J_0 + 2 Σ J_2k = 1
/// normalises; above that the Hankel values of J_0 / J_1 do.
inline std::vector<double> bessel_miller(int max_order, double x) {
    constexpr double kBig = 1e250;
    constexpr double kShrink = 1e-250;
    const int start = miller_start(max_order, x);

    std::vector<double> value(static_cast<std::size_t>(max_order) + 1, 0.0);
    std::vector<int> rescale_mark(static_cast<std::size_t>(max_order) + 1, 0);
    int rescales = 0;

    double above = 0.0;  // J_{k+1}
    double here = 1.0;   // J_k, starting at k = start
    double even_sum = 0.0;
    if (start % 2 == 0) even_sum += here;
    if (start <= max_order) {
        value[start] = here;
        rescale_mark[start] = rescales;
    }
    for (int k = start; k >= 1; --k) {
        const double below = (2.0 * k / x) * here - above;
        above = here;
        here = below;
        const int idx = k - 1;
        if (std::fabs(here) > kBig) {
            here *= kShrink;
            above *= kShrink;
            even_sum *= kShrink;
            ++rescales;
        }
        if (idx % 2 == 0 && idx > 0) even_sum += here;
        if (idx <= max_order) {
            value[idx] = here;
            rescale_mark[idx] = rescales;
        }
    }
    // here == J_0 (unnormalised), above == J_1.
    double norm;
    if (x <= 25.0) {
        norm = here + 2.0 * even_sum;
    } else {
        const double j0 = *bessel_hankel(0, x);
        const double j1 = *bessel_hankel(1, x);
        norm = (std::fabs(j0) >= std::fabs(j1)) ? here / j0 : above / j1;
    }
    for (std::size_t i = 0; i < value.size(); ++i) {
        const int lag = rescales - rescale_mark[i];
        double v = value[i] / norm;
        for (int l = 0; l < lag && v != 0.0; ++l) v *= kShrink;
        value[i] = v;
    }
    return value;
}

}  // namespace detail

/// J_p(x) for integer p and 0 <= x <= 1e6.
///
/// Series where it is well conditioned, Hankel asymptotics when x >> p^2,
/// Miller's recurrence otherwise. Negative orders use J_{-p} = (-1)^p J_p,
/// so the parity identity holds bit for bit.
inline double bessel_j(std::int64_t order, double x) {
    detail::check_bessel_domain(order, x);
    if (order < 0) {
        const double v = bessel_j(-order, x);
        return (order % 2 == 0) ? v : -v;
    }
    const int p = static_cast<int>(order);
    if (x == 0.0) return p == 0 ? 1.0 : 0.0;
    if (0.25 * x * x <= p + 1.0) return detail::bessel_series(p, x);
    if (x > 25.0 && static_cast<double>(p) * p < x) {
        if (auto h = detail::bessel_hankel(p, x)) return *h;
    }
    return detail::bessel_miller(p, x)[static_cast<std::size_t>(p)];
}

/// J_0(x) .. J_max_order(x) from a single recurrence pass.
inline std::vector<double> bessel_j_sequence(int max_order, double x) {
    detail::check_bessel_domain(max_order, x);
    if (max_order < 0) throw std::domain_error("bessel_j_sequence: max_order must be >= 0");
    if (x == 0.0) {
        std::vector<double> v(static_cast<std::size_t>(max_order) + 1, 0.0);
        v[0] = 1.0;
        return v;
    }
    return detail::bessel_miller(max_order, x);
}

/// Order beyond which J_p(x)^2 is negligible (< 1e-14 tail) for closure sums.
inline int bessel_truncation_order(double x) {
    return static_cast<int>(std::ceil(x + 40.0 * std::cbrt(x) + 20.0));
}

// ---------------------------------------------------------------------------
// Associated Laguerre polynomials.

/// L_n^{(a)}(x) as a SignedLog.
///
/// x = 0 uses the closed form Γ(n+a+1) / (n! Γ(a+1)) written as the product
/// Π_{j=1..n} (a+j)/j, which stays finite when a is a negative integer.
/// Otherwise the three-term recurrence runs in long double with rescaling; the
/// flag is raised when the last step cancels by more than 1e12.
inline Flagged<SignedLog> assoc_laguerre(std::int64_t n, double a, double x) {
    if (n < 0) throw std::domain_error("assoc_laguerre: degree must be non-negative");
    if (!(x >= 0.0)) throw std::domain_error("assoc_laguerre: argument must be non-negative");
    if (n == 0) return {SignedLog::from_value(1.0), false};

    if (x == 0.0) {
        long double log_abs = 0.0L;
        int sign = 1;
        for (std::int64_t j = 1; j <= n; ++j) {
            const long double f = (static_cast<long double>(a) + j) / j;
            if (f == 0) return {SignedLog::zero(), false};
            if (f < 0) sign = -sign;
            log_abs += std::log(std::fabs(f));
        }
        return {SignedLog{log_abs, sign}, false};
    }

    constexpr long double kBig = 1e200L;
    const long double al = a;
    const long double xl = x;
    long double prev = 1.0L;         // L_{k-1}
    long double cur = 1.0L + al - xl;  // L_k
    long double log_scale = 0.0L;
    long double last_term_mag = std::max(std::fabs(1.0L + al), xl);
    for (std::int64_t k = 1; k < n; ++k) {
        const long double lhs = (2.0L * k + 1.0L + al - xl) * cur;
        const long double rhs = (k + al) * prev;
        const long double next = (lhs - rhs) / (k + 1.0L);
        last_term_mag = std::max(std::fabs(lhs), std::fabs(rhs)) / (k + 1.0L);
        prev = cur;
        cur = next;
        const long double mag = std::max(std::fabs(cur), std::fabs(prev));
        if (mag > kBig || (mag < 1.0L / kBig && mag > 0.0L)) {
            const int e = std::ilogb(mag);
            prev = std::ldexp(prev, -e);
            cur = std::ldexp(cur, -e);
            last_term_mag = std::ldexp(last_term_mag, -e);
            log_scale += e * std::log(2.0L);
        }
    }
    const bool loss = (cur == 0.0L) ? last_term_mag > 0.0L : last_term_mag / std::fabs(cur) > 1e12L;
    if (cur == 0.0L) return {SignedLog::zero(), loss};
    SignedLog v{std::log(std::fabs(cur)) + log_scale, cur > 0 ? 1 : -1};
    return {v, loss};
}

}  // namespace polar_tls
