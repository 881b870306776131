// Dual stationary correlation kernels of fractional Brownian motion and its
// integral, the covariance functions they are derived from, and the Lamperti
// (dual) transform connecting the two.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ifbm::kernels {

// =============================================================================
// Domain types
// =============================================================================

/// Hurst index H, strictly inside (0, 1). Endpoints are rejected, not limit-evaluated.
class HurstIndex {
public:
    explicit HurstIndex(double value) : value_(value) {
        if (!(value > 0.0 && value < 1.0))
            throw std::invalid_argument("Hurst index must lie in the open interval (0, 1)");
    }
    [[nodiscard]] double value() const noexcept { return value_; }
    [[nodiscard]] HurstIndex complement() const { return HurstIndex(1.0 - value_); }

private:
    double value_;
};

/// Self-similarity exponent h (1 + H for IFBM, H for fBm).
class SelfSimilarIndex {
public:
    explicit SelfSimilarIndex(double h) : h_(h) {
        if (!(h > 0.0)) throw std::invalid_argument("self-similarity index must be positive");
    }
    [[nodiscard]] double value() const noexcept { return h_; }

private:
    double h_;
};

enum class KernelKind { DualIFBM, DualFBM, DualIFBMHalf };

/// Which dual correlation function; DualIFBMHalf carries no Hurst parameter.
class KernelId {
public:
    static KernelId dual_ifbm(HurstIndex h) { return KernelId(KernelKind::DualIFBM, h); }
    static KernelId dual_fbm(HurstIndex h) { return KernelId(KernelKind::DualFBM, h); }
    static KernelId dual_ifbm_half() { return KernelId(KernelKind::DualIFBMHalf, std::nullopt); }

    [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::optional<HurstIndex>& hurst() const noexcept { return hurst_; }

    /// "ifbm", "fbm" or "ifbm-half"
    [[nodiscard]] std::string_view name() const noexcept;
    static KernelId parse(std::string_view name, std::optional<double> hurst);

private:
    KernelId(KernelKind kind, std::optional<HurstIndex> hurst) : kind_(kind), hurst_(hurst) {}
    KernelKind kind_;
    std::optional<HurstIndex> hurst_;
};

// =============================================================================
// Dual correlation functions
// =============================================================================

/// Below this lag the kernels switch to a Taylor expansion in t.
inline constexpr double kSeriesThreshold = 1e-4;
/// Above this lag only the leading exponential terms are kept.
inline constexpr double kAsymptoticThreshold = 500.0;

/// Correlation of the stationary dual of I_H:
/// [(4+4H)cosh(Ht) - 2cosh((1+H)t) + (2sinh(t/2))^{2H+2}] / (2+4H).
double dual_corr_ifbm(HurstIndex h, double t);

/// Correlation of the stationary dual of I_{1/2}: (3e^{-|t|/2} - e^{-3|t|/2}) / 2.
double dual_corr_ifbm_half(double t);

/// Correlation of the stationary dual of w_H: cosh(Ht) - (2sinh(t/2))^{2H}/2.
double dual_corr_fbm(HurstIndex h, double t);

double evaluate(const KernelId& kernel, double t);

/// Kernel at the rescaled lag p*t (the dual of x(pt) has exponent p*theta).
double time_rescaled(const KernelId& kernel, double p, double t);

namespace detail {
// Individual branches of the piecewise evaluation, exposed for continuity tests.
double ifbm_series(double hurst, double t);
double ifbm_closed(double hurst, double t);
double ifbm_asymptotic(double hurst, double t);
double fbm_series(double hurst, double t);
double fbm_closed(double hurst, double t);
double fbm_asymptotic(double hurst, double t);

/// ((1-x)^a - 1 + a x) / x^2 for x in [0, 1], without cancellation at small x.
double quadratic_remainder(double a, double x);
}  // namespace detail

// =============================================================================
// Covariances of the self-similar processes
// =============================================================================

/// E w_H(t) w_H(s) = (|t|^{2H} + |s|^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(HurstIndex h, double t, double s);

/// Cov(I_H(t), I_H(s)) for t, s >= 0, evaluated in the scale-free ratio s/t so
/// that the leading powers cancel analytically rather than numerically.
double ifbm_covariance(HurstIndex h, double t, double s);

/// Literal closed form of the double integral of the fBm covariance:
/// (1/2)[(s t^{2H+1} + t s^{2H+1})/(2H+1) - (t^{2H+2} + s^{2H+2} - |t-s|^{2H+2})/((2H+1)(2H+2))].
/// Suffers catastrophic cancellation for t >> s in double precision; intended
/// for extended-precision oracles.
template <class Real>
Real ifbm_covariance_closed_form(Real hurst, Real t, Real s) {
    using std::abs;
    using std::pow;
    const Real one(1), two(2);
    const Real a = two * hurst + one;
    const Real b = two * hurst + two;
    const Real cross = (s * pow(t, a) + t * pow(s, a)) / a;
    Real diag = pow(t, b) + pow(s, b);
    if (t != s) diag -= pow(abs(t - s), b);
    return (cross - diag / (a * b)) / two;
}

template <class Real>
Real fbm_covariance_closed_form(Real hurst, Real t, Real s) {
    using std::abs;
    using std::pow;
    const Real e = Real(2) * hurst;
    Real v = pow(abs(t), e) + pow(abs(s), e);
    if (t != s) v -= pow(abs(t - s), e);
    return v / Real(2);
}

/// Dual stationary correlation at lag tau of an h-self-similar process with
/// covariance `cov`: cov(e^tau, 1) e^{-h tau} / cov(1, 1).
template <class Real, class Cov>
Real dual_from_covariance(const Cov& cov, Real h, Real tau) {
    using std::exp;
    const Real one(1);
    const Real var = cov(one, one);
    if (!(var > Real(0))) throw std::domain_error("degenerate variance: cov(1, 1) <= 0");
    using std::abs;
    const Real lag = abs(tau);
    return cov(exp(lag), one) * exp(-h * lag) / var;
}

using CovarianceFn = std::function<double(double, double)>;

double dual_from_covariance(const CovarianceFn& cov, SelfSimilarIndex h, double tau);

}  // namespace ifbm::kernels
