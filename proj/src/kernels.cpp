#include "ifbm/kernels.hpp"

#include <cmath>
#include <limits>

namespace ifbm::kernels {

namespace {

// sinh(u)/u for |u| below ~1e-4.
double sinhc_small(double u) {
    const double u2 = u * u;
    return 1.0 + u2 / 6.0 + u2 * u2 / 120.0;
}

}  // namespace

// =============================================================================
// KernelId
// =============================================================================

std::string_view KernelId::name() const noexcept {
    switch (kind_) {
        case KernelKind::DualIFBM: return "ifbm";
        case KernelKind::DualFBM: return "fbm";
        case KernelKind::DualIFBMHalf: return "ifbm-half";
    }
    return "unknown";
}

KernelId KernelId::parse(std::string_view name, std::optional<double> hurst) {
    if (name == "ifbm-half") return dual_ifbm_half();
    if (name != "ifbm" && name != "fbm")
        throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
    if (!hurst) throw std::invalid_argument("kernel '" + std::string(name) + "' requires a Hurst index");
    const HurstIndex h(*hurst);
    return name == "ifbm" ? dual_ifbm(h) : dual_fbm(h);
}

// =============================================================================
// Branches
// =============================================================================

namespace detail {

double quadratic_remainder(double a, double x) {
    if (x < 0.25) {
        // sum_{k>=2} C(a,k) (-x)^{k-2}; successive terms shrink by ~x (k-a)/(k+1).
        double term = a * (a - 1.0) / 2.0;
        double sum = term;
        for (int k = 2; k < 400; ++k) {
            term *= x * (k - a) / (k + 1.0);
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::pow(1.0 - x, a) - 1.0 + a * x) / (x * x);
}

double ifbm_series(double hurst, double t) {
    const double h2 = hurst * hurst;
    const double g2 = (1.0 + hurst) * (1.0 + hurst);
    const double norm = 2.0 + 4.0 * hurst;
    // Even part from the two cosh terms, through t^6.
    const double t2 = t * t;
    double even = 0.0;
    double hp = 1.0, gp = 1.0, tp = 1.0, fact = 1.0;
    for (int k = 1; k <= 3; ++k) {
        hp *= h2;
        gp *= g2;
        tp *= t2;
        fact *= (2.0 * k - 1.0) * (2.0 * k);
        even += ((4.0 + 4.0 * hurst) * hp - 2.0 * gp) * tp / fact;
    }
    const double a = 2.0 * hurst + 2.0;
    const double rough = std::pow(t * sinhc_small(0.5 * t), a);
    return 1.0 + (even + rough) / norm;
}

double ifbm_closed(double hurst, double t) {
    const double x = std::exp(-t);
    const double a = 2.0 * hurst + 2.0;
    // Multiply the bracket of the closed form by x^{1+H}; the leading
    // 1 - a x of (1-x)^a cancels inside quadratic_remainder.
    const double v = quadratic_remainder(a, x) * std::pow(x, 1.0 - hurst) +
                     (2.0 + 2.0 * hurst) * std::pow(x, hurst) - std::pow(x, 1.0 + hurst);
    return v / (2.0 + 4.0 * hurst);
}

double ifbm_asymptotic(double hurst, double t) {
    return ((2.0 * hurst + 1.0) * (hurst + 1.0) * std::exp((hurst - 1.0) * t) +
            (2.0 + 2.0 * hurst) * std::exp(-hurst * t)) /
           (2.0 + 4.0 * hurst);
}

double fbm_series(double hurst, double t) {
    const double h2t2 = hurst * hurst * t * t;
    const double even = h2t2 / 2.0 + h2t2 * h2t2 / 24.0 + h2t2 * h2t2 * h2t2 / 720.0;
    return 1.0 + even - 0.5 * std::pow(t * sinhc_small(0.5 * t), 2.0 * hurst);
}

double fbm_closed(double hurst, double t) {
    const double x = std::exp(-t);
    // (1 - (1-x)^{2H}) / x, which tends to 2H as x -> 0.
    const double q = -std::expm1(2.0 * hurst * std::log1p(-x)) / x;
    return 0.5 * (q * std::pow(x, 1.0 - hurst) + std::pow(x, hurst));
}

double fbm_asymptotic(double hurst, double t) {
    return 0.5 * (2.0 * hurst * std::exp((hurst - 1.0) * t) + std::exp(-hurst * t));
}

}  // namespace detail

// =============================================================================
// Public kernels
// =============================================================================

double dual_corr_ifbm(HurstIndex h, double t) {
    t = std::abs(t);
    if (t < kSeriesThreshold) return detail::ifbm_series(h.value(), t);
    if (t > kAsymptoticThreshold) return detail::ifbm_asymptotic(h.value(), t);
    return detail::ifbm_closed(h.value(), t);
}

double dual_corr_ifbm_half(double t) {
    t = std::abs(t);
    return 0.5 * (3.0 * std::exp(-0.5 * t) - std::exp(-1.5 * t));
}

double dual_corr_fbm(HurstIndex h, double t) {
    t = std::abs(t);
    if (t < kSeriesThreshold) return detail::fbm_series(h.value(), t);
    if (t > kAsymptoticThreshold) return detail::fbm_asymptotic(h.value(), t);
    return detail::fbm_closed(h.value(), t);
}

double evaluate(const KernelId& kernel, double t) {
    switch (kernel.kind()) {
        case KernelKind::DualIFBM: return dual_corr_ifbm(*kernel.hurst(), t);
        case KernelKind::DualFBM: return dual_corr_fbm(*kernel.hurst(), t);
        case KernelKind::DualIFBMHalf: return dual_corr_ifbm_half(t);
    }
    throw std::logic_error("unhandled kernel kind");
}

double time_rescaled(const KernelId& kernel, double p, double t) {
    if (!(p > 0.0)) throw std::invalid_argument("time rescaling factor must be positive");
    return evaluate(kernel, p * t);
}

// =============================================================================
// Covariances
// =============================================================================

double fbm_covariance(HurstIndex h, double t, double s) {
    if (t < 0.0 || s < 0.0) return fbm_covariance_closed_form(h.value(), t, s);
    if (t < s) std::swap(t, s);
    if (s == 0.0) return 0.0;
    // t^{2H} [r^{2H} + 1 - (1-r)^{2H}] / 2; the literal form cancels badly for s << t
    const double H2 = 2.0 * h.value();
    const double r = s / t;
    return 0.5 * std::pow(t, H2) * (std::pow(r, H2) - std::expm1(H2 * std::log1p(-r)));
}

double ifbm_covariance(HurstIndex h, double t, double s) {
    if (t < 0.0 || s < 0.0) throw std::invalid_argument("IFBM covariance needs t, s >= 0");
    if (t < s) std::swap(t, s);
    if (s == 0.0) return 0.0;
    const double H = h.value();
    const double a = 2.0 * H + 2.0;
    const double r = s / t;
    // t^a [ (1-r)^a - 1 + a r + a r^{2H+1} - r^a ] / (2 (2H+1)(2H+2))
    const double bracket = detail::quadratic_remainder(a, r) * r * r + a * std::pow(r, 2.0 * H + 1.0) -
                           std::pow(r, a);
    return 0.5 * std::pow(t, a) * bracket / ((2.0 * H + 1.0) * a);
}

double dual_from_covariance(const CovarianceFn& cov, SelfSimilarIndex h, double tau) {
    return dual_from_covariance<double>(cov, h.value(), tau);
}

}  // namespace ifbm::kernels
