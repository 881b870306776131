#include "ifbm/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ifbm/kernels.hpp"
#include "ifbm/parallel.hpp"

namespace ifbm::audit {

namespace {

// (1-x)^a - 1, accurate for small x.
double pow1m_minus_one(double x, double a) { return std::expm1(a * std::log1p(-x)); }

bool on_boundary(double v, double lo, double hi) { return v <= lo || v >= hi; }

}  // namespace

// =============================================================================
// Conventions
// =============================================================================

double ProofCoordinates::hurst() const noexcept {
    switch (convention) {
        case AlphaConvention::OneMinusTwoH: return 0.5 * (1.0 - alpha);
        case AlphaConvention::TwoH: return 0.5 * alpha;
        case AlphaConvention::TwoHMinusOne: return 0.5 * (1.0 + alpha);
    }
    return 0.0;
}

double ProofCoordinates::lag() const noexcept { return -std::log(x); }

int expected_sign(InequalityId id) noexcept {
    switch (id) {
        case InequalityId::Ineq21:
        case InequalityId::Ineq23Right: return -1;
        default: return 1;
    }
}

AlphaConvention convention(InequalityId id) noexcept {
    switch (id) {
        case InequalityId::Ineq21: return AlphaConvention::OneMinusTwoH;
        case InequalityId::Ineq22:
        case InequalityId::Ineq24: return AlphaConvention::TwoH;
        default: return AlphaConvention::TwoHMinusOne;
    }
}

std::pair<double, double> alpha_domain(InequalityId id) noexcept {
    if (id == InequalityId::Ineq24) return {0.5, 1.0};
    return {0.0, 1.0};
}

std::string_view name(InequalityId id) noexcept {
    switch (id) {
        case InequalityId::Ineq21: return "2.1";
        case InequalityId::Ineq22: return "2.2";
        case InequalityId::Ineq23Left: return "2.3-left";
        case InequalityId::Ineq23Right: return "2.3-right";
        case InequalityId::Ineq24: return "2.4";
    }
    return "unknown";
}

std::optional<InequalityId> parse_inequality(std::string_view text) {
    for (auto id : kAllInequalities)
        if (text == name(id)) return id;
    return std::nullopt;
}

// =============================================================================
// Delta functions
// =============================================================================

namespace {

// U(x, a) of comparison 2.1, with x > 0.
double u_21(double x, double a) {
    const double bracket = pow1m_minus_one(x, 3.0 - a) + (3.0 - a) * x + (3.0 - a) * std::pow(x, 2.0 - a) -
                           std::pow(x, 3.0 - a);
    return (2.0 + a) * bracket * std::pow(x, 0.5 * a);
}

}  // namespace

double delta_21(const ProofCoordinates& c) {
    if (c.x <= 0.0) return 0.0;
    return u_21(c.x, c.alpha) - u_21(c.x, -c.alpha);
}

double delta_22(const ProofCoordinates& c) {
    const double x = c.x, a = c.alpha, xa = std::pow(x, a);
    return pow1m_minus_one(x, 2.0 + a) + (2.0 + a) * x + (2.0 + a) * std::pow(x, 1.0 + a) -
           std::pow(x, 2.0 + a) + (1.0 + a) * pow1m_minus_one(x, 2.0 - a) * xa - (1.0 + a) * x * x;
}

double delta_23_left(const ProofCoordinates& c) {
    const double x = c.x, a = c.alpha;
    return pow1m_minus_one(x, a + 3.0) + (3.0 + a) * x + (3.0 + a) * std::pow(x, a + 2.0) - std::pow(x, a + 3.0) -
           (a + 2.0) * (3.0 - x) * std::pow(x, 2.0 + 0.5 * a);
}

double delta_23_right(const ProofCoordinates& c) {
    const double x = c.x, a = c.alpha;
    return (3.0 + a) * (x + std::pow(x, a + 2.0)) + pow1m_minus_one(x, a + 3.0) - std::pow(x, a + 3.0) -
           3.0 * (a + 2.0) * x * x + (a + 2.0) * std::pow(x, 3.0 - a);
}

double rescale_24(double alpha) {
    const double h = 0.5 * alpha;
    return 2.0 * std::sqrt((1.0 - h * h) / 3.0);
}

double delta_24(const ProofCoordinates& c) {
    const double x = c.x, a = c.alpha, p = rescale_24(a);
    return (2.0 + a) * (x + std::pow(x, a + 1.0)) + pow1m_minus_one(x, a + 2.0) - std::pow(x, a + 2.0) -
           3.0 * (a + 1.0) * std::pow(x, 1.0 + 0.5 * (a + p)) + (a + 1.0) * std::pow(x, 1.0 + 0.5 * (a + 3.0 * p));
}

double delta(InequalityId id, double x, double alpha) {
    const ProofCoordinates c{x, alpha, convention(id)};
    switch (id) {
        case InequalityId::Ineq21: return delta_21(c);
        case InequalityId::Ineq22: return delta_22(c);
        case InequalityId::Ineq23Left: return delta_23_left(c);
        case InequalityId::Ineq23Right: return delta_23_right(c);
        case InequalityId::Ineq24: return delta_24(c);
    }
    throw std::logic_error("unhandled inequality");
}

// =============================================================================
// Kernel-level counterparts
// =============================================================================

namespace {

// Returns (lhs, rhs) of the comparison written as lhs <= rhs.
std::pair<double, double> kernel_pair(InequalityId id, double hurst, double t) {
    using namespace ifbm::kernels;
    const HurstIndex h(hurst);
    switch (id) {
        case InequalityId::Ineq21: return {dual_corr_ifbm(h, t), dual_corr_ifbm(h.complement(), t)};
        case InequalityId::Ineq22: return {dual_corr_fbm(h.complement(), t), dual_corr_ifbm(h, t)};
        case InequalityId::Ineq23Left: return {dual_corr_ifbm_half(t), dual_corr_ifbm(h, t)};
        case InequalityId::Ineq23Right:
            return {dual_corr_ifbm(h, t), time_rescaled(KernelId::dual_ifbm_half(), 2.0 * (1.0 - hurst), t)};
        case InequalityId::Ineq24:
            return {time_rescaled(KernelId::dual_ifbm_half(), rescale_24(2.0 * hurst), t), dual_corr_ifbm(h, t)};
    }
    throw std::logic_error("unhandled inequality");
}

}  // namespace

double kernel_side(InequalityId id, double x, double alpha) {
    const ProofCoordinates c{x, alpha, convention(id)};
    const double hurst = c.hurst();
    const double t = c.lag();
    const auto [lhs, rhs] = kernel_pair(id, hurst, t);
    if (id == InequalityId::Ineq21) return 2.0 * (4.0 - alpha * alpha) * std::pow(x, 1.5) * (lhs - rhs);
    // Delta is written for B_{I_H} minus the comparison kernel.
    const double diff = expected_sign(id) > 0 ? rhs - lhs : lhs - rhs;
    return (2.0 + 4.0 * hurst) * std::pow(x, 1.0 + hurst) * diff;
}

double kernel_margin(InequalityId id, double alpha, double t) {
    const ProofCoordinates c{0.5, alpha, convention(id)};
    const auto [lhs, rhs] = kernel_pair(id, c.hurst(), t);
    return rhs - lhs;
}

double defining_identity_residual(InequalityId id, std::size_t count, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    const auto [lo, hi] = alpha_domain(id);
    std::uniform_real_distribution<double> ux(0.0, 1.0), ua(lo, hi);
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double x = 0.0, a = 0.0;
        do {
            x = ux(rng);
            a = ua(rng);
        } while (x <= 0.0 || a <= lo || a >= hi);
        worst = std::max(worst, std::abs(delta(id, x, a) - kernel_side(id, x, a)));
    }
    return worst;
}

// =============================================================================
// Grid verification
// =============================================================================

void GridSpec::validate(InequalityId id) const {
    if (nx < 2 || nalpha < 2) throw std::invalid_argument("grid resolutions must be at least 2");
    if (refine_depth < 0) throw std::invalid_argument("refine_depth must be nonnegative");
    if (!(margin_tol > 0.0)) throw std::invalid_argument("margin_tol must be positive");
    const auto [lo, hi] = alpha_domain(id);
    const double a0 = alpha_min.value_or(lo), a1 = alpha_max.value_or(hi);
    if (!(a0 < a1)) throw std::invalid_argument("empty alpha range");
    if (a0 < lo || a1 > hi)
        throw std::invalid_argument("alpha range [" + std::to_string(a0) + ", " + std::to_string(a1) +
                                    "] lies outside the domain of inequality " + std::string(name(id)));
}

namespace {

struct Tally {
    double worst = std::numeric_limits<double>::infinity();  // min signed margin, interior
    double worst_x = 0.0, worst_alpha = 0.0, worst_delta = 0.0;
    double violation = 0.0;  // max (-margin - tol)+ style magnitude
    std::size_t points = 0;
    std::size_t refined = 0;

    void merge(const Tally& o) {
        if (o.worst < worst) {
            worst = o.worst;
            worst_x = o.worst_x;
            worst_alpha = o.worst_alpha;
            worst_delta = o.worst_delta;
        }
        violation = std::max(violation, o.violation);
        points += o.points;
        refined += o.refined;
    }
};

class GridAuditor {
public:
    GridAuditor(InequalityId id, const GridSpec& grid, double a0, double a1)
        : id_(id), grid_(grid), sign_(expected_sign(id)), a0_(a0), a1_(a1) {}

    double margin(double x, double a, Tally& tally) const {
        const double d = delta(id_, x, a);
        const double m = sign_ * d;
        ++tally.points;
        if (m < -grid_.margin_tol) tally.violation = std::max(tally.violation, -m);
        if (!on_boundary(x, 0.0, 1.0) && !on_boundary(a, a0_, a1_) && m < tally.worst) {
            tally.worst = m;
            tally.worst_x = x;
            tally.worst_alpha = a;
            tally.worst_delta = d;
        }
        return m;
    }

    // Corner margins are ordered (x0,a0), (x1,a0), (x0,a1), (x1,a1).
    void refine(double x0, double x1, double b0, double b1, const double (&m)[4], int depth, Tally& tally) const {
        if (depth >= grid_.refine_depth) return;
        if (std::min({m[0], m[1], m[2], m[3]}) >= 10.0 * grid_.margin_tol) return;
        ++tally.refined;
        const double xm = 0.5 * (x0 + x1), bm = 0.5 * (b0 + b1);
        const double bottom = margin(xm, b0, tally);
        const double top = margin(xm, b1, tally);
        const double left = margin(x0, bm, tally);
        const double right = margin(x1, bm, tally);
        const double center = margin(xm, bm, tally);
        refine(x0, xm, b0, bm, {m[0], bottom, left, center}, depth + 1, tally);
        refine(xm, x1, b0, bm, {bottom, m[1], center, right}, depth + 1, tally);
        refine(x0, xm, bm, b1, {left, center, m[2], top}, depth + 1, tally);
        refine(xm, x1, bm, b1, {center, right, top, m[3]}, depth + 1, tally);
    }

private:
    InequalityId id_;
    const GridSpec& grid_;
    int sign_;
    double a0_, a1_;
};

}  // namespace

AuditReport verify_inequality(InequalityId id, const GridSpec& grid) {
    grid.validate(id);
    const auto [lo, hi] = alpha_domain(id);
    const double a0 = grid.alpha_min.value_or(lo), a1 = grid.alpha_max.value_or(hi);
    const std::size_t nx = grid.nx, na = grid.nalpha;
    auto xs = [nx](std::size_t i) { return static_cast<double>(i) / static_cast<double>(nx - 1); };
    auto as = [&](std::size_t j) {
        return j + 1 == na ? a1 : a0 + (a1 - a0) * static_cast<double>(j) / static_cast<double>(na - 1);
    };

    const GridAuditor auditor(id, grid, a0, a1);

    // Each block owns alpha rows [first, last] of cells and recomputes its
    // leading vertex row, so blocks are independent.
    const std::size_t cell_rows = na - 1;
    const std::size_t block_rows = 16;
    const std::size_t blocks = (cell_rows + block_rows - 1) / block_rows;
    std::vector<Tally> tallies(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        Tally& tally = tallies[b];
        const std::size_t first = b * block_rows;
        const std::size_t last = std::min(cell_rows, first + block_rows);
        std::vector<double> below(nx), above(nx);
        for (std::size_t i = 0; i < nx; ++i) below[i] = auditor.margin(xs(i), as(first), tally);
        if (b != 0) tally.points -= nx;  // shared row already counted by the previous block
        for (std::size_t j = first; j < last; ++j) {
            const double b0 = as(j), b1 = as(j + 1);
            for (std::size_t i = 0; i < nx; ++i) above[i] = auditor.margin(xs(i), b1, tally);
            for (std::size_t i = 0; i + 1 < nx; ++i) {
                const double m[4] = {below[i], below[i + 1], above[i], above[i + 1]};
                auditor.refine(xs(i), xs(i + 1), b0, b1, m, 0, tally);
            }
            std::swap(below, above);
        }
    });
    Tally total;
    for (const auto& t : tallies) total.merge(t);

    AuditReport report;
    report.inequality = id;
    report.grid = grid;
    report.worst_margin = total.worst_delta;
    report.worst_location = ProofCoordinates{total.worst_x, total.worst_alpha, convention(id)};
    report.max_violation = total.violation;
    report.points_evaluated = total.points;
    report.cells_refined = total.refined;
    report.grid_pass = total.violation == 0.0;

    // Direct kernel comparison on a log-spaced lag grid for a subsample of the
    // alpha rows whose Hurst index is admissible.
    const std::size_t kernel_alphas = std::min<std::size_t>(na, 101);
    const std::size_t kernel_lags = 200;
    double kworst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < kernel_alphas; ++j) {
        const double a = a0 + (a1 - a0) * static_cast<double>(j) / static_cast<double>(kernel_alphas - 1);
        const ProofCoordinates c{0.5, a, convention(id)};
        const double hurst = c.hurst();
        if (!(hurst > 0.0 && hurst < 1.0)) continue;
        for (std::size_t k = 0; k < kernel_lags; ++k) {
            const double t = std::pow(10.0, -6.0 + 8.0 * static_cast<double>(k) / (kernel_lags - 1));
            const double m = kernel_margin(id, a, t);
            ++report.kernel_points;
            if (m < kworst) {
                kworst = m;
                report.kernel_worst_t = t;
                report.kernel_worst_alpha = a;
            }
        }
    }
    report.kernel_worst_margin = kworst;
    report.kernel_pass = report.kernel_points > 0 && kworst >= -grid.margin_tol;
    report.pass = report.grid_pass && report.kernel_pass;
    return report;
}

// =============================================================================
// Serialization
// =============================================================================

nlohmann::json to_json(const ClaimResult& claim) {
    nlohmann::json j;
    j["id"] = claim.id;
    j["paper_value"] = claim.paper_value ? nlohmann::json(*claim.paper_value) : nlohmann::json(nullptr);
    j["computed_value"] = claim.computed_value;
    j["pass"] = claim.pass;
    j["note"] = claim.note;
    j["formula_variant"] = claim.formula_variant;
    j["details"] = claim.details;
    return j;
}

nlohmann::json to_json(const GridSpec& grid) {
    nlohmann::json j;
    j["nx"] = grid.nx;
    j["nalpha"] = grid.nalpha;
    j["refine_depth"] = grid.refine_depth;
    j["margin_tol"] = grid.margin_tol;
    j["alpha_min"] = grid.alpha_min ? nlohmann::json(*grid.alpha_min) : nlohmann::json(nullptr);
    j["alpha_max"] = grid.alpha_max ? nlohmann::json(*grid.alpha_max) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const AuditReport& report) {
    nlohmann::json j;
    j["inequality"] = std::string(name(report.inequality));
    j["expected_sign"] = expected_sign(report.inequality) > 0 ? ">=0" : "<=0";
    j["grid"] = to_json(report.grid);
    j["worst_margin"] = report.worst_margin;
    j["worst_location"] = {{"x", report.worst_location.x},
                           {"alpha", report.worst_location.alpha},
                           {"hurst", report.worst_location.hurst()}};
    j["max_violation"] = report.max_violation;
    j["points_evaluated"] = report.points_evaluated;
    j["cells_refined"] = report.cells_refined;
    j["kernel_check"] = {{"worst_margin", report.kernel_worst_margin},
                         {"t", report.kernel_worst_t},
                         {"alpha", report.kernel_worst_alpha},
                         {"points", report.kernel_points},
                         {"pass", report.kernel_pass}};
    j["grid_pass"] = report.grid_pass;
    j["pass"] = report.pass;
    nlohmann::json claims = nlohmann::json::array();
    for (const auto& c : report.claims) claims.push_back(to_json(c));
    j["claims"] = claims;
    return j;
}

}  // namespace ifbm::audit
