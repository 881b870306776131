// Grid verification of the Slepian-type comparisons between dual kernels.
//
// Every comparison B1(t) <= B2(t) is rewritten in x = e^{-t} and a proof
// specific alpha, scaled by a positive factor, and audited as the sign of a
// polynomial-like function Delta(x, alpha) on the unit square.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ifbm::audit {

// =============================================================================
// Coordinates
// =============================================================================

/// The meaning of alpha differs per proof.
enum class AlphaConvention {
    OneMinusTwoH,  ///< alpha = 1 - 2H
    TwoH,          ///< alpha = 2H
    TwoHMinusOne,  ///< alpha = 2H - 1
};

struct ProofCoordinates {
    double x = 0.0;      ///< e^{-t}, in [0, 1]
    double alpha = 0.0;  ///< in [0, 1]
    AlphaConvention convention = AlphaConvention::OneMinusTwoH;

    [[nodiscard]] double y() const noexcept { return 1.0 - x; }
    [[nodiscard]] double xbar() const noexcept { return 1.0 - x; }
    [[nodiscard]] double beta() const noexcept { return 1.0 - alpha; }
    /// Hurst index encoded by alpha under the active convention.
    [[nodiscard]] double hurst() const noexcept;
    /// Dual-time lag t = -ln x.
    [[nodiscard]] double lag() const noexcept;
};

enum class InequalityId { Ineq21, Ineq22, Ineq23Left, Ineq23Right, Ineq24 };

inline constexpr InequalityId kAllInequalities[] = {InequalityId::Ineq21, InequalityId::Ineq22,
                                                    InequalityId::Ineq23Left, InequalityId::Ineq23Right,
                                                    InequalityId::Ineq24};

/// -1 when Delta <= 0 is claimed, +1 when Delta >= 0 is claimed.
int expected_sign(InequalityId id) noexcept;
AlphaConvention convention(InequalityId id) noexcept;
/// Closed alpha range on which the inequality is claimed.
std::pair<double, double> alpha_domain(InequalityId id) noexcept;
/// "2.1", "2.2", "2.3-left", "2.3-right", "2.4"
std::string_view name(InequalityId id) noexcept;
std::optional<InequalityId> parse_inequality(std::string_view text);

// =============================================================================
// Delta functions
// =============================================================================

/// U(x, a) - U(x, -a); claimed <= 0.
double delta_21(const ProofCoordinates& c);
/// Claimed >= 0.
double delta_22(const ProofCoordinates& c);
/// Claimed >= 0; identically 0 at alpha = 0.
double delta_23_left(const ProofCoordinates& c);
/// Raw Delta of the rescaled comparison B_{I_H}(t) <= B_{I_1/2}(2(1-H)t); claimed <= 0.
double delta_23_right(const ProofCoordinates& c);
/// Claimed >= 0 for alpha in [1/2, 1].
double delta_24(const ProofCoordinates& c);

double delta(InequalityId id, double x, double alpha);

/// p = 2 sqrt((1 - H^2)/3) with H = alpha/2.
double rescale_24(double alpha);

/// Positive normalization times the kernel difference that Delta is defined
/// to equal; computed through the kernels module.
double kernel_side(InequalityId id, double x, double alpha);

/// Kernel-level margin sign * (B_rhs - B_lhs) style difference at lag t for
/// the Hurst index encoded by alpha; >= 0 means the inequality holds.
double kernel_margin(InequalityId id, double alpha, double t);

// =============================================================================
// Grid verification
// =============================================================================

struct GridSpec {
    std::size_t nx = 2000;
    std::size_t nalpha = 2000;
    int refine_depth = 6;
    double margin_tol = 1e-12;
    /// Restriction of the alpha range; defaults to the inequality's domain.
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;

    /// Throws std::invalid_argument on bad resolution/tolerance or an alpha
    /// range outside the inequality's domain.
    void validate(InequalityId id) const;
};

struct ClaimResult {
    std::string id;
    std::optional<double> paper_value;
    double computed_value = 0.0;
    bool pass = false;
    std::string note;
    std::string formula_variant;
    nlohmann::json details = nlohmann::json::object();
};

struct AuditReport {
    InequalityId inequality = InequalityId::Ineq21;
    GridSpec grid;
    /// Delta at the interior point closest to violating the expected sign.
    double worst_margin = 0.0;
    ProofCoordinates worst_location;
    /// Largest sign violation found anywhere (boundary included); 0 if none.
    double max_violation = 0.0;
    std::size_t points_evaluated = 0;
    std::size_t cells_refined = 0;
    double kernel_worst_margin = 0.0;
    double kernel_worst_t = 0.0;
    double kernel_worst_alpha = 0.0;
    std::size_t kernel_points = 0;
    bool grid_pass = false;
    bool kernel_pass = false;
    bool pass = false;
    std::vector<ClaimResult> claims;
};

AuditReport verify_inequality(InequalityId id, const GridSpec& grid);

/// Maximum |Delta - kernel_side| over `count` uniformly random interior points.
double defining_identity_residual(InequalityId id, std::size_t count, unsigned long long seed);

// =============================================================================
// Intermediate claims
// =============================================================================

std::vector<ClaimResult> check_claims();

nlohmann::json to_json(const ClaimResult& claim);
nlohmann::json to_json(const GridSpec& grid);
nlohmann::json to_json(const AuditReport& report);

}  // namespace ifbm::audit
