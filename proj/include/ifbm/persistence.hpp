// Monte Carlo persistence probabilities, exponent regression, and the
// analytic bounds the estimates are compared against.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifbm/kernels.hpp"
#include "ifbm/sampler.hpp"

namespace ifbm::persistence {

using kernels::HurstIndex;

/// SelfSimilar: P(x(t) < level, 0 < t <= T) against log T.
/// Dual: P(x~(s) <= level, 0 < s <= S) against S (level 0 by default).
enum class Side { SelfSimilar, Dual };

std::string_view side_name(Side side) noexcept;

struct HorizonLadder {
    std::vector<double> horizons;
    Side side = Side::Dual;

    /// At least three horizons, strictly increasing, all positive.
    void validate() const;
};

struct HorizonRecord {
    double horizon = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_survive = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct WilsonInterval {
    double low;
    double high;
};

/// 95% Wilson score interval.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

HorizonRecord make_record(double horizon, std::size_t n_survive, std::size_t n_trials);

struct ExponentFit {
    double theta_hat = 0.0;
    double std_err = 0.0;
    double intercept = 0.0;
    double chi2_reduced = 0.0;
    std::vector<double> fit_window;  ///< horizons used by the final fit
    std::string std_err_method = "wls";
};

struct PersistenceEstimate {
    std::vector<HorizonRecord> records;
    ExponentFit exponent;
};

// =============================================================================
// Survival counting
// =============================================================================

/// Index of the first grid point k >= 1 at which the path leaves the allowed
/// region, or path.size() if it never does. SelfSimilar: x >= level exits.
/// Dual: x > level exits.
std::size_t first_exit(std::span<const double> path, double level, Side side, std::size_t stride = 1);

/// Number of grid steps covered by a horizon on mesh dt.
std::size_t horizon_steps(double horizon, double dt);

/// Fraction of paths staying in the allowed region at every grid point in (0, horizon].
/// Throws std::invalid_argument if horizon exceeds the grid.
HorizonRecord persist_prob(const sampler::PathBundle& bundle, double level, double horizon, Side side);

// =============================================================================
// Exponent estimation
// =============================================================================

/// Minimum survivors for a horizon to enter the regression.
inline constexpr std::size_t kMinSurvivors = 10;
/// The fit drops the smallest horizons until the reduced chi-square is at most this.
inline constexpr double kMaxReducedChi2 = 2.0;

/// Weighted least squares of log p_hat on log T (SelfSimilar) or S (Dual) with
/// inverse delta-method variances; theta_hat is minus the slope.
/// Throws std::invalid_argument with fewer than three usable horizons.
ExponentFit estimate_theta(const HorizonLadder& ladder, std::span<const HorizonRecord> records);

/// Same regression restricted to a given set of horizons (no window search).
ExponentFit fit_window(Side side, std::span<const HorizonRecord> records, std::span<const double> window);

// =============================================================================
// Bounds and reference values
// =============================================================================

struct BoundsRow {
    double hurst = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::string lower_clause;
    std::string upper_clause;
    double hypothesis = 0.0;
};

BoundsRow prop1_bounds(HurstIndex h);
double hypothesis_value(HurstIndex h);

enum class KnownProcess { FBM, IFBMHalf, IFBMBilateral };
/// Exact exponents: fBm on (0,T): 1-H; IFBM(1/2) on (0,T): 1/4; IFBM on (-T,T): 1-H.
double known_exponent(KnownProcess process, std::optional<HurstIndex> h = std::nullopt);

// =============================================================================
// Experiments
// =============================================================================

enum class ProcessFamily { IFBM, FBM };

struct ExperimentConfig {
    ProcessFamily family = ProcessFamily::IFBM;
    Side side = Side::Dual;
    HorizonLadder ladder;
    double dt = 0.02;              ///< fine mesh; the coarse mesh is 2 dt on the same paths
    std::size_t batch = 100'000;
    sampler::SeedSpec seed;
    std::optional<double> level;   ///< default: 1 (SelfSimilar) or 0 (Dual)
    sampler::EigenPolicy policy = sampler::EigenPolicy::Clip;
    std::size_t jackknife_groups = 20;
    double known_tolerance = 0.04;  ///< |theta_hat - exact| allowed by the known-exponent verdict

    [[nodiscard]] double effective_level() const { return level.value_or(side == Side::Dual ? 0.0 : 1.0); }
    void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct Verdicts {
    // v1: theta within the bound band widened by two standard errors (IFBM only)
    std::optional<BoundsRow> bounds;
    std::optional<bool> v1_in_band;
    // v2: distance to H(1-H), reported only (IFBM only)
    std::optional<double> v2_distance;
    std::optional<double> v2_sigmas;
    // v3: distance to a known exact exponent
    std::optional<double> v3_exact;
    std::optional<double> v3_distance;
    std::optional<bool> v3_pass;
};

struct ExperimentResult {
    double hurst = 0.0;
    ExperimentConfig config;
    PersistenceEstimate estimate;         ///< fine mesh, jackknife standard error
    PersistenceEstimate coarse_estimate;  ///< mesh 2 dt, same paths
    double wls_std_err = 0.0;
    /// 2 theta(dt) - theta(2 dt), a first-order extrapolation reported as a sensitivity only.
    double richardson_theta = 0.0;
    sampler::EmbeddingReport embedding;
    Verdicts verdicts;
};

ExperimentResult experiment(HurstIndex h, const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentResult& result);

}  // namespace ifbm::persistence
