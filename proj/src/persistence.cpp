#include "ifbm/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace ifbm::persistence {

std::string_view side_name(Side side) noexcept { return side == Side::Dual ? "dual" : "self-similar"; }

void HorizonLadder::validate() const {
    if (horizons.size() < 3) throw std::invalid_argument("horizon ladder needs at least 3 horizons");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (!(horizons[i] > 0.0) || !std::isfinite(horizons[i]))
            throw std::invalid_argument("horizons must be positive and finite");
        if (i > 0 && !(horizons[i] > horizons[i - 1]))
            throw std::invalid_argument("horizons must be strictly increasing");
    }
}

// =============================================================================
// Binomial summaries
// =============================================================================

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials) {
    if (trials == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

HorizonRecord make_record(double horizon, std::size_t n_survive, std::size_t n_trials) {
    HorizonRecord r;
    r.horizon = horizon;
    r.n_trials = n_trials;
    r.n_survive = n_survive;
    r.p_hat = n_trials == 0 ? 0.0 : static_cast<double>(n_survive) / static_cast<double>(n_trials);
    const auto ci = wilson_interval(n_survive, n_trials);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    return r;
}

// =============================================================================
// Survival counting
// =============================================================================

std::size_t first_exit(std::span<const double> path, double level, Side side, std::size_t stride) {
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    for (std::size_t k = stride; k < path.size(); k += stride) {
        const double v = path[k];
        if (side == Side::SelfSimilar ? v >= level : v > level) return k;
    }
    return path.size();
}

std::size_t horizon_steps(double horizon, double dt) {
    return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

HorizonRecord persist_prob(const sampler::PathBundle& bundle, double level, double horizon, Side side) {
    if (std::isnan(level)) throw std::invalid_argument("level must not be NaN");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const std::size_t steps = horizon_steps(horizon, bundle.grid.dt);
    if (steps + 1 > bundle.grid.n || horizon > bundle.grid.extent() * (1.0 + 1e-12))
        throw std::invalid_argument("horizon exceeds the sampled grid");
    std::size_t survive = 0;
    for (std::size_t b = 0; b < bundle.batch; ++b) {
        const auto path = bundle.path(b).first(steps + 1);
        if (first_exit(path, level, side) > steps) ++survive;
    }
    return make_record(horizon, survive, bundle.batch);
}

// =============================================================================
// Regression
// =============================================================================

namespace {

bool usable(const HorizonRecord& r) { return r.n_survive >= kMinSurvivors && r.n_survive < r.n_trials; }

double regressor(Side side, double horizon) { return side == Side::Dual ? horizon : std::log(horizon); }

}  // namespace

ExponentFit fit_window(Side side, std::span<const HorizonRecord> records, std::span<const double> window) {
    std::vector<const HorizonRecord*> rows;
    for (double h : window) {
        auto it = std::find_if(records.begin(), records.end(), [h](const HorizonRecord& r) { return r.horizon == h; });
        if (it == records.end()) throw std::invalid_argument("fit window horizon missing from records");
        if (!usable(*it)) throw std::invalid_argument("fit window horizon has too few survivors");
        rows.push_back(&*it);
    }
    if (rows.size() < 3) throw std::invalid_argument("exponent fit needs at least 3 usable horizons");

    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::vector<double> xs, ys, ws;
    for (const auto* r : rows) {
        const double var = (1.0 - r->p_hat) / static_cast<double>(r->n_survive);
        const double w = 1.0 / var;
        const double x = regressor(side, r->horizon), y = std::log(r->p_hat);
        xs.push_back(x);
        ys.push_back(y);
        ws.push_back(w);
        sw += w;
        sx += w * x;
        sy += w * y;
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xm) * (xs[i] - xm);
        sxy += ws[i] * (xs[i] - xm) * (ys[i] - ym);
    }
    const double slope = sxy / sxx;
    const double intercept = ym - slope * xm;
    double chi2 = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - intercept - slope * xs[i];
        chi2 += ws[i] * r * r;
    }
    ExponentFit fit;
    fit.theta_hat = -slope;
    fit.std_err = std::sqrt(1.0 / sxx);
    fit.intercept = intercept;
    fit.chi2_reduced = chi2 / static_cast<double>(xs.size() - 2);
    fit.fit_window.assign(window.begin(), window.end());
    return fit;
}

ExponentFit estimate_theta(const HorizonLadder& ladder, std::span<const HorizonRecord> records) {
    ladder.validate();
    if (records.size() != ladder.horizons.size()) throw std::invalid_argument("one record per ladder horizon expected");
    std::vector<double> candidates;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].horizon != ladder.horizons[i]) throw std::invalid_argument("records do not match the ladder");
        if (usable(records[i])) candidates.push_back(records[i].horizon);
    }
    if (candidates.size() < 3)
        throw std::invalid_argument("fewer than 3 horizons with at least " + std::to_string(kMinSurvivors) +
                                    " survivors");
    for (std::size_t start = 0;; ++start) {
        const std::span<const double> window(candidates.data() + start, candidates.size() - start);
        ExponentFit fit = fit_window(ladder.side, records, window);
        if (fit.chi2_reduced <= kMaxReducedChi2 || window.size() == 3) return fit;
    }
}

// =============================================================================
// Bounds
// =============================================================================

BoundsRow prop1_bounds(HurstIndex h) {
    const double H = h.value();
    BoundsRow row;
    row.hurst = H;
    const double m = std::min(H, 1.0 - H);
    row.lower = 0.5 * m;
    row.lower_clause = "half-min";
    row.hypothesis = hypothesis_value(h);

    // Candidates in tie-break order.
    struct Candidate {
        bool applies;
        double value;
        const char* clause;
    };
    const Candidate candidates[] = {
        {H >= 0.5, 0.25, "quarter"},
        {H >= 0.25 && H <= 0.5, std::sqrt((1.0 - H * H) / 12.0), "rescaled-half"},
        {true, m, "min"},
    };
    row.upper = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (c.applies && c.value < row.upper) {
            row.upper = c.value;
            row.upper_clause = c.clause;
        }
    }
    return row;
}

double hypothesis_value(HurstIndex h) { return h.value() * (1.0 - h.value()); }

double known_exponent(KnownProcess process, std::optional<HurstIndex> h) {
    switch (process) {
        case KnownProcess::IFBMHalf: return 0.25;
        case KnownProcess::FBM:
        case KnownProcess::IFBMBilateral:
            if (!h) throw std::invalid_argument("known exponent requires a Hurst index");
            return 1.0 - h->value();
    }
    throw std::logic_error("unhandled process");
}

// =============================================================================
// Experiments
// =============================================================================

void ExperimentConfig::validate() const {
    ladder.validate();
    if (ladder.side != side) throw std::invalid_argument("ladder side does not match the experiment side");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("mesh dt must be positive");
    if (batch < 2) throw std::invalid_argument("batch must be at least 2");
    if (jackknife_groups < 2 || jackknife_groups > batch)
        throw std::invalid_argument("jackknife groups must be in [2, batch]");
    if (level && std::isnan(*level)) throw std::invalid_argument("level must not be NaN");
    if (horizon_steps(ladder.horizons.front(), 2.0 * dt) < 1)
        throw std::invalid_argument("smallest horizon is below the coarse mesh 2 dt");
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["process"] = c.family == ProcessFamily::IFBM ? "ifbm" : "fbm";
    j["side"] = std::string(side_name(c.side));
    j["ladder"] = c.ladder.horizons;
    j["dt"] = c.dt;
    j["batch"] = c.batch;
    j["master_seed"] = c.seed.master_seed;
    j["stream_index"] = c.seed.stream_index;
    j["level"] = c.level ? nlohmann::json(*c.level) : nlohmann::json(nullptr);
    j["eigen_policy"] = c.policy == sampler::EigenPolicy::Clip ? "clip" : "pad";
    j["jackknife_groups"] = c.jackknife_groups;
    j["known_tolerance"] = c.known_tolerance;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    const auto process = j.at("process").get<std::string>();
    if (process != "ifbm" && process != "fbm") throw std::invalid_argument("unknown process '" + process + "'");
    c.family = process == "ifbm" ? ProcessFamily::IFBM : ProcessFamily::FBM;
    const auto side = j.at("side").get<std::string>();
    if (side != "dual" && side != "self-similar") throw std::invalid_argument("unknown side '" + side + "'");
    c.side = side == "dual" ? Side::Dual : Side::SelfSimilar;
    c.ladder.horizons = j.at("ladder").get<std::vector<double>>();
    c.ladder.side = c.side;
    c.dt = j.at("dt").get<double>();
    c.batch = j.at("batch").get<std::size_t>();
    c.seed.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.seed.stream_index = j.at("stream_index").get<std::uint64_t>();
    if (!j.at("level").is_null()) c.level = j.at("level").get<double>();
    c.policy = j.at("eigen_policy").get<std::string>() == "pad" ? sampler::EigenPolicy::Pad : sampler::EigenPolicy::Clip;
    c.jackknife_groups = j.at("jackknife_groups").get<std::size_t>();
    c.known_tolerance = j.at("known_tolerance").get<double>();
    return c;
}

namespace {

sampler::ProcessDescriptor experiment_process(HurstIndex h, const ExperimentConfig& c) {
    using sampler::ProcessDescriptor;
    if (c.side == Side::Dual)
        return ProcessDescriptor::stationary(c.family == ProcessFamily::IFBM ? kernels::KernelId::dual_ifbm(h)
                                                                             : kernels::KernelId::dual_fbm(h));
    return c.family == ProcessFamily::IFBM ? ProcessDescriptor::ifbm(h) : ProcessDescriptor::fbm(h);
}

// Survival counts per horizon for exit indices restricted to paths [lo, hi).
std::vector<std::size_t> survivors(const std::vector<std::uint32_t>& exits, const std::vector<std::size_t>& steps,
                                   std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> counts(steps.size(), 0);
    for (std::size_t b = lo; b < hi; ++b)
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (exits[b] > steps[i]) ++counts[i];
    return counts;
}

struct MeshEstimate {
    PersistenceEstimate estimate;
    double wls_std_err = 0.0;
};

MeshEstimate estimate_mesh(const ExperimentConfig& c, const std::vector<std::uint32_t>& exits,
                           const std::vector<std::size_t>& steps) {
    const std::size_t batch = exits.size();
    const auto totals = survivors(exits, steps, 0, batch);
    MeshEstimate out;
    for (std::size_t i = 0; i < steps.size(); ++i)
        out.estimate.records.push_back(make_record(c.ladder.horizons[i], totals[i], batch));
    out.estimate.exponent = estimate_theta(c.ladder, out.estimate.records);
    out.wls_std_err = out.estimate.exponent.std_err;

    // Delete-one-group jackknife over contiguous path groups; the nested
    // horizons share paths, so per-horizon variances alone understate the error.
    const std::size_t groups = c.jackknife_groups;
    std::vector<double> thetas;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t lo = g * batch / groups, hi = (g + 1) * batch / groups;
        const auto left_out = survivors(exits, steps, lo, hi);
        std::vector<HorizonRecord> records;
        for (std::size_t i = 0; i < steps.size(); ++i)
            records.push_back(make_record(c.ladder.horizons[i], totals[i] - left_out[i], batch - (hi - lo)));
        try {
            thetas.push_back(fit_window(c.side, records, out.estimate.exponent.fit_window).theta_hat);
        } catch (const std::invalid_argument&) {
            // A replicate lost a horizon below the survivor cutoff; the
            // remaining replicates still give a (conservative) estimate.
        }
    }
    if (thetas.size() >= 2) {
        double mean = 0.0;
        for (double t : thetas) mean += t;
        mean /= static_cast<double>(thetas.size());
        double ss = 0.0;
        for (double t : thetas) ss += (t - mean) * (t - mean);
        const double k = static_cast<double>(thetas.size());
        out.estimate.exponent.std_err = std::sqrt((k - 1.0) / k * ss);
        out.estimate.exponent.std_err_method = "jackknife";
    }
    return out;
}

}  // namespace

ExperimentResult experiment(HurstIndex h, const ExperimentConfig& config) {
    config.validate();
    const double level = config.effective_level();
    const std::size_t max_steps = horizon_steps(config.ladder.horizons.back(), config.dt);
    const sampler::SampleGrid grid{max_steps + 1, config.dt};

    sampler::EmbeddingOptions options;
    options.policy = config.policy;
    const sampler::PathGenerator generator(experiment_process(h, config), grid, options);

    std::vector<std::uint32_t> fine(config.batch), coarse(config.batch);
    generator.for_each_chunk(config.seed, config.batch,
                             [&](std::size_t first, std::size_t count, std::span<const double> rows) {
                                 for (std::size_t p = 0; p < count; ++p) {
                                     const auto path = rows.subspan(p * grid.n, grid.n);
                                     fine[first + p] =
                                         static_cast<std::uint32_t>(first_exit(path, level, config.side, 1));
                                     coarse[first + p] =
                                         static_cast<std::uint32_t>(first_exit(path, level, config.side, 2));
                                 }
                             });

    std::vector<std::size_t> steps;
    for (double hz : config.ladder.horizons) steps.push_back(horizon_steps(hz, config.dt));

    ExperimentResult result;
    result.hurst = h.value();
    result.config = config;
    result.embedding = generator.embedding();
    auto fine_est = estimate_mesh(config, fine, steps);
    result.estimate = std::move(fine_est.estimate);
    result.wls_std_err = fine_est.wls_std_err;
    result.coarse_estimate = estimate_mesh(config, coarse, steps).estimate;
    result.richardson_theta = 2.0 * result.estimate.exponent.theta_hat - result.coarse_estimate.exponent.theta_hat;

    const double theta = result.estimate.exponent.theta_hat;
    const double se = result.estimate.exponent.std_err;
    Verdicts& v = result.verdicts;
    if (config.family == ProcessFamily::IFBM) {
        v.bounds = prop1_bounds(h);
        v.v1_in_band = theta >= v.bounds->lower - 2.0 * se && theta <= v.bounds->upper + 2.0 * se;
        v.v2_distance = theta - hypothesis_value(h);
        v.v2_sigmas = se > 0.0 ? *v.v2_distance / se : std::numeric_limits<double>::infinity();
        if (h.value() == 0.5) v.v3_exact = known_exponent(KnownProcess::IFBMHalf);
    } else {
        v.v3_exact = known_exponent(KnownProcess::FBM, h);
    }
    if (v.v3_exact) {
        v.v3_distance = theta - *v.v3_exact;
        v.v3_pass = std::abs(*v.v3_distance) <= config.known_tolerance;
    }
    return result;
}

namespace {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json fit_json(const ExponentFit& f) {
    return {{"theta_hat", f.theta_hat},       {"std_err", f.std_err},          {"std_err_method", f.std_err_method},
            {"fit_window", f.fit_window},     {"chi2_reduced", f.chi2_reduced}, {"intercept", f.intercept}};
}

}  // namespace

nlohmann::json to_json(const ExperimentResult& r) {
    nlohmann::json j = fit_json(r.estimate.exponent);
    j["hurst"] = r.hurst;
    j["wls_std_err"] = r.wls_std_err;
    j["coarse_mesh"] = fit_json(r.coarse_estimate.exponent);
    j["coarse_mesh"]["dt"] = 2.0 * r.config.dt;
    j["richardson_theta"] = r.richardson_theta;
    j["embedding"] = {{"size", r.embedding.size},
                      {"min_eigenvalue", r.embedding.min_eigenvalue},
                      {"pad_doublings", r.embedding.pad_doublings},
                      {"clipped", r.embedding.clipped},
                      {"covariance_perturbation", r.embedding.covariance_perturbation},
                      {"action", r.embedding.action}};
    nlohmann::json v;
    const auto& vd = r.verdicts;
    if (vd.bounds)
        v["bounds"] = {{"lower", vd.bounds->lower},
                       {"upper", vd.bounds->upper},
                       {"lower_clause", vd.bounds->lower_clause},
                       {"upper_clause", vd.bounds->upper_clause},
                       {"hypothesis", vd.bounds->hypothesis}};
    v["v1_in_band"] = optional_json(vd.v1_in_band);
    v["v2_distance_to_hypothesis"] = optional_json(vd.v2_distance);
    v["v2_sigmas"] = optional_json(vd.v2_sigmas);
    v["v3_exact"] = optional_json(vd.v3_exact);
    v["v3_distance"] = optional_json(vd.v3_distance);
    v["v3_pass"] = optional_json(vd.v3_pass);
    j["verdicts"] = v;
    return j;
}

}  // namespace ifbm::persistence
