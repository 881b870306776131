#include "ifbm/sampler.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <fmt/format.h>

#include "ifbm/parallel.hpp"
#include "ifbm/rng.hpp"

namespace ifbm::sampler {

namespace {

// FFTW planning is not thread-safe; execution on distinct arrays is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

ComplexBuffer alloc_complex(std::size_t m) {
    auto* p = fftw_alloc_complex(m);
    if (!p) throw std::bad_alloc();
    return ComplexBuffer(p);
}

class FftPlan {
public:
    explicit FftPlan(std::size_t m) {
        auto in = alloc_complex(m), out = alloc_complex(m);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(m), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan_) throw std::runtime_error("FFTW planning failed");
    }
    ~FftPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void execute(fftw_complex* in, fftw_complex* out) const { fftw_execute_dft(plan_, in, out); }

private:
    fftw_plan plan_ = nullptr;
};

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

}  // namespace

// =============================================================================
// Descriptors
// =============================================================================

void SampleGrid::validate() const {
    if (n < 2) throw std::invalid_argument("sample grid needs at least 2 points");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sample grid spacing must be positive");
}

std::string ProcessDescriptor::name() const {
    switch (kind) {
        case ProcessKind::FGN: return "fgn";
        case ProcessKind::FBM: return "fbm";
        case ProcessKind::IFBM: return "ifbm";
        case ProcessKind::Stationary: return "stationary:" + std::string(kernel->name());
    }
    return "unknown";
}

Method ProcessDescriptor::method() const noexcept {
    switch (kind) {
        case ProcessKind::FBM: return Method::CumulativeSum;
        case ProcessKind::IFBM: return Method::Trapezoid;
        default: return Method::CirculantEmbedding;
    }
}

std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::CirculantEmbedding: return "circulant-embedding";
        case Method::CumulativeSum: return "cumulative-sum";
        case Method::Trapezoid: return "trapezoid";
    }
    return "unknown";
}

double fgn_autocovariance(HurstIndex h, double dt, std::size_t k) {
    const double e = 2.0 * h.value();
    const double kk = static_cast<double>(k);
    const double lower = k == 0 ? 1.0 : std::pow(kk - 1.0, e);
    return 0.5 * std::pow(dt, e) * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + lower);
}

// =============================================================================
// Circulant embedding
// =============================================================================

std::vector<double> circulant_eigenvalues(const std::function<double(std::size_t)>& acov, std::size_t m) {
    if (m < 2 || (m & (m - 1)) != 0) throw std::invalid_argument("circulant size must be a power of two >= 2");
    auto in = alloc_complex(m), out = alloc_complex(m);
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k <= half; ++k) {
        const double c = acov(k);
        in[k][0] = c;
        in[k][1] = 0.0;
        if (k != 0 && k != half) {
            in[m - k][0] = c;
            in[m - k][1] = 0.0;
        }
    }
    const FftPlan plan(m);
    plan.execute(in.get(), out.get());
    std::vector<double> lambda(m);
    for (std::size_t k = 0; k < m; ++k) lambda[k] = out[k][0];
    return lambda;
}

Embedding embed(const std::function<double(std::size_t)>& acov, std::size_t n, const EmbeddingOptions& options) {
    const std::size_t m0 = next_pow2(std::max<std::size_t>(2, 2 * (n > 0 ? n - 1 : 0)));
    Embedding result;
    std::vector<double> lambda;
    double tol = 0.0;
    for (int doublings = 0;; ++doublings) {
        const std::size_t m = m0 << doublings;
        lambda = circulant_eigenvalues(acov, m);
        const auto [lo, hi] = std::minmax_element(lambda.begin(), lambda.end());
        result.report.size = m;
        result.report.min_eigenvalue = *lo;
        result.report.max_eigenvalue = *hi;
        result.report.pad_doublings = doublings;
        tol = options.relative_eig_tol * *hi;
        const bool hard_negative = *lo < -tol;
        const bool wants_pad = options.policy == EigenPolicy::Pad && *lo < 0.0;
        if (!(hard_negative || wants_pad)) break;
        if (doublings >= options.pad_max) {
            if (hard_negative)
                throw std::runtime_error(fmt::format(
                    "circulant embedding has eigenvalue {:.3e} below -{:.3e} after {} doublings (m = {})", *lo, tol,
                    doublings, m));
            break;
        }
    }
    if (result.report.pad_doublings > 0) result.report.action = "pad";

    const std::vector<double> original = lambda;
    double total = 0.0, kept = 0.0;
    for (double& l : lambda) {
        total += l;
        if (l < 0.0) {
            ++result.report.clipped;
            l = 0.0;
        }
        kept += l;
    }
    const std::size_t m = lambda.size();
    if (result.report.clipped > 0) {
        // Clip and rescale so the trace (m times the variance) is preserved.
        const double scale = total / kept;
        double moved = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            lambda[k] *= scale;
            moved += std::abs(lambda[k] - original[k]);
        }
        result.report.covariance_perturbation = moved / static_cast<double>(m);
        result.report.action = result.report.pad_doublings > 0 ? "pad+clip" : "clip";
    }
    result.sqrt_scaled.resize(m);
    for (std::size_t k = 0; k < m; ++k) result.sqrt_scaled[k] = std::sqrt(lambda[k] / static_cast<double>(m));
    return result;
}

// =============================================================================
// PathGenerator
// =============================================================================

struct PathGenerator::Impl {
    Embedding embedding;
    std::size_t noise_points = 0;
    std::unique_ptr<FftPlan> plan;
};

PathGenerator::PathGenerator(ProcessDescriptor process, SampleGrid grid, EmbeddingOptions options)
    : process_(std::move(process)), grid_(grid), impl_(std::make_unique<Impl>()) {
    grid_.validate();
    std::function<double(std::size_t)> acov;
    switch (process_.kind) {
        case ProcessKind::FGN:
        case ProcessKind::FBM:
        case ProcessKind::IFBM: {
            if (!process_.hurst) throw std::invalid_argument("process requires a Hurst index");
            const HurstIndex h = *process_.hurst;
            const double dt = grid_.dt;
            acov = [h, dt](std::size_t k) { return fgn_autocovariance(h, dt, k); };
            impl_->noise_points = process_.kind == ProcessKind::FGN ? grid_.n : grid_.n - 1;
            break;
        }
        case ProcessKind::Stationary: {
            if (!process_.kernel) throw std::invalid_argument("stationary process requires a kernel");
            const KernelId kernel = *process_.kernel;
            const double dt = grid_.dt;
            acov = [kernel, dt](std::size_t k) { return kernels::evaluate(kernel, static_cast<double>(k) * dt); };
            impl_->noise_points = grid_.n;
            break;
        }
    }
    impl_->embedding = embed(acov, impl_->noise_points, options);
    impl_->plan = std::make_unique<FftPlan>(impl_->embedding.report.size);
}

PathGenerator::~PathGenerator() = default;
PathGenerator::PathGenerator(PathGenerator&&) noexcept = default;
PathGenerator& PathGenerator::operator=(PathGenerator&&) noexcept = default;

const EmbeddingReport& PathGenerator::embedding() const noexcept { return impl_->embedding.report; }

void PathGenerator::generate_chunk(const SeedSpec& seed, std::uint64_t chunk, std::span<double> out,
                                   std::size_t count) const {
    const std::size_t n = grid_.n;
    if (count > kChunkPaths || out.size() < count * n) throw std::invalid_argument("chunk output buffer too small");
    const auto& sq = impl_->embedding.sqrt_scaled;
    const std::size_t m = sq.size();
    const std::size_t np = impl_->noise_points;
    auto in = alloc_complex(m), spec = alloc_complex(m);
    std::vector<double> noise(2 * np);
    GaussianStream gauss(derive_seed(seed.master_seed, seed.stream_index, chunk));

    const double dt = grid_.dt;
    auto emit = [&](std::size_t row, const double* z) {
        double* dst = out.data() + row * n;
        switch (process_.kind) {
            case ProcessKind::FGN:
            case ProcessKind::Stationary: std::copy(z, z + n, dst); break;
            case ProcessKind::FBM:
            case ProcessKind::IFBM: {
                dst[0] = 0.0;
                for (std::size_t k = 1; k < n; ++k) dst[k] = dst[k - 1] + z[k - 1];
                if (process_.kind == ProcessKind::IFBM) {
                    double integral = 0.0, prev = 0.0;
                    for (std::size_t k = 1; k < n; ++k) {
                        const double w = dst[k];
                        integral += 0.5 * dt * (prev + w);
                        prev = w;
                        dst[k] = integral;
                    }
                }
                break;
            }
        }
    };

    for (std::size_t p = 0; p < count; p += 2) {
        for (std::size_t k = 0; k < m; ++k) {
            const double re = gauss();
            const double im = gauss();
            in[k][0] = sq[k] * re;
            in[k][1] = sq[k] * im;
        }
        impl_->plan->execute(in.get(), spec.get());
        for (std::size_t k = 0; k < np; ++k) {
            noise[k] = spec[k][0];
            noise[np + k] = spec[k][1];
        }
        emit(p, noise.data());
        if (p + 1 < count) emit(p + 1, noise.data() + np);
    }
}

void PathGenerator::for_each_chunk(
    const SeedSpec& seed, std::size_t batch,
    const std::function<void(std::size_t, std::size_t, std::span<const double>)>& consume) const {
    const std::size_t chunks = (batch + kChunkPaths - 1) / kChunkPaths;
    const std::size_t n = grid_.n;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t first = c * kChunkPaths;
        const std::size_t count = std::min(kChunkPaths, batch - first);
        std::vector<double> rows(count * n);
        generate_chunk(seed, c, rows, count);
        consume(first, count, rows);
    });
}

// =============================================================================
// Bundles
// =============================================================================

PathBundle sample(const ProcessDescriptor& process, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed,
                  const EmbeddingOptions& options) {
    const PathGenerator gen(process, grid, options);
    PathBundle bundle;
    bundle.grid = grid;
    bundle.batch = batch;
    bundle.process = process;
    bundle.seed = seed;
    bundle.method = process.method();
    bundle.embedding = gen.embedding();
    bundle.paths.resize(batch * grid.n);
    gen.for_each_chunk(seed, batch, [&](std::size_t first, std::size_t, std::span<const double> rows) {
        std::copy(rows.begin(), rows.end(), bundle.paths.begin() + static_cast<std::ptrdiff_t>(first * grid.n));
    });
    return bundle;
}

PathBundle sample_fgn(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed) {
    return sample(ProcessDescriptor::fgn(h), grid, batch, seed);
}

PathBundle sample_fbm(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed) {
    return sample(ProcessDescriptor::fbm(h), grid, batch, seed);
}

PathBundle sample_ifbm(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed) {
    return sample(ProcessDescriptor::ifbm(h), grid, batch, seed);
}

PathBundle sample_stationary(const KernelId& kernel, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed,
                             EigenPolicy policy) {
    EmbeddingOptions options;
    options.policy = policy;
    return sample(ProcessDescriptor::stationary(kernel), grid, batch, seed, options);
}

nlohmann::json bundle_header(const PathBundle& bundle) {
    nlohmann::json j;
    j["process"] = bundle.process.name();
    j["H"] = bundle.process.hurst ? nlohmann::json(bundle.process.hurst->value()) : nlohmann::json(nullptr);
    j["n"] = bundle.grid.n;
    j["dt"] = bundle.grid.dt;
    j["batch"] = bundle.batch;
    j["master_seed"] = bundle.seed.master_seed;
    j["stream_index"] = bundle.seed.stream_index;
    j["method"] = std::string(method_name(bundle.method));
    j["layout"] = "column-major float64, rows = paths, columns = grid points";
    j["embedding"] = {{"size", bundle.embedding.size},
                      {"min_eigenvalue", bundle.embedding.min_eigenvalue},
                      {"max_eigenvalue", bundle.embedding.max_eigenvalue},
                      {"pad_doublings", bundle.embedding.pad_doublings},
                      {"clipped", bundle.embedding.clipped},
                      {"covariance_perturbation", bundle.embedding.covariance_perturbation},
                      {"action", bundle.embedding.action}};
    return j;
}

void write_bundle_binary(const PathBundle& bundle, const std::filesystem::path& stem) {
    auto bin_path = stem;
    bin_path += ".bin";
    auto json_path = stem;
    json_path += ".json";
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw std::runtime_error("cannot open " + bin_path.string());
    std::vector<double> column(bundle.batch);
    for (std::size_t k = 0; k < bundle.grid.n; ++k) {
        for (std::size_t b = 0; b < bundle.batch; ++b) column[b] = bundle.at(b, k);
        bin.write(reinterpret_cast<const char*>(column.data()),
                  static_cast<std::streamsize>(column.size() * sizeof(double)));
    }
    std::ofstream header(json_path);
    if (!header) throw std::runtime_error("cannot open " + json_path.string());
    header << bundle_header(bundle).dump(2) << '\n';
}

void write_bundle_csv(const PathBundle& bundle, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot open " + file.string());
    out << "t";
    for (std::size_t b = 0; b < bundle.batch; ++b) out << ",path_" << b;
    out << '\n';
    for (std::size_t k = 0; k < bundle.grid.n; ++k) {
        out << fmt::format("{:.17g}", static_cast<double>(k) * bundle.grid.dt);
        for (std::size_t b = 0; b < bundle.batch; ++b) out << fmt::format(",{:.17g}", bundle.at(b, k));
        out << '\n';
    }
}

}  // namespace ifbm::sampler
