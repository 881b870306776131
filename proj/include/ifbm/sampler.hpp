// Exact Gaussian path sampling by circulant embedding.
//
// Every generator produces paths in fixed-size chunks; chunk c of a run seeded
// with (master, stream) always uses the derived stream (master, stream, c), so
// results are independent of the thread count and of which paths are kept.
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ifbm/kernels.hpp"

namespace ifbm::sampler {

using kernels::HurstIndex;
using kernels::KernelId;

/// Paths per chunk; even so that both halves of each complex draw are used.
inline constexpr std::size_t kChunkPaths = 64;

struct SampleGrid {
    std::size_t n = 2;  ///< number of grid points k*dt, k = 0..n-1
    double dt = 1.0;

    [[nodiscard]] double extent() const noexcept { return static_cast<double>(n - 1) * dt; }
    void validate() const;
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

enum class ProcessKind { FGN, FBM, IFBM, Stationary };
enum class Method { CirculantEmbedding, CumulativeSum, Trapezoid };
enum class EigenPolicy { Clip, Pad };

struct ProcessDescriptor {
    ProcessKind kind = ProcessKind::FGN;
    std::optional<HurstIndex> hurst;
    std::optional<KernelId> kernel;

    static ProcessDescriptor fgn(HurstIndex h) { return {ProcessKind::FGN, h, std::nullopt}; }
    static ProcessDescriptor fbm(HurstIndex h) { return {ProcessKind::FBM, h, std::nullopt}; }
    static ProcessDescriptor ifbm(HurstIndex h) { return {ProcessKind::IFBM, h, std::nullopt}; }
    static ProcessDescriptor stationary(const KernelId& k) { return {ProcessKind::Stationary, k.hurst(), k}; }

    /// "fgn", "fbm", "ifbm" or "stationary:<kernel>"
    [[nodiscard]] std::string name() const;
    [[nodiscard]] Method method() const noexcept;
};

std::string_view method_name(Method m) noexcept;

struct EmbeddingOptions {
    EigenPolicy policy = EigenPolicy::Clip;
    double relative_eig_tol = 1e-9;  ///< eig_tol = relative_eig_tol * max eigenvalue
    int pad_max = 4;
};

/// What happened while diagonalizing the circulant embedding.
struct EmbeddingReport {
    std::size_t size = 0;  ///< circulant dimension m
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    int pad_doublings = 0;
    std::size_t clipped = 0;
    /// Bound on the entrywise covariance change caused by clipping
    /// (sum of |eigenvalue changes| / m); 0 when nothing was clipped.
    double covariance_perturbation = 0.0;
    std::string action = "none";
};

/// Eigenvalues of the minimal power-of-two circulant embedding of the
/// Toeplitz matrix with first row acov(0..n-1), padded as the policy demands.
/// Throws std::runtime_error if eigenvalues below -eig_tol survive padding.
struct Embedding {
    std::vector<double> sqrt_scaled;  ///< sqrt(lambda_k / m)
    EmbeddingReport report;
};
Embedding embed(const std::function<double(std::size_t)>& acov, std::size_t n, const EmbeddingOptions& options);

/// Raw circulant eigenvalues for first row built from acov(0..m/2); used by the
/// nonnegativity tests.
std::vector<double> circulant_eigenvalues(const std::function<double(std::size_t)>& acov, std::size_t m);

/// fGn autocovariance dt^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocovariance(HurstIndex h, double dt, std::size_t k);

// =============================================================================
// Generator
// =============================================================================

class PathGenerator {
public:
    PathGenerator(ProcessDescriptor process, SampleGrid grid, EmbeddingOptions options = {});
    ~PathGenerator();
    PathGenerator(PathGenerator&&) noexcept;
    PathGenerator& operator=(PathGenerator&&) noexcept;

    [[nodiscard]] const ProcessDescriptor& process() const noexcept { return process_; }
    [[nodiscard]] const SampleGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] const EmbeddingReport& embedding() const noexcept;

    /// Fills `out` (count x n, row-major) with paths first..first+count-1 of
    /// chunk `chunk`; count <= kChunkPaths. Thread-safe.
    void generate_chunk(const SeedSpec& seed, std::uint64_t chunk, std::span<double> out, std::size_t count) const;

    /// Runs generate_chunk over all chunks covering `batch` paths in parallel and
    /// hands each chunk to consume(first_path, count, rows). consume is called
    /// concurrently for distinct chunks.
    void for_each_chunk(const SeedSpec& seed, std::size_t batch,
                        const std::function<void(std::size_t, std::size_t, std::span<const double>)>& consume) const;

private:
    struct Impl;
    ProcessDescriptor process_;
    SampleGrid grid_;
    std::unique_ptr<Impl> impl_;
};

// =============================================================================
// Bundles
// =============================================================================

struct PathBundle {
    SampleGrid grid;
    std::size_t batch = 0;
    std::vector<double> paths;  ///< batch x n, row-major
    ProcessDescriptor process;
    SeedSpec seed;
    Method method = Method::CirculantEmbedding;
    EmbeddingReport embedding;

    [[nodiscard]] std::span<const double> path(std::size_t b) const {
        return std::span<const double>(paths).subspan(b * grid.n, grid.n);
    }
    [[nodiscard]] double at(std::size_t b, std::size_t k) const { return paths[b * grid.n + k]; }
};

PathBundle sample(const ProcessDescriptor& process, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed,
                  const EmbeddingOptions& options = {});

PathBundle sample_fgn(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed);
PathBundle sample_fbm(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed);
PathBundle sample_ifbm(HurstIndex h, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed);
PathBundle sample_stationary(const KernelId& kernel, const SampleGrid& grid, std::size_t batch, const SeedSpec& seed,
                             EigenPolicy policy = EigenPolicy::Clip);

/// Header describing a bundle: {process, H, n, dt, batch, master_seed, stream_index, method, embedding}.
nlohmann::json bundle_header(const PathBundle& bundle);
/// Writes `<stem>.bin` (column-major float64, native byte order) and `<stem>.json`.
void write_bundle_binary(const PathBundle& bundle, const std::filesystem::path& stem);
/// One row per grid point: t, path_0, ..., path_{batch-1}.
void write_bundle_csv(const PathBundle& bundle, const std::filesystem::path& file);

}  // namespace ifbm::sampler
