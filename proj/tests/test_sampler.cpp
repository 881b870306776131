#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ifbm/kernels.hpp"
#include "ifbm/rng.hpp"
#include "ifbm/sampler.hpp"

using namespace ifbm;
using namespace ifbm::sampler;

namespace {

struct CovCheck {
    double worst_z = 0.0;  // max |empirical - theory| / standard error
};

// Compares E[X_i X_j] (zero mean known) against theory on the given indices;
// the standard error is estimated from the spread of the products.
template <class Theory>
CovCheck check_covariance(const PathBundle& b, const std::vector<std::size_t>& idx, Theory theory) {
    CovCheck out;
    const double n = static_cast<double>(b.batch);
    for (std::size_t p = 0; p < idx.size(); ++p)
        for (std::size_t q = p; q < idx.size(); ++q) {
            double s = 0.0, s2 = 0.0;
            for (std::size_t r = 0; r < b.batch; ++r) {
                const double v = b.at(r, idx[p]) * b.at(r, idx[q]);
                s += v;
                s2 += v * v;
            }
            const double mean = s / n;
            const double se = std::sqrt((s2 / n - mean * mean) / n);
            const double z = std::abs(mean - theory(idx[p], idx[q])) / se;
            out.worst_z = std::max(out.worst_z, z);
        }
    return out;
}

std::vector<std::size_t> sub_grid(std::size_t n) {
    std::vector<std::size_t> v;
    for (std::size_t i = 1; i <= 8; ++i) v.push_back(i * (n - 1) / 8);
    return v;
}

class ThreadEnv {
public:
    explicit ThreadEnv(const char* value) {
        if (const char* old = std::getenv("IFBM_LAB_THREADS")) saved_ = old;
        setenv("IFBM_LAB_THREADS", value, 1);
    }
    ~ThreadEnv() {
        if (saved_)
            setenv("IFBM_LAB_THREADS", saved_->c_str(), 1);
        else
            unsetenv("IFBM_LAB_THREADS");
    }

private:
    std::optional<std::string> saved_;
};

}  // namespace

TEST(Rng, DerivedSeedsDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t m = 0; m < 4; ++m)
        for (std::uint64_t s = 0; s < 4; ++s)
            for (std::uint64_t c = 0; c < 64; ++c) seen.insert(derive_seed(m, s, c));
    EXPECT_EQ(seen.size(), 4u * 4u * 64u);
}

TEST(Rng, StandardNormalMoments) {
    GaussianStream g(42);
    const int n = 400'000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = g();
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(Embedding, FgnAutocovariance) {
    EXPECT_DOUBLE_EQ(fgn_autocovariance(HurstIndex(0.5), 0.1, 0), 0.1);
    EXPECT_NEAR(fgn_autocovariance(HurstIndex(0.5), 0.1, 3), 0.0, 1e-17);
    EXPECT_GT(fgn_autocovariance(HurstIndex(0.8), 1.0, 2), 0.0);
    EXPECT_LT(fgn_autocovariance(HurstIndex(0.2), 1.0, 2), 0.0);
}

TEST(Embedding, FgnEigenvaluesNonnegative) {
    for (double H = 0.05; H < 1.0; H += 0.05) {
        const HurstIndex h(H);
        const auto lambda = circulant_eigenvalues([h](std::size_t k) { return fgn_autocovariance(h, 1.0, k); }, 1024);
        for (double l : lambda) EXPECT_GE(l, -1e-12) << H;
    }
}

TEST(Embedding, DualKernelsEmbedWithoutHardNegatives) {
    for (double H : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        for (const auto& k : {kernels::KernelId::dual_ifbm(HurstIndex(H)), kernels::KernelId::dual_fbm(HurstIndex(H))}) {
            const auto e = embed([&](std::size_t j) { return kernels::evaluate(k, 0.02 * j); }, 1001, {});
            // Slowly decaying kernels (H near 1) leave soft negatives of relative
            // size ~1e-10; clipping them moves covariances by well under the
            // ~1e-3 resolution of a 1e5-path batch.
            EXPECT_LE(e.report.covariance_perturbation, 1e-6) << k.name() << " " << H;
        }
    }
}

TEST(Embedding, HardNegativeThrows) {
    auto acov = [](std::size_t k) { return k == 0 ? 1.0 : (k == 1 ? 0.9 : 0.0); };
    EXPECT_THROW(embed(acov, 64, {}), std::runtime_error);
}

TEST(Embedding, ClipAndPadPolicies) {
    auto acov = [](std::size_t k) { return k == 0 ? 1.0 : (k == 1 ? 0.5 + 1e-12 : 0.0); };
    const auto clip = embed(acov, 64, {EigenPolicy::Clip, 1e-9, 4});
    EXPECT_GT(clip.report.clipped, 0u);
    EXPECT_GT(clip.report.covariance_perturbation, 0.0);
    EXPECT_LT(clip.report.covariance_perturbation, 1e-10);
    EXPECT_EQ(clip.report.action, "clip");
    EXPECT_EQ(clip.report.pad_doublings, 0);
    const auto pad = embed(acov, 64, {EigenPolicy::Pad, 1e-9, 2});
    EXPECT_EQ(pad.report.pad_doublings, 2);
    EXPECT_EQ(pad.report.action, "pad+clip");
    EXPECT_EQ(pad.report.size, 128u << 2);
}

TEST(Sampler, InvalidGrid) {
    EXPECT_THROW(sample_fgn(HurstIndex(0.5), {1, 0.1}, 4, {}), std::invalid_argument);
    EXPECT_THROW(sample_fgn(HurstIndex(0.5), {10, 0.0}, 4, {}), std::invalid_argument);
}

TEST(Sampler, ThreadCountDoesNotChangePaths) {
    const SampleGrid grid{129, 0.01};
    PathBundle one, four;
    {
        ThreadEnv env("1");
        one = sample_ifbm(HurstIndex(0.3), grid, 300, {7, 2});
    }
    {
        ThreadEnv env("4");
        four = sample_ifbm(HurstIndex(0.3), grid, 300, {7, 2});
    }
    EXPECT_EQ(one.paths, four.paths);
}

TEST(Sampler, PrefixStable) {
    const SampleGrid grid{65, 0.05};
    const auto big = sample_fbm(HurstIndex(0.6), grid, 200, {3, 0});
    const auto small = sample_fbm(HurstIndex(0.6), grid, 37, {3, 0});
    for (std::size_t i = 0; i < small.paths.size(); ++i) ASSERT_EQ(small.paths[i], big.paths[i]);
}

TEST(Sampler, StreamsDiffer) {
    const SampleGrid grid{33, 0.1};
    const auto a = sample_fgn(HurstIndex(0.6), grid, 10, {3, 0});
    const auto b = sample_fgn(HurstIndex(0.6), grid, 10, {3, 1});
    const auto c = sample_fgn(HurstIndex(0.6), grid, 10, {4, 0});
    EXPECT_NE(a.paths, b.paths);
    EXPECT_NE(a.paths, c.paths);
}

TEST(Sampler, PathsStartAtZero) {
    const SampleGrid grid{33, 0.1};
    const auto f = sample_fbm(HurstIndex(0.3), grid, 20, {});
    const auto i = sample_ifbm(HurstIndex(0.3), grid, 20, {});
    for (std::size_t b = 0; b < 20; ++b) {
        EXPECT_EQ(f.at(b, 0), 0.0);
        EXPECT_EQ(i.at(b, 0), 0.0);
    }
    EXPECT_EQ(f.method, Method::CumulativeSum);
    EXPECT_EQ(i.method, Method::Trapezoid);
}

TEST(Sampler, FgnCovariance) {
    const SampleGrid grid{257, 1.0 / 256};
    for (double H : {0.2, 0.75}) {
        const HurstIndex h(H);
        const auto b = sample_fgn(h, grid, 20'000, {11, 0});
        const auto c = check_covariance(b, sub_grid(grid.n), [&](std::size_t i, std::size_t j) {
            return fgn_autocovariance(h, grid.dt, i > j ? i - j : j - i);
        });
        EXPECT_LT(c.worst_z, 5.0) << H;
    }
}

TEST(Sampler, FbmCovariance) {
    const SampleGrid grid{257, 1.0 / 256};
    for (double H : {0.25, 0.8}) {
        const HurstIndex h(H);
        const auto b = sample_fbm(h, grid, 20'000, {12, 0});
        const auto c = check_covariance(b, sub_grid(grid.n), [&](std::size_t i, std::size_t j) {
            return kernels::fbm_covariance(h, i * grid.dt, j * grid.dt);
        });
        EXPECT_LT(c.worst_z, 5.0) << H;
    }
}

TEST(Sampler, IfbmCovariance) {
    const SampleGrid grid{257, 1.0 / 256};
    for (double H : {0.25, 0.5, 0.8}) {
        const HurstIndex h(H);
        const auto b = sample_ifbm(h, grid, 20'000, {13, 0});
        const auto c = check_covariance(b, sub_grid(grid.n), [&](std::size_t i, std::size_t j) {
            return kernels::ifbm_covariance(h, i * grid.dt, j * grid.dt);
        });
        EXPECT_LT(c.worst_z, 5.0) << H;
    }
}

TEST(Sampler, StationaryDualCovariance) {
    const SampleGrid grid{201, 0.05};
    for (double H : {0.3, 0.7}) {
        const auto k = kernels::KernelId::dual_ifbm(HurstIndex(H));
        const auto b = sample_stationary(k, grid, 20'000, {14, 0});
        const auto c = check_covariance(b, sub_grid(grid.n), [&](std::size_t i, std::size_t j) {
            return kernels::evaluate(k, (static_cast<double>(i) - static_cast<double>(j)) * grid.dt);
        });
        EXPECT_LT(c.worst_z, 5.0) << H;
    }
}

TEST(Sampler, IntegratedBrownianMoments) {
    const SampleGrid grid{257, 2.0 / 256};
    const auto b = sample_ifbm(HurstIndex(0.5), grid, 20'000, {15, 0});
    const auto c = check_covariance(b, {128, 256}, [&](std::size_t i, std::size_t j) {
        return kernels::ifbm_covariance(HurstIndex(0.5), i * grid.dt, j * grid.dt);
    });
    EXPECT_LT(c.worst_z, 5.0);
    EXPECT_NEAR(kernels::ifbm_covariance(HurstIndex(0.5), 1.0, 1.0), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(kernels::ifbm_covariance(HurstIndex(0.5), 1.0, 2.0), 5.0 / 6.0, 1e-15);
}

TEST(Export, BinaryRoundTripAndHeader) {
    const auto dir = std::filesystem::temp_directory_path() / "ifbm_sampler_test";
    std::filesystem::create_directories(dir);
    const SampleGrid grid{9, 0.25};
    const auto b = sample_fbm(HurstIndex(0.4), grid, 5, {1, 2});
    write_bundle_binary(b, dir / "bundle");
    std::ifstream bin(dir / "bundle.bin", std::ios::binary);
    std::vector<double> raw(grid.n * 5);
    bin.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(double)));
    ASSERT_TRUE(bin.good());
    for (std::size_t k = 0; k < grid.n; ++k)
        for (std::size_t p = 0; p < 5; ++p) EXPECT_EQ(raw[k * 5 + p], b.at(p, k));
    std::ifstream hdr(dir / "bundle.json");
    const auto j = nlohmann::json::parse(hdr);
    EXPECT_EQ(j["process"], "fbm");
    EXPECT_EQ(j["n"], 9);
    EXPECT_EQ(j["batch"], 5);
    EXPECT_EQ(j["master_seed"], 1);
    EXPECT_EQ(j["stream_index"], 2);
    EXPECT_EQ(j["method"], "cumulative-sum");
    std::filesystem::remove_all(dir);
}

TEST(Export, CsvShape) {
    const auto file = std::filesystem::temp_directory_path() / "ifbm_sampler_test.csv";
    const auto b = sample_fgn(HurstIndex(0.4), {6, 0.5}, 3, {});
    write_bundle_csv(b, file);
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,path_0,path_1,path_2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 6);
    std::filesystem::remove(file);
}
