#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "biruin/asymptotics.hpp"
#include "biruin/risk_process.hpp"
#include "biruin/ruin_detect.hpp"

namespace biruin {

/// Bernoulli proportion with a 95% Wilson score interval.
struct Estimate {
    double p_hat = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::uint64_t n = 0;
    std::uint64_t count = 0;

    double standard_error() const noexcept;
};

/// Throws std::invalid_argument if n == 0 or count > n.
Estimate wilson_estimate(std::uint64_t count, std::uint64_t n);

enum class RuinType { max, min, sum, and_, comp1, comp2 };
inline constexpr std::array<RuinType, 6> kRuinTypes = {RuinType::max, RuinType::min, RuinType::sum,
                                                       RuinType::and_, RuinType::comp1, RuinType::comp2};
std::string_view to_string(RuinType t) noexcept;

/// Ruin counts over a set of paths. Merging is plain integer addition, so
/// any merge order gives the same totals.
struct RuinCounts {
    std::uint64_t n = 0;
    std::array<std::uint64_t, 6> hits{};

    void add(const RuinOutcome& outcome) noexcept;
    std::uint64_t operator[](RuinType t) const noexcept { return hits[static_cast<std::size_t>(t)]; }
    RuinCounts& operator+=(const RuinCounts& other) noexcept;
    friend bool operator==(const RuinCounts&, const RuinCounts&) = default;
};

struct EstimateSet {
    RuinCounts counts;
    std::array<Estimate, 6> estimates{};

    const Estimate& operator[](RuinType t) const noexcept { return estimates[static_cast<std::size_t>(t)]; }
};

EstimateSet make_estimate_set(const RuinCounts& counts);

inline constexpr std::uint64_t kDefaultBatchSize = std::uint64_t{1} << 14;

/// Simulates one batch. Batch b draws paths from a stream seeded by
/// derive_seed(seed, b) and bridge uniforms from a sibling stream, so its
/// result does not depend on which thread runs it.
RuinCounts simulate_batch(const ModelConfig& config, std::uint64_t seed, std::uint64_t batch_index,
                          std::uint64_t paths);

/// Monte Carlo estimate of all six ruin probabilities from n_paths paths.
/// The result is bit-identical for every worker count. workers = 0 means
/// one per hardware thread.
EstimateSet estimate_ruin(const ModelConfig& config, std::uint64_t n_paths, std::uint64_t seed,
                          unsigned workers = 0, std::uint64_t batch_size = kDefaultBatchSize);

struct StudyRow {
    double u1 = 0.0;
    double u2 = 0.0;
    RuinType ruin_type = RuinType::max;
    Estimate estimate;
    double asym = 0.0;
    std::optional<double> ratio;  // p_hat / asym, only when asym > 0
};

/// Matching asymptotic formula for a ruin type at capital (u1, u2).
AsymptoticResult asymptotic_for(RuinType type, const ModelConfig& config, double u1, double u2);

/// Monte Carlo vs asymptotics along a capital grid. Every grid point reuses
/// `seed`, so neighbouring rows share random numbers. Throws
/// std::invalid_argument unless the grid is nonempty and increasing.
std::vector<StudyRow> convergence_study(const ModelConfig& config,
                                        const std::vector<std::pair<double, double>>& u_grid,
                                        std::uint64_t n_paths, std::uint64_t seed, unsigned workers = 0);

enum class ProbeMode { sup, inf, discounted_sup, discounted_inf };
std::string_view to_string(ProbeMode m) noexcept;

struct ProbeResult {
    Estimate joint;
    Estimate marg1;
    Estimate marg2;
};

struct ProbeQuery {
    double rho = 0.0;
    ProbeMode mode = ProbeMode::sup;
};

inline constexpr std::uint64_t kDefaultProbeSteps = 10000;

/// Joint and marginal exceedance of running extremes of a correlated
/// Brownian pair (or its discounted integrals) on a grid of `steps` points
/// over [0, t]. sup modes test extreme_i > x_i, inf modes extreme_i < -x_i.
ProbeResult dependence_probe(double rho, double t, double x1, double x2, std::uint64_t n,
                             std::uint64_t seed, ProbeMode mode, double r,
                             std::uint64_t steps = kDefaultProbeSteps, unsigned workers = 0);

/// Runs several probes over the same normals. Result i equals
/// dependence_probe(queries[i].rho, ..., queries[i].mode, ...) exactly.
std::vector<ProbeResult> dependence_sweep(const std::vector<ProbeQuery>& queries, double t, double x1,
                                          double x2, std::uint64_t n, std::uint64_t seed, double r,
                                          std::uint64_t steps = kDefaultProbeSteps, unsigned workers = 0);

struct SumReduction {
    double sample_var = 0.0;
    double theory_var = 0.0;
    double z_score = 0.0;
};

/// Sample variance of sigma1*D1(t) + sigma2*D2(t), D_i the discounted
/// Brownian integrals, against (s1^2 + s2^2 + 2 rho s1 s2) * v(0, t).
SumReduction sum_reduction_probe(double sigma1, double sigma2, double rho, double r, double t,
                                 std::uint64_t n, std::uint64_t seed);

/// Resolves a worker count: 0 means hardware concurrency (at least 1).
unsigned resolve_workers(unsigned workers) noexcept;

}  // namespace biruin
