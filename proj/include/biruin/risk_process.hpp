#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "biruin/heavy_tails.hpp"
#include "biruin/random.hpp"

namespace biruin {

enum class PremiumMode { linear, compound_poisson };

/// Compound-Poisson premium income for one business line.
struct PremiumJumps {
    double rate = 0.0;
    std::optional<ClaimDistribution> jumps;
};

/// The bidimensional perturbed surplus model.
///
/// Component i has initial capital u_i, premium rate c_i, claims arriving at
/// intensity lambda_i with sizes from dist_i, and a diffusion sigma_i * B_i
/// where (B_1, B_2) is a standard Brownian pair with correlation rho. All
/// cash flows compound at force of interest r. With common_shock both lines
/// share one arrival stream of intensity lambda1 (lambda2 is then unused)
/// while claim sizes stay independent across lines.
///
/// In compound_poisson premium mode the premium income of line i is c_i * t
/// plus a compound Poisson process described by premium1 / premium2.
struct ModelConfig {
    double u1 = 0.0;
    double u2 = 0.0;
    double r = 0.0;
    double rho = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    bool common_shock = false;
    double c1 = 0.0;
    double c2 = 0.0;
    PremiumMode premium_mode = PremiumMode::linear;
    PremiumJumps premium1;
    PremiumJumps premium2;
    ClaimDistribution dist1 = ClaimDistribution::pareto(2.0, 1.0);
    ClaimDistribution dist2 = ClaimDistribution::pareto(2.0, 1.0);
    double T = 1.0;
    double h = 1.0e-3;  // diffusion grid step
    bool bridge = true;

    static constexpr double kDefaultStepsPerHorizon = 1000.0;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ModelConfig& config);

/// Non-fatal diagnostics, e.g. a missing safety loading when r = 0.
std::vector<std::string> model_warnings(const ModelConfig& config);

/// One simulated path of the discounted surplus V_i(t) = exp(-r t) U_i(t).
///
/// Instant k carries the value just before (v*_pre) and just after (v*) any
/// jump at times[k]; they coincide where nothing jumps. w1/w2 hold the
/// unscaled discounted Gaussian integrals int_0^t exp(-r s) dB_i(s), and
/// step_var[k] is the variance of their increment over (times[k-1], times[k]].
struct DiscountedPath {
    enum Flag : std::uint8_t {
        claim1 = 1u << 0,
        claim2 = 1u << 1,
        premium1 = 1u << 2,
        premium2 = 1u << 3,
    };

    std::vector<double> times;
    std::vector<double> v1, v2;
    std::vector<double> v1_pre, v2_pre;
    std::vector<double> w1, w2;
    std::vector<double> step_var;
    std::vector<std::uint8_t> flags;

    // Model constants the detectors need.
    double r = 0.0;
    double rho = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    void clear() noexcept;
    void reserve(std::size_t n);
    void resize(std::size_t n);
    void push_back(double t, double a1_pre, double a2_pre, double a1, double a2, double g1, double g2,
                   double var, std::uint8_t flag);
};

/// Poisson arrival times on (0, T], by the conditional-uniform construction:
/// N ~ Poisson(lambda T), then N sorted uniforms on (0, T).
std::vector<double> draw_arrivals(double lambda, double T, RandomStream& rng);

/// Var( int_s^t exp(-r l) dB(l) ). Exact r = 0 branch.
/// Throws std::invalid_argument unless 0 <= s < t and r >= 0.
double discounted_diffusion_cov(double r, double s, double t);

/// int_s^t exp(-r l) dl: the discounted premium per unit rate over (s, t].
double discounted_premium_factor(double r, double s, double t) noexcept;

/// Jointly Gaussian increments of (int exp(-r l) dB_1, int exp(-r l) dB_2)
/// over (s, t]. Consumes exactly two normals.
std::pair<double, double> joint_diffusion_increment(double r, double rho, double s, double t,
                                                    RandomStream& rng);

/// Simulates discounted paths for one configuration.
///
/// The regular grid and its per-step factors are built once; simulate()
/// then reuses the caller's path buffers, so a batch of paths allocates
/// nothing after warm-up. Holds scratch space, so use one simulator per
/// thread. Random numbers are consumed in a fixed order:
/// claim arrivals, claim sizes, premium arrivals and jumps, then two
/// normals per interval in time order.
class PathSimulator {
public:
    explicit PathSimulator(ModelConfig config);

    const ModelConfig& config() const noexcept { return config_; }

    void simulate(RandomStream& rng, DiscountedPath& out);
    DiscountedPath simulate(RandomStream& rng);

    /// Test hook: a path whose claim events are given rather than drawn.
    /// Each event is (time, claim on line 1, claim on line 2). Diffusion
    /// normals are still drawn from `rng`.
    void simulate_with_claims(const std::vector<std::tuple<double, double, double>>& claims,
                              RandomStream& rng, DiscountedPath& out);

private:
    struct Event {
        double t;
        double x1;  // amount added to line 1 at t (claims negative)
        double x2;
        std::uint8_t flag;
    };

    void draw_events(RandomStream& rng);
    void walk(RandomStream& rng, DiscountedPath& out);

    ModelConfig config_;
    double rho_perp_;
    std::vector<double> grid_;       // 0 = grid_[0] < ... < grid_.back() = T
    std::vector<double> grid_disc_;  // exp(-r t) at grid points
    std::vector<double> grid_sd_;    // sqrt(var) of step ending at grid_[k]
    std::vector<double> grid_prem_;  // premium factor of step ending at grid_[k]
    std::vector<Event> events_;
};

DiscountedPath simulate_path(const ModelConfig& config, RandomStream& rng);

/// Halves every interval of `path` by sampling the Gaussian parts at the
/// midpoints conditionally on the existing values (Brownian bridge). All
/// original instants and values are kept unchanged.
DiscountedPath refine_path(const DiscountedPath& path, RandomStream& rng);

}  // namespace biruin
