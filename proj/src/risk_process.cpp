#include "biruin/risk_process.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/random/poisson_distribution.hpp>

namespace biruin {

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw std::invalid_argument(field + ": " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

// Unchecked forms of the public interval functions, for the hot loop.
double cov_unchecked(double r, double s, double t) noexcept {
    if (r == 0.0) return t - s;
    return std::exp(-2.0 * r * s) * -std::expm1(-2.0 * r * (t - s)) / (2.0 * r);
}

}  // namespace

void validate(const ModelConfig& c) {
    require(finite_nonneg(c.u1), "u1", "must be finite and >= 0");
    require(finite_nonneg(c.u2), "u2", "must be finite and >= 0");
    require(finite_nonneg(c.r), "r", "must be finite and >= 0");
    require(c.rho >= -1.0 && c.rho <= 1.0, "rho", "must lie in [-1, 1]");
    require(finite_nonneg(c.sigma1), "sigma1", "must be finite and >= 0");
    require(finite_nonneg(c.sigma2), "sigma2", "must be finite and >= 0");
    require(std::isfinite(c.lambda1) && c.lambda1 > 0.0, "lambda1", "must be finite and > 0");
    require(std::isfinite(c.lambda2) && c.lambda2 > 0.0, "lambda2", "must be finite and > 0");
    require(finite_nonneg(c.c1), "c1", "must be finite and >= 0");
    require(finite_nonneg(c.c2), "c2", "must be finite and >= 0");
    require(std::isfinite(c.T) && c.T > 0.0, "T", "must be finite and > 0");
    require(std::isfinite(c.h) && c.h > 0.0 && c.h <= c.T, "h", "must lie in (0, T]");
    if (c.premium_mode == PremiumMode::compound_poisson) {
        for (int i = 0; i < 2; ++i) {
            const PremiumJumps& p = i == 0 ? c.premium1 : c.premium2;
            const std::string name = i == 0 ? "premium_rate1" : "premium_rate2";
            require(finite_nonneg(p.rate), name, "must be finite and >= 0");
            require(p.rate == 0.0 || p.jumps.has_value(), name,
                    "a positive premium rate needs a jump distribution");
        }
    }
}

std::vector<std::string> model_warnings(const ModelConfig& c) {
    std::vector<std::string> out;
    if (c.r != 0.0) return out;
    for (int i = 0; i < 2; ++i) {
        const ClaimDistribution& dist = i == 0 ? c.dist1 : c.dist2;
        const double claim_mean = dist.mean();
        if (!std::isfinite(claim_mean)) continue;
        const double lambda = (i == 0 || c.common_shock) ? c.lambda1 : c.lambda2;
        double income = i == 0 ? c.c1 : c.c2;
        if (c.premium_mode == PremiumMode::compound_poisson) {
            const PremiumJumps& p = i == 0 ? c.premium1 : c.premium2;
            if (p.rate > 0.0) income += p.rate * p.jumps->mean();
        }
        const double outflow = lambda * claim_mean;
        if (income <= outflow) {
            std::ostringstream os;
            os << "line " << (i + 1) << ": no safety loading with r = 0 (premium income " << income
               << " <= expected claims " << outflow << "); ruin becomes likely over long horizons";
            out.push_back(os.str());
        }
    }
    return out;
}

void DiscountedPath::clear() noexcept {
    times.clear();
    v1.clear();
    v2.clear();
    v1_pre.clear();
    v2_pre.clear();
    w1.clear();
    w2.clear();
    step_var.clear();
    flags.clear();
}

void DiscountedPath::reserve(std::size_t n) {
    times.reserve(n);
    v1.reserve(n);
    v2.reserve(n);
    v1_pre.reserve(n);
    v2_pre.reserve(n);
    w1.reserve(n);
    w2.reserve(n);
    step_var.reserve(n);
    flags.reserve(n);
}

void DiscountedPath::resize(std::size_t n) {
    times.resize(n);
    v1.resize(n);
    v2.resize(n);
    v1_pre.resize(n);
    v2_pre.resize(n);
    w1.resize(n);
    w2.resize(n);
    step_var.resize(n);
    flags.resize(n);
}

void DiscountedPath::push_back(double t, double a1_pre, double a2_pre, double a1, double a2,
                               double g1, double g2, double var, std::uint8_t flag) {
    times.push_back(t);
    v1_pre.push_back(a1_pre);
    v2_pre.push_back(a2_pre);
    v1.push_back(a1);
    v2.push_back(a2);
    w1.push_back(g1);
    w2.push_back(g2);
    step_var.push_back(var);
    flags.push_back(flag);
}

std::vector<double> draw_arrivals(double lambda, double T, RandomStream& rng) {
    std::vector<double> times;
    if (!(T > 0.0)) return times;
    boost::random::poisson_distribution<long, double> count(lambda * T);
    const long n = count(rng.engine());
    times.reserve(static_cast<std::size_t>(n));
    const double below_T = std::nextafter(T, 0.0);
    for (long i = 0; i < n; ++i) times.push_back(std::min(rng.uniform() * T, below_T));
    std::sort(times.begin(), times.end());
    return times;
}

double discounted_diffusion_cov(double r, double s, double t) {
    if (!(r >= 0.0)) throw std::invalid_argument("discounted_diffusion_cov: r must be >= 0");
    if (!(s >= 0.0 && s < t)) throw std::invalid_argument("discounted_diffusion_cov: need 0 <= s < t");
    return cov_unchecked(r, s, t);
}

double discounted_premium_factor(double r, double s, double t) noexcept {
    if (r == 0.0) return t - s;
    return std::exp(-r * s) * -std::expm1(-r * (t - s)) / r;
}

std::pair<double, double> joint_diffusion_increment(double r, double rho, double s, double t,
                                                    RandomStream& rng) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::invalid_argument("joint_diffusion_increment: rho must lie in [-1, 1]");
    const double sd = std::sqrt(discounted_diffusion_cov(r, s, t));
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {sd * z1, sd * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2)};
}

PathSimulator::PathSimulator(ModelConfig config) : config_(std::move(config)) {
    validate(config_);
    rho_perp_ = std::sqrt(1.0 - config_.rho * config_.rho);

    const double T = config_.T;
    const double h = config_.h;
    grid_.push_back(0.0);
    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k) * h;
        if (t >= T * (1.0 - 1e-12)) break;
        grid_.push_back(t);
    }
    grid_.push_back(T);

    const double r = config_.r;
    grid_disc_.resize(grid_.size());
    grid_sd_.resize(grid_.size());
    grid_prem_.resize(grid_.size());
    grid_disc_[0] = 1.0;
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        grid_disc_[k] = std::exp(-r * grid_[k]);
        grid_sd_[k] = std::sqrt(cov_unchecked(r, grid_[k - 1], grid_[k]));
        grid_prem_[k] = discounted_premium_factor(r, grid_[k - 1], grid_[k]);
    }
}

void PathSimulator::draw_events(RandomStream& rng) {
    events_.clear();
    const ModelConfig& c = config_;
    if (c.common_shock) {
        const auto arrivals = draw_arrivals(c.lambda1, c.T, rng);
        for (double t : arrivals) {
            const double x1 = c.dist1.sample(rng);
            const double x2 = c.dist2.sample(rng);
            events_.push_back({t, -x1, -x2, DiscountedPath::claim1 | DiscountedPath::claim2});
        }
    } else {
        const auto arrivals1 = draw_arrivals(c.lambda1, c.T, rng);
        const auto arrivals2 = draw_arrivals(c.lambda2, c.T, rng);
        for (double t : arrivals1) events_.push_back({t, -c.dist1.sample(rng), 0.0, DiscountedPath::claim1});
        for (double t : arrivals2) events_.push_back({t, 0.0, -c.dist2.sample(rng), DiscountedPath::claim2});
    }
    if (c.premium_mode == PremiumMode::compound_poisson) {
        if (c.premium1.rate > 0.0) {
            for (double t : draw_arrivals(c.premium1.rate, c.T, rng))
                events_.push_back({t, c.premium1.jumps->sample(rng), 0.0, DiscountedPath::premium1});
        }
        if (c.premium2.rate > 0.0) {
            for (double t : draw_arrivals(c.premium2.rate, c.T, rng))
                events_.push_back({t, 0.0, c.premium2.jumps->sample(rng), DiscountedPath::premium2});
        }
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
}

void PathSimulator::walk(RandomStream& rng, DiscountedPath& out) {
    const ModelConfig& c = config_;
    // Write through raw pointers into presized arrays; this loop is the hot
    // path of every Monte Carlo run.
    out.resize(grid_.size() + events_.size());
    out.r = c.r;
    out.rho = c.rho;
    out.sigma1 = c.sigma1;
    out.sigma2 = c.sigma2;
    out.c1 = c.c1;
    out.c2 = c.c2;
    double* const times = out.times.data();
    double* const v1 = out.v1.data();
    double* const v2 = out.v2.data();
    double* const v1_pre = out.v1_pre.data();
    double* const v2_pre = out.v2_pre.data();
    double* const w1 = out.w1.data();
    double* const w2 = out.w2.data();
    double* const step_var = out.step_var.data();
    std::uint8_t* const flags = out.flags.data();
    times[0] = 0.0;
    v1[0] = v1_pre[0] = c.u1;
    v2[0] = v2_pre[0] = c.u2;
    w1[0] = w2[0] = step_var[0] = 0.0;
    flags[0] = 0;
    std::size_t k = 1;

    double a1 = c.u1, a2 = c.u2;  // post-jump values at the last instant
    double g1 = 0.0, g2 = 0.0;
    double prev_t = 0.0;
    bool prev_on_grid = true;
    std::size_t g = 1;
    std::size_t e = 0;
    const std::size_t n_events = events_.size();
    const double rho = c.rho, rho_perp = rho_perp_;
    const double c1 = c.c1, c2 = c.c2, s1 = c.sigma1, s2 = c.sigma2;

    while (g < grid_.size()) {
        const bool event_first = e < n_events && events_[e].t < grid_[g];
        const double t = event_first ? events_[e].t : grid_[g];
        const bool on_grid = !event_first;

        double sd, prem, disc;
        if (on_grid && prev_on_grid) {
            sd = grid_sd_[g];
            prem = grid_prem_[g];
            disc = grid_disc_[g];
        } else {
            sd = std::sqrt(cov_unchecked(c.r, prev_t, t));
            prem = discounted_premium_factor(c.r, prev_t, t);
            disc = on_grid ? grid_disc_[g] : std::exp(-c.r * t);
        }

        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double d1 = sd * z1;
        const double d2 = sd * (rho * z1 + rho_perp * z2);
        g1 += d1;
        g2 += d2;
        a1 += c1 * prem + s1 * d1;
        a2 += c2 * prem + s2 * d2;
        times[k] = t;
        v1_pre[k] = a1;
        v2_pre[k] = a2;

        std::uint8_t flag = 0;
        while (e < n_events && events_[e].t == t) {
            a1 += disc * events_[e].x1;
            a2 += disc * events_[e].x2;
            flag |= events_[e].flag;
            ++e;
        }
        v1[k] = a1;
        v2[k] = a2;
        w1[k] = g1;
        w2[k] = g2;
        step_var[k] = sd * sd;
        flags[k] = flag;
        ++k;

        prev_t = t;
        prev_on_grid = on_grid;
        if (on_grid) ++g;
    }
    out.resize(k);
}

void PathSimulator::simulate(RandomStream& rng, DiscountedPath& out) {
    draw_events(rng);
    walk(rng, out);
}

DiscountedPath PathSimulator::simulate(RandomStream& rng) {
    DiscountedPath out;
    simulate(rng, out);
    return out;
}

void PathSimulator::simulate_with_claims(const std::vector<std::tuple<double, double, double>>& claims,
                                         RandomStream& rng, DiscountedPath& out) {
    events_.clear();
    for (const auto& [t, x1, x2] : claims) {
        if (!(t > 0.0 && t < config_.T))
            throw std::invalid_argument("simulate_with_claims: claim time must lie in (0, T)");
        std::uint8_t flag = 0;
        if (x1 != 0.0) flag |= DiscountedPath::claim1;
        if (x2 != 0.0) flag |= DiscountedPath::claim2;
        events_.push_back({t, -x1, -x2, flag});
    }
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    walk(rng, out);
}

DiscountedPath simulate_path(const ModelConfig& config, RandomStream& rng) {
    PathSimulator sim(config);
    return sim.simulate(rng);
}

DiscountedPath refine_path(const DiscountedPath& path, RandomStream& rng) {
    DiscountedPath out;
    out.r = path.r;
    out.rho = path.rho;
    out.sigma1 = path.sigma1;
    out.sigma2 = path.sigma2;
    out.c1 = path.c1;
    out.c2 = path.c2;
    if (path.size() == 0) return out;
    out.reserve(2 * path.size());

    const double r = path.r;
    const double rho_perp = std::sqrt(1.0 - path.rho * path.rho);
    out.push_back(path.times[0], path.v1_pre[0], path.v2_pre[0], path.v1[0], path.v2[0], path.w1[0],
                  path.w2[0], path.step_var[0], path.flags[0]);

    for (std::size_t k = 1; k < path.size(); ++k) {
        const double s = path.times[k - 1];
        const double t = path.times[k];
        const double m = 0.5 * (s + t);
        const double va = cov_unchecked(r, s, m);
        const double vb = cov_unchecked(r, m, t);
        const double total = va + vb;
        const double cond_sd = std::sqrt(va * vb / total);

        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double e1 = cond_sd * z1;
        const double e2 = cond_sd * (path.rho * z1 + rho_perp * z2);

        const double dg1 = (path.w1[k] - path.w1[k - 1]) * (va / total) + e1;
        const double dg2 = (path.w2[k] - path.w2[k - 1]) * (va / total) + e2;
        const double prem = discounted_premium_factor(r, s, m);
        const double m1 = path.v1[k - 1] + path.c1 * prem + path.sigma1 * dg1;
        const double m2 = path.v2[k - 1] + path.c2 * prem + path.sigma2 * dg2;
        out.push_back(m, m1, m2, m1, m2, path.w1[k - 1] + dg1, path.w2[k - 1] + dg2, va, 0);
        out.push_back(t, path.v1_pre[k], path.v2_pre[k], path.v1[k], path.v2[k], path.w1[k],
                      path.w2[k], vb, path.flags[k]);
    }
    return out;
}

}  // namespace biruin
