#include "biruin/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace biruin {

namespace {

// Two-sided 95% normal quantile.
constexpr double kZ95 = 1.959963984540054;

// Runs fn(b) for b in [0, n_batches) on up to `workers` threads and returns
// the results indexed by batch.
template <class Result, class Fn>
std::vector<Result> run_batches(std::uint64_t n_batches, unsigned workers, Fn&& fn) {
    std::vector<Result> results(n_batches);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_batches) return;
            try {
                results[b] = fn(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_batches);
                return;
            }
        }
    };

    const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_batches));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::uint64_t batch_count(std::uint64_t n, std::uint64_t batch_size) {
    return (n + batch_size - 1) / batch_size;
}

std::uint64_t batch_paths(std::uint64_t b, std::uint64_t n, std::uint64_t batch_size) {
    return std::min(batch_size, n - b * batch_size);
}

}  // namespace

unsigned resolve_workers(unsigned workers) noexcept {
    if (workers > 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

double Estimate::standard_error() const noexcept {
    if (n == 0) return 0.0;
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

Estimate wilson_estimate(std::uint64_t count, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("wilson_estimate: n must be >= 1");
    if (count > n) throw std::invalid_argument("wilson_estimate: count exceeds n");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(count) / nn;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;

    Estimate e;
    e.p_hat = p;
    e.n = n;
    e.count = count;
    // Exact endpoints at the boundaries; clamp rounding elsewhere so that
    // ci_lo <= p_hat <= ci_hi always holds.
    e.ci_lo = count == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
    e.ci_hi = count == n ? 1.0 : std::clamp(centre + half, p, 1.0);
    return e;
}

std::string_view to_string(RuinType t) noexcept {
    switch (t) {
        case RuinType::max: return "max";
        case RuinType::min: return "min";
        case RuinType::sum: return "sum";
        case RuinType::and_: return "and";
        case RuinType::comp1: return "comp1";
        case RuinType::comp2: return "comp2";
    }
    return "unknown";
}

void RuinCounts::add(const RuinOutcome& o) noexcept {
    ++n;
    hits[static_cast<std::size_t>(RuinType::max)] += o.ruin_max;
    hits[static_cast<std::size_t>(RuinType::min)] += o.ruin_min();
    hits[static_cast<std::size_t>(RuinType::sum)] += o.ruin_sum;
    hits[static_cast<std::size_t>(RuinType::and_)] += o.ruin_and();
    hits[static_cast<std::size_t>(RuinType::comp1)] += o.ruin1;
    hits[static_cast<std::size_t>(RuinType::comp2)] += o.ruin2;
}

RuinCounts& RuinCounts::operator+=(const RuinCounts& other) noexcept {
    n += other.n;
    for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += other.hits[i];
    return *this;
}

EstimateSet make_estimate_set(const RuinCounts& counts) {
    EstimateSet set;
    set.counts = counts;
    for (RuinType t : kRuinTypes) set.estimates[static_cast<std::size_t>(t)] = wilson_estimate(counts[t], counts.n);
    return set;
}

RuinCounts simulate_batch(const ModelConfig& config, std::uint64_t seed, std::uint64_t batch_index,
                          std::uint64_t paths) {
    const std::uint64_t batch_seed = derive_seed(seed, batch_index);
    RandomStream path_rng(batch_seed, 0);
    RandomStream bridge_rng(batch_seed, 1);
    PathSimulator sim(config);
    DiscountedPath path;
    RuinCounts counts;
    for (std::uint64_t i = 0; i < paths; ++i) {
        sim.simulate(path_rng, path);
        counts.add(detect(path, config.bridge, bridge_rng));
    }
    return counts;
}

EstimateSet estimate_ruin(const ModelConfig& config, std::uint64_t n_paths, std::uint64_t seed,
                          unsigned workers, std::uint64_t batch_size) {
    if (n_paths == 0) throw std::invalid_argument("estimate_ruin: n_paths must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("estimate_ruin: batch_size must be >= 1");
    validate(config);
    const std::uint64_t n_batches = batch_count(n_paths, batch_size);
    const auto per_batch = run_batches<RuinCounts>(n_batches, resolve_workers(workers), [&](std::uint64_t b) {
        return simulate_batch(config, seed, b, batch_paths(b, n_paths, batch_size));
    });
    RuinCounts total;
    for (const RuinCounts& c : per_batch) total += c;
    return make_estimate_set(total);
}

AsymptoticResult asymptotic_for(RuinType type, const ModelConfig& config, double u1, double u2) {
    switch (type) {
        case RuinType::max: return psi_max_asym(config, u1, u2);
        case RuinType::min: return psi_min_asym(config, u1, u2);
        case RuinType::sum: return psi_sum_asym(config, u1, u2);
        case RuinType::and_: return psi_and_upper(config, u1, u2);
        case RuinType::comp1: return psi_uni_asym(config.lambda1, config.dist1, u1, config.r, config.T);
        case RuinType::comp2: {
            const double lambda = config.common_shock ? config.lambda1 : config.lambda2;
            return psi_uni_asym(lambda, config.dist2, u2, config.r, config.T);
        }
    }
    throw std::logic_error("asymptotic_for: unknown ruin type");
}

std::vector<StudyRow> convergence_study(const ModelConfig& config,
                                        const std::vector<std::pair<double, double>>& u_grid,
                                        std::uint64_t n_paths, std::uint64_t seed, unsigned workers) {
    if (u_grid.empty()) throw std::invalid_argument("convergence_study: u grid is empty");
    for (std::size_t i = 1; i < u_grid.size(); ++i) {
        const auto [a1, a2] = u_grid[i - 1];
        const auto [b1, b2] = u_grid[i];
        if (b1 < a1 || b2 < a2 || (b1 == a1 && b2 == a2))
            throw std::invalid_argument("convergence_study: u grid must be increasing");
    }

    std::vector<StudyRow> rows;
    rows.reserve(u_grid.size() * kRuinTypes.size());
    for (const auto& [u1, u2] : u_grid) {
        ModelConfig at = config;
        at.u1 = u1;
        at.u2 = u2;
        const EstimateSet set = estimate_ruin(at, n_paths, seed, workers);
        for (RuinType type : kRuinTypes) {
            StudyRow row;
            row.u1 = u1;
            row.u2 = u2;
            row.ruin_type = type;
            row.estimate = set[type];
            row.asym = asymptotic_for(type, at, u1, u2).value;
            if (row.asym > 0.0) row.ratio = row.estimate.p_hat / row.asym;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string_view to_string(ProbeMode m) noexcept {
    switch (m) {
        case ProbeMode::sup: return "sup";
        case ProbeMode::inf: return "inf";
        case ProbeMode::discounted_sup: return "discounted_sup";
        case ProbeMode::discounted_inf: return "discounted_inf";
    }
    return "unknown";
}

namespace {

struct ProbeCounts {
    std::vector<std::array<std::uint64_t, 3>> hits;  // joint, marg1, marg2 per query
};

bool is_discounted(ProbeMode m) { return m == ProbeMode::discounted_sup || m == ProbeMode::discounted_inf; }
bool is_sup(ProbeMode m) { return m == ProbeMode::sup || m == ProbeMode::discounted_sup; }

// Running extremes of one Gaussian path.
struct Extremes {
    double value = 0.0;
    double hi = 0.0;
    double lo = 0.0;

    void step(double d) noexcept {
        value += d;
        hi = std::max(hi, value);
        lo = std::min(lo, value);
    }
};

class ProbeKernel {
public:
    ProbeKernel(const std::vector<ProbeQuery>& queries, double t, double x1, double x2, double r,
                std::uint64_t steps)
        : queries_(queries), x1_(x1), x2_(x2), steps_(steps) {
        for (const ProbeQuery& q : queries_) {
            if (std::find(rhos_.begin(), rhos_.end(), q.rho) == rhos_.end()) rhos_.push_back(q.rho);
            (is_discounted(q.mode) ? need_disc_ : need_plain_) = true;
        }
        for (double rho : rhos_) perps_.push_back(std::sqrt(1.0 - rho * rho));
        const double dt = t / static_cast<double>(steps);
        sd_plain_ = std::sqrt(dt);
        if (need_disc_) {
            sd_disc_.resize(steps);
            for (std::uint64_t k = 0; k < steps; ++k) {
                const double s = t * static_cast<double>(k) / static_cast<double>(steps);
                const double e = t * static_cast<double>(k + 1) / static_cast<double>(steps);
                sd_disc_[k] = std::sqrt(discounted_diffusion_cov(r, s, e));
            }
        }
        plain2_.resize(rhos_.size());
        disc2_.resize(rhos_.size());
    }

    ProbeCounts run(RandomStream& rng, std::uint64_t paths) {
        ProbeCounts counts;
        counts.hits.assign(queries_.size(), {0, 0, 0});
        for (std::uint64_t p = 0; p < paths; ++p) {
            if (need_plain_ && need_disc_) one_path<true, true>(rng);
            else if (need_disc_) one_path<false, true>(rng);
            else one_path<true, false>(rng);
            tally(counts);
        }
        return counts;
    }

private:
    template <bool Plain, bool Disc>
    void one_path(RandomStream& rng) {
        plain1_ = {};
        disc1_ = {};
        std::fill(plain2_.begin(), plain2_.end(), Extremes{});
        std::fill(disc2_.begin(), disc2_.end(), Extremes{});
        const std::size_t m = rhos_.size();
        for (std::uint64_t k = 0; k < steps_; ++k) {
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            if constexpr (Plain) plain1_.step(sd_plain_ * z1);
            if constexpr (Disc) disc1_.step(sd_disc_[k] * z1);
            for (std::size_t j = 0; j < m; ++j) {
                const double y = rhos_[j] * z1 + perps_[j] * z2;
                if constexpr (Plain) plain2_[j].step(sd_plain_ * y);
                if constexpr (Disc) disc2_[j].step(sd_disc_[k] * y);
            }
        }
    }

    void tally(ProbeCounts& counts) const {
        for (std::size_t i = 0; i < queries_.size(); ++i) {
            const ProbeQuery& q = queries_[i];
            const std::size_t j = static_cast<std::size_t>(
                std::find(rhos_.begin(), rhos_.end(), q.rho) - rhos_.begin());
            const bool disc = is_discounted(q.mode);
            const Extremes& e1 = disc ? disc1_ : plain1_;
            const Extremes& e2 = disc ? disc2_[j] : plain2_[j];
            const bool hit1 = is_sup(q.mode) ? e1.hi > x1_ : e1.lo < -x1_;
            const bool hit2 = is_sup(q.mode) ? e2.hi > x2_ : e2.lo < -x2_;
            counts.hits[i][0] += hit1 && hit2;
            counts.hits[i][1] += hit1;
            counts.hits[i][2] += hit2;
        }
    }

    const std::vector<ProbeQuery>& queries_;
    double x1_, x2_;
    std::uint64_t steps_;
    std::vector<double> rhos_;
    std::vector<double> perps_;
    bool need_plain_ = false;
    bool need_disc_ = false;
    double sd_plain_ = 0.0;
    std::vector<double> sd_disc_;
    Extremes plain1_, disc1_;
    std::vector<Extremes> plain2_, disc2_;
};

}  // namespace

std::vector<ProbeResult> dependence_sweep(const std::vector<ProbeQuery>& queries, double t, double x1,
                                          double x2, std::uint64_t n, std::uint64_t seed, double r,
                                          std::uint64_t steps, unsigned workers) {
    if (queries.empty()) return {};
    if (!(x1 > 0.0 && x2 > 0.0)) throw std::invalid_argument("dependence_probe: x1, x2 must be > 0");
    if (n == 0) throw std::invalid_argument("dependence_probe: n must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("dependence_probe: t must be > 0");
    if (steps == 0) throw std::invalid_argument("dependence_probe: steps must be >= 1");
    for (const ProbeQuery& q : queries) {
        if (!(q.rho >= -1.0 && q.rho <= 1.0)) throw std::invalid_argument("dependence_probe: rho must lie in [-1, 1]");
        if (is_discounted(q.mode) && !(r > 0.0))
            throw std::invalid_argument("dependence_probe: discounted modes need r > 0");
    }

    const std::uint64_t batch = kDefaultBatchSize;
    const auto per_batch = run_batches<ProbeCounts>(batch_count(n, batch), resolve_workers(workers),
                                                    [&](std::uint64_t b) {
                                                        RandomStream rng(seed, b);
                                                        ProbeKernel kernel(queries, t, x1, x2, r, steps);
                                                        return kernel.run(rng, batch_paths(b, n, batch));
                                                    });

    std::vector<ProbeResult> out(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        std::array<std::uint64_t, 3> total{0, 0, 0};
        for (const ProbeCounts& c : per_batch)
            for (std::size_t k = 0; k < 3; ++k) total[k] += c.hits[i][k];
        out[i] = {wilson_estimate(total[0], n), wilson_estimate(total[1], n), wilson_estimate(total[2], n)};
    }
    return out;
}

ProbeResult dependence_probe(double rho, double t, double x1, double x2, std::uint64_t n,
                             std::uint64_t seed, ProbeMode mode, double r, std::uint64_t steps,
                             unsigned workers) {
    return dependence_sweep({ProbeQuery{rho, mode}}, t, x1, x2, n, seed, r, steps, workers).front();
}

SumReduction sum_reduction_probe(double sigma1, double sigma2, double rho, double r, double t,
                                 std::uint64_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sum_reduction_probe: n must be >= 2");
    RandomStream rng(seed);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto [d1, d2] = joint_diffusion_increment(r, rho, 0.0, t, rng);
        const double x = sigma1 * d1 + sigma2 * d2;
        const double delta = x - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (x - mean);
    }
    SumReduction out;
    out.sample_var = m2 / static_cast<double>(n - 1);
    out.theory_var = (sigma1 * sigma1 + sigma2 * sigma2 + 2.0 * rho * sigma1 * sigma2) *
                     discounted_diffusion_cov(r, 0.0, t);
    if (out.theory_var > 0.0) {
        // Gaussian sample variance has standard deviation var * sqrt(2 / (n - 1)).
        const double se = out.theory_var * std::sqrt(2.0 / static_cast<double>(n - 1));
        out.z_score = (out.sample_var - out.theory_var) / se;
    } else {
        out.z_score = out.sample_var == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return out;
}

}  // namespace biruin
