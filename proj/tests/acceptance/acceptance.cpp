// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any selected criterion fails.
//
//   acceptance            run all ten
//   acceptance 1 2 3      run a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "biruin/asymptotics.hpp"
#include "biruin/mc_engine.hpp"
#include "biruin/run.hpp"

using namespace biruin;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

std::string num(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// Common-shock Pareto model shared by criteria 4, 5 and 9.
ModelConfig desk_model(double u) {
    ModelConfig m;
    m.u1 = m.u2 = u;
    m.r = 0.0;
    m.rho = -0.5;
    m.sigma1 = m.sigma2 = 0.2;
    m.lambda1 = m.lambda2 = 1.0;
    m.common_shock = true;
    // Premium with a 10% loading over lambda E[X] = 3.
    m.c1 = m.c2 = 3.3;
    m.dist1 = m.dist2 = ClaimDistribution::pareto(1.5, 1.0);
    m.T = 1.0;
    m.h = m.T / ModelConfig::kDefaultStepsPerHorizon;
    return m;
}

Outcome pathwise_identities() {
    Outcome out;
    int combos = 0;
    std::ostringstream bad;
    for (bool cs : {false, true})
        for (double r : {0.0, 0.05})
            for (double rho : {-0.9, -0.5, 0.0}) {
                ModelConfig m;
                m.u1 = 2.0;
                m.u2 = 1.5;
                m.r = r;
                m.rho = rho;
                m.sigma1 = 0.6;
                m.sigma2 = 0.5;
                m.lambda1 = 1.0;
                m.lambda2 = 0.8;
                m.common_shock = cs;
                m.c1 = m.c2 = 1.0;
                m.dist1 = m.dist2 = ClaimDistribution::pareto(1.5, 1.0);
                const RuinCounts c = estimate_ruin(m, 100000, 1000 + combos, 0).counts;
                const bool ok = c[RuinType::min] + c[RuinType::and_] == c[RuinType::comp1] + c[RuinType::comp2] &&
                                c[RuinType::max] <= c[RuinType::and_] && c[RuinType::and_] <= c[RuinType::min] &&
                                c[RuinType::sum] <= c[RuinType::min];
                if (!ok) {
                    out.passed = false;
                    bad << " cs=" << cs << ",r=" << r << ",rho=" << rho;
                }
                ++combos;
            }
    out.detail = std::to_string(combos) + " parameter sets x 1e5 paths" +
                 (out.passed ? ", identity and ordering exact everywhere" : ", violated at" + bad.str());
    return out;
}

Outcome quadrature_oracle() {
    double worst = 0.0;
    int points = 0;
    for (double alpha : {0.5, 1.0, 2.0, 4.0})
        for (double u : {1.0, 3.0, 10.0, 100.0, 1e4})
            for (auto [r, T] : {std::pair{0.001, 1.0}, {0.05, 1.0}, {0.05, 10.0}, {0.5, 2.0}, {2.0, 3.0}}) {
                const ClaimDistribution d = ClaimDistribution::pareto(alpha, 1.0);
                const double closed = tail_integral(d, u, r, T);
                const double quad = tail_integral_quadrature(d, u, r, T);
                worst = std::max(worst, std::abs(quad - closed) / closed);
                ++points;
            }
    return {worst <= 1e-10, std::to_string(points) + " points, max relative difference " + num(worst)};
}

Outcome small_rate_continuity() {
    double worst = 0.0;
    int checks = 0;
    for (bool cs : {false, true}) {
        ModelConfig zero;
        zero.common_shock = cs;
        zero.lambda1 = 1.3;
        zero.lambda2 = 0.7;
        zero.T = 1.0;
        zero.rho = -0.5;
        zero.dist1 = ClaimDistribution::pareto(1.5, 1.0);
        zero.dist2 = ClaimDistribution::weibull(0.5, 1.0);
        ModelConfig tiny = zero;
        tiny.r = 1e-6;
        for (int k = 0; k < 10; ++k) {
            const double u = 2.0 * std::pow(2.0, k);
            for (auto f : {psi_max_asym, psi_min_asym, psi_sum_asym}) {
                const double a = f(zero, u, u).value, b = f(tiny, u, u).value;
                worst = std::max(worst, std::abs(b - a) / a);
                ++checks;
            }
            if (cs) continue;
            for (const auto& d : {zero.dist1, zero.dist2}) {
                const double a = psi_uni_asym(zero.lambda1, d, u, 0.0, zero.T).value;
                const double b = psi_uni_asym(zero.lambda1, d, u, 1e-6, zero.T).value;
                worst = std::max(worst, std::abs(b - a) / a);
                ++checks;
            }
        }
    }
    return {worst <= 1e-3, std::to_string(checks) + " formula/u pairs, max relative gap " + num(worst)};
}

Outcome psi_min_agreement() {
    const double u = std::pow(200.0, 1.0 / 1.5);  // 2 u^-1.5 = 0.01
    const ModelConfig m = desk_model(u);
    const EstimateSet s = estimate_ruin(m, 4000000, 4, 0);
    const double asym = psi_min_asym(m, u, u).value;
    const double ratio = s[RuinType::min].p_hat / asym;
    const double and_upper = psi_and_upper(m, u, u).value;
    std::ostringstream d;
    d << "u=" << num(u, 6) << " psi_min_hat=" << num(s[RuinType::min].p_hat, 6) << " ["
      << num(s[RuinType::min].ci_lo, 6) << ", " << num(s[RuinType::min].ci_hi, 6) << "] asym=" << num(asym, 6)
      << " ratio=" << num(ratio, 5) << " (and_hat=" << num(s[RuinType::and_].p_hat, 3)
      << ", and_upper=" << num(and_upper, 3) << ")";
    return {std::abs(ratio - 1.0) <= 0.2, d.str()};
}

Outcome psi_max_trend() {
    Outcome out;
    std::ostringstream d;
    const double p_min = 0.05 * 0.05 * 2.0;
    double prev_dist = INFINITY;
    for (double tail : {0.2, 0.1, 0.05}) {
        const double u = std::pow(tail, -1.0 / 1.5);
        const ModelConfig m = desk_model(u);
        const double asym = psi_max_asym(m, u, u).value;
        const auto n = static_cast<std::uint64_t>(std::llround(1e7 * p_min / asym));
        const EstimateSet s = estimate_ruin(m, n, 5, 0);
        const double ratio = s[RuinType::max].p_hat / asym;
        const double dist = std::abs(ratio - 1.0);
        if (!(ratio >= 0.3 && ratio <= 3.0) || dist > prev_dist) out.passed = false;
        prev_dist = dist;
        d << "tail=" << tail << " u=" << num(u) << " n=" << n << " max_hat=" << num(s[RuinType::max].p_hat, 5)
          << " asym=" << num(asym, 5) << " ratio=" << num(ratio, 5) << "; ";
    }
    out.detail = d.str();
    out.detail.resize(out.detail.size() - 2);
    return out;
}

Outcome dependence_inequalities() {
    const std::vector<double> rhos = {-0.9, -0.5, 0.0, 0.5, 0.9};
    std::vector<ProbeQuery> queries;
    for (ProbeMode mode : {ProbeMode::sup, ProbeMode::discounted_sup})
        for (double rho : rhos) queries.push_back({rho, mode});
    const auto res = dependence_sweep(queries, 1.0, 1.0, 1.0, 1000000, 6, 0.5, kDefaultProbeSteps, 0);
    Outcome out;
    std::ostringstream d;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const double rho = queries[i].rho;
        const double prod = res[i].marg1.p_hat * res[i].marg2.p_hat;
        const double se = res[i].joint.standard_error();
        const double z = (res[i].joint.p_hat - prod) / se;
        bool ok;
        if (rho < 0) ok = z <= 3.0;
        else if (rho > 0) ok = z >= -3.0;
        else ok = std::abs(z) <= 3.0;
        out.passed = out.passed && ok;
        if (i % rhos.size() == 0) d << (i ? "; " : "") << to_string(queries[i].mode) << ":";
        d << " rho=" << rho << " z=" << num(z, 3) << (ok ? "" : "(!)");
    }
    out.detail = d.str();
    return out;
}

Outcome sum_reduction() {
    Outcome out;
    double worst = 0.0;
    std::uint64_t seed = 70;
    for (auto [s1, s2] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.3}})
        for (double rho : {-0.5, 0.0, 0.5}) {
            const SumReduction s = sum_reduction_probe(s1, s2, rho, 0.05, 1.0, 100000, ++seed);
            worst = std::max(worst, std::abs(s.z_score));
        }
    const SumReduction cancel = sum_reduction_probe(1.3, 1.3, -1.0, 0.05, 1.0, 100000, 80);
    out.passed = worst < 3.0 && cancel.sample_var == 0.0 && cancel.theory_var == 0.0;
    out.detail = "9 combinations, max |z| = " + num(worst, 3) + "; rho=-1 sample variance " +
                 num(cancel.sample_var) + ", theory " + num(cancel.theory_var);
    return out;
}

Outcome bridge_correction() {
    // Brute-force oracle: Brownian bridge from 1 to 1 with unit total
    // variance, watched on 1e4 substeps.
    const int substeps = 10000, bridges = 100000;
    RandomStream rng(8);
    const double dt = 1.0 / substeps, sd = std::sqrt(dt);
    std::vector<double> w(substeps + 1);
    int hits = 0;
    for (int i = 0; i < bridges; ++i) {
        w[0] = 0.0;
        for (int k = 1; k <= substeps; ++k) w[k] = w[k - 1] + sd * rng.normal();
        for (int k = 1; k < substeps; ++k) {
            if (1.0 + w[k] - (k * dt) * w[substeps] < 0.0) {
                ++hits;
                break;
            }
        }
    }
    const Estimate brute = wilson_estimate(static_cast<std::uint64_t>(hits), bridges);
    const double exact = bridge_crossing_prob(1.0, 1.0, 1.0);
    const double z = (brute.p_hat - exact) / brute.standard_error();

    ModelConfig m;
    m.u1 = 1.5;
    m.u2 = 1.0;
    m.r = 0.05;
    m.rho = -0.5;
    m.sigma1 = m.sigma2 = 0.7;
    m.common_shock = true;
    m.c1 = m.c2 = 1.0;
    m.dist1 = m.dist2 = ClaimDistribution::pareto(1.5, 1.0);
    PathSimulator sim(m);
    RandomStream path_rng(9), bridge_rng(10), unused(11);
    DiscountedPath p;
    int violations = 0, extra = 0;
    for (int i = 0; i < 10000; ++i) {
        sim.simulate(path_rng, p);
        const RuinOutcome off = detect(p, false, unused);
        const RuinOutcome on = detect(p, true, bridge_rng);
        const bool sup = (!off.ruin1 || on.ruin1) && (!off.ruin2 || on.ruin2) && (!off.ruin_sum || on.ruin_sum) &&
                         (!off.ruin_max || on.ruin_max);
        violations += !sup;
        extra += (on.ruin1 && !off.ruin1) || (on.ruin2 && !off.ruin2) || (on.ruin_sum && !off.ruin_sum);
    }
    std::ostringstream d;
    d << "brute-force " << num(brute.p_hat, 5) << " vs exp(-2)=" << num(exact, 6) << " (z=" << num(z, 3)
      << "); 1e4 paths, " << violations << " dominance violations, " << extra << " paths with extra bridge ruin";
    return {std::abs(z) <= 3.0 && violations == 0, d.str()};
}

Outcome negative_control() {
    Outcome out;
    std::ostringstream d;
    double last_ratio = 0.0;
    const double u_max = std::pow(200.0, 1.0 / 1.5);
    for (double u : {10.0, 20.0, u_max}) {
        ModelConfig m = desk_model(u);
        // Same mean as Pareto(1.5, 1).
        m.dist1 = m.dist2 = ClaimDistribution::exponential(1.0 / 3.0);
        const EstimateSet s = estimate_ruin(m, u == u_max ? 4000000 : 1000000, 9, 0);
        const double asym = psi_min_asym(m, u, u).value;
        last_ratio = s[RuinType::min].p_hat / asym;
        d << "u=" << num(u) << " min_hat=" << num(s[RuinType::min].p_hat, 4) << " asym=" << num(asym, 4)
          << " ratio=" << num(last_ratio, 4) << "; ";
    }
    out.passed = last_ratio < 0.5;
    out.detail = d.str();
    out.detail.resize(out.detail.size() - 2);
    return out;
}

Outcome determinism() {
    const std::string config = R"(model.u1 = 3
model.u2 = 2
model.r = 0.05
model.rho = -0.5
model.sigma1 = 0.6
model.sigma2 = 0.4
model.lambda1 = 1
model.lambda2 = 0.8
model.c1 = 1
model.c2 = 1
model.T = 1
claims.dist1 = pareto(1.5, 1)
claims.dist2 = weibull(0.5, 1)
mc.n_paths = 60000
mc.seed = 10
mc.batch_size = 4096
study.u_grid = 2:2, 4:4
)";
    std::string first_sim, first_study;
    bool same = true;
    for (const char* w : {"1", "4", "8"}) {
        std::ostringstream sim, study, err;
        run_text(Command::simulate, config, {std::string("mc.workers=") + w}, sim, err);
        run_text(Command::study, config, {std::string("mc.workers=") + w, "mc.n_paths=20000"}, study, err);
        if (first_sim.empty()) {
            first_sim = sim.str();
            first_study = study.str();
        }
        same = same && sim.str() == first_sim && study.str() == first_study;
    }
    const bool nonempty = first_sim.size() > 100 && first_study.size() > 100;
    return {same && nonempty, std::string("simulate and study CSV with workers 1, 4, 8: ") +
                                  (same ? "byte-identical" : "DIFFERENT")};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "pathwise identities", pathwise_identities},
        {2, "quadrature oracle", quadrature_oracle},
        {3, "small-rate continuity", small_rate_continuity},
        {4, "psi_min asymptotic agreement", psi_min_agreement},
        {5, "psi_max trend", psi_max_trend},
        {6, "dependence inequalities", dependence_inequalities},
        {7, "sum reduction", sum_reduction},
        {8, "bridge correction", bridge_correction},
        {9, "light-tail negative control", negative_control},
        {10, "determinism", determinism},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria()) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.passed;
        std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail
                  << " [" << num(secs, 3) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
