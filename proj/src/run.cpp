#include "biruin/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "biruin/quadrature.hpp"

namespace biruin {

std::optional<Command> parse_command(std::string_view name) noexcept {
    if (name == "simulate") return Command::simulate;
    if (name == "asymptotics") return Command::asymptotics;
    if (name == "study") return Command::study;
    if (name == "verify") return Command::verify;
    return std::nullopt;
}

void write_estimates_csv(std::ostream& os, const EstimateSet& set) {
    os << "ruin_type,n,p_hat,ci_lo,ci_hi\n";
    for (RuinType t : kRuinTypes) {
        const Estimate& e = set[t];
        os << to_string(t) << ',' << e.n << ',' << format_double(e.p_hat) << ',' << format_double(e.ci_lo) << ','
           << format_double(e.ci_hi) << '\n';
    }
}

void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows) {
    os << "u1,u2,ruin_type,n,p_hat,ci_lo,ci_hi,asym,ratio\n";
    for (const StudyRow& r : rows) {
        os << format_double(r.u1) << ',' << format_double(r.u2) << ',' << to_string(r.ruin_type) << ','
           << r.estimate.n << ',' << format_double(r.estimate.p_hat) << ',' << format_double(r.estimate.ci_lo)
           << ',' << format_double(r.estimate.ci_hi) << ',' << format_double(r.asym) << ','
           << (r.ratio ? format_double(*r.ratio) : std::string()) << '\n';
    }
}

void write_asymptotics_csv(std::ostream& os, const std::vector<AsymptoticResult>& results) {
    os << "case_id,u1,u2,value,warn_gt_one\n";
    for (const AsymptoticResult& a : results) {
        os << to_string(a.case_id) << ',' << format_double(a.u1) << ',' << format_double(a.u2) << ','
           << format_double(a.value) << ',' << (a.exceeds_one() ? 1 : 0) << '\n';
    }
}

std::vector<AsymptoticResult> all_asymptotics(const ModelConfig& model, double u1, double u2) {
    std::vector<AsymptoticResult> out;
    for (RuinType t : kRuinTypes) {
        AsymptoticResult a = asymptotic_for(t, model, u1, u2);
        a.u1 = u1;
        a.u2 = u2;
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

CheckResult check_pathwise(const RunParams& p) {
    CheckResult res{"pathwise_identities", true, {}};
    const std::uint64_t n = std::min<std::uint64_t>(p.n_paths, 20000);
    PathSimulator sim(p.model);
    RandomStream path_rng(p.seed, 0);
    RandomStream on_rng(p.seed, 1);
    RandomStream off_rng(p.seed, 2);
    DiscountedPath path;
    std::uint64_t bad = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        sim.simulate(path_rng, path);
        const RuinOutcome on = detect(path, true, on_rng);
        const RuinOutcome off = detect(path, false, off_rng);
        for (const RuinOutcome* o : {&on, &off}) {
            const int lhs = int(o->ruin_min()) + int(o->ruin_and());
            const int rhs = int(o->ruin1) + int(o->ruin2);
            bool ok = lhs == rhs;
            ok = ok && (!o->ruin_max || o->ruin_and()) && (!o->ruin_sum || o->ruin_min());
            if (o->ruin_max) ok = ok && *o->t_max >= std::max(*o->t1, *o->t2);
            if (o->ruin_sum) ok = ok && *o->t_sum >= *o->t_min();
            bad += !ok;
        }
        const bool superset = (!off.ruin1 || on.ruin1) && (!off.ruin2 || on.ruin2) &&
                              (!off.ruin_sum || on.ruin_sum) && (!off.ruin_max || on.ruin_max);
        bad += !superset;
    }

    const EstimateSet set = estimate_ruin(p.model, p.n_paths, p.seed, p.workers, p.batch_size);
    const RuinCounts& c = set.counts;
    const bool counts_ok = c[RuinType::min] + c[RuinType::and_] == c[RuinType::comp1] + c[RuinType::comp2] &&
                           c[RuinType::max] <= c[RuinType::and_] && c[RuinType::and_] <= c[RuinType::min] &&
                           c[RuinType::sum] <= c[RuinType::min];
    res.passed = bad == 0 && counts_ok;
    res.detail = std::to_string(n) + " paths checked individually, " + std::to_string(bad) + " violations; counts over " +
                 std::to_string(c.n) + " paths " + (counts_ok ? "consistent" : "INCONSISTENT");
    return res;
}

CheckResult check_dependence(const RunParams& p, ProbeMode mode, double r) {
    CheckResult res{std::string("dependence_") + std::string(to_string(mode)), true, {}};
    const std::vector<double> rhos = {-0.5, 0.0, 0.5};
    std::vector<ProbeQuery> queries;
    for (double rho : rhos) queries.push_back({rho, mode});
    const auto results = dependence_sweep(queries, 1.0, 1.0, 1.0, p.probe_n, p.seed, r, p.probe_steps, p.workers);
    std::ostringstream detail;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
        const ProbeResult& pr = results[i];
        const double product = pr.marg1.p_hat * pr.marg2.p_hat;
        const double band = 3.0 * pr.joint.standard_error();
        bool ok;
        if (rhos[i] < 0.0) ok = pr.joint.p_hat <= product + band;
        else if (rhos[i] > 0.0) ok = pr.joint.p_hat >= product - band;
        else ok = std::abs(pr.joint.p_hat - product) <= band;
        res.passed = res.passed && ok;
        if (i > 0) detail << "; ";
        detail << "rho=" << rhos[i] << " joint=" << fmt(pr.joint.p_hat) << " product=" << fmt(product);
    }
    res.detail = detail.str();
    return res;
}

CheckResult check_quadrature() {
    CheckResult res{"quadrature_vs_closed_form", true, {}};
    double worst = 0.0;
    for (double alpha : {0.5, 1.5, 3.0})
        for (double u : {1.0, 5.0, 50.0})
            for (double r : {0.01, 0.2}) {
                const ClaimDistribution d = ClaimDistribution::pareto(alpha, 1.0);
                const double closed = tail_integral(d, u, r, 2.0);
                const double quad = tail_integral_quadrature(d, u, r, 2.0);
                worst = std::max(worst, std::abs(quad - closed) / closed);
            }
    res.passed = worst <= 1e-10;
    res.detail = "max relative difference " + fmt(worst);
    return res;
}

CheckResult check_small_rate(const RunParams& p) {
    CheckResult res{"small_rate_continuity", true, {}};
    ModelConfig zero = p.model;
    zero.r = 0.0;
    ModelConfig tiny = p.model;
    tiny.r = 1e-6;
    const double u1 = std::max(p.model.u1, 1e-3), u2 = std::max(p.model.u2, 1e-3);
    double worst = 0.0;
    for (RuinType t : kRuinTypes) {
        const double a = asymptotic_for(t, zero, u1, u2).value;
        const double b = asymptotic_for(t, tiny, u1, u2).value;
        if (a > 0.0) worst = std::max(worst, std::abs(b - a) / a);
    }
    res.passed = worst <= 1e-3;
    res.detail = "max relative gap at r=1e-6: " + fmt(worst);
    return res;
}

CheckResult check_sum_reduction(const RunParams& p) {
    CheckResult res{"sum_reduction", true, {}};
    const ModelConfig& m = p.model;
    const SumReduction s = sum_reduction_probe(m.sigma1, m.sigma2, m.rho, m.r, m.T, 10 * p.probe_n, p.seed);
    res.passed = s.theory_var == 0.0 ? s.sample_var == 0.0 : std::abs(s.z_score) < 3.0;
    res.detail = "sample " + fmt(s.sample_var) + " theory " + fmt(s.theory_var) + " z " + fmt(s.z_score);
    return res;
}

}  // namespace

std::vector<CheckResult> verify_suite(const RunParams& params) {
    std::vector<CheckResult> out;
    out.push_back(check_pathwise(params));
    out.push_back(check_dependence(params, ProbeMode::sup, 0.0));
    out.push_back(check_dependence(params, ProbeMode::discounted_sup, params.model.r > 0.0 ? params.model.r : 0.5));
    out.push_back(check_quadrature());
    out.push_back(check_small_rate(params));
    out.push_back(check_sum_reduction(params));
    return out;
}

int run_text(Command command, std::string_view config_text, const std::vector<std::string>& overrides,
             std::ostream& out, std::ostream& err) {
    RunParams params;
    try {
        params = parse_config(config_text, overrides, std::getenv("BIRUIN_WORKERS"));
        if (command == Command::study && params.u_grid.empty())
            throw ConfigError("study.u_grid", "missing required key for the study command");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    params.workers = resolve_workers(params.workers);

    err << "# resolved configuration\n";
    std::istringstream resolved(describe(params));
    for (std::string line; std::getline(resolved, line);) err << "#   " << line << '\n';
    for (const std::string& w : model_warnings(params.model)) err << "warning: " << w << '\n';

    try {
        switch (command) {
            case Command::simulate:
                write_estimates_csv(out, estimate_ruin(params.model, params.n_paths, params.seed, params.workers,
                                                       params.batch_size));
                return kExitOk;
            case Command::asymptotics: {
                const auto results = all_asymptotics(params.model, params.model.u1, params.model.u2);
                for (const AsymptoticResult& a : results)
                    for (const std::string& w : a.warnings) err << "warning: " << to_string(a.case_id) << ": " << w << '\n';
                write_asymptotics_csv(out, results);
                return kExitOk;
            }
            case Command::study:
                write_study_csv(out, convergence_study(params.model, params.u_grid, params.n_paths, params.seed,
                                                       params.workers));
                return kExitOk;
            case Command::verify: {
                bool all = true;
                for (const CheckResult& c : verify_suite(params)) {
                    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
                    all = all && c.passed;
                }
                return all ? kExitOk : kExitVerify;
            }
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    std::ifstream in(spec.config_path);
    if (!in) {
        err << "config error: cannot read '" << spec.config_path << "'\n";
        return kExitConfig;
    }
    std::stringstream text;
    text << in.rdbuf();

    if (!spec.out_path) return run_text(spec.command, text.str(), spec.overrides, out, err);
    std::ofstream file(*spec.out_path, std::ios::binary);
    if (!file) {
        err << "cannot open output '" << *spec.out_path << "'\n";
        return kExitConfig;
    }
    return run_text(spec.command, text.str(), spec.overrides, file, err);
}

}  // namespace biruin
