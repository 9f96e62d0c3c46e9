#include "biruin/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace biruin {

namespace {

std::string_view trim(std::string_view s) {
    const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
    const auto b = std::find_if(s.begin(), s.end(), not_space);
    const auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
    return b < e ? std::string_view(b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

double to_double(std::string_view text, const std::string& key) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
    return v;
}

std::uint64_t to_count(std::string_view text, const std::string& key) {
    text = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(key, "expected a nonnegative integer, got '" + std::string(text) + "'");
    return v;
}

bool to_bool(std::string_view text, const std::string& key) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

void need(bool ok, const std::string& key, const std::string& range) {
    if (!ok) throw ConfigError(key, "out of range, valid range is " + range);
}

std::vector<std::pair<double, double>> to_grid(std::string_view text, const std::string& key) {
    std::vector<std::pair<double, double>> grid;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string_view item =
            trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (item.empty()) throw ConfigError(key, "empty grid entry");
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
            const double u = to_double(item, key);
            grid.emplace_back(u, u);
        } else {
            grid.emplace_back(to_double(item.substr(0, colon), key), to_double(item.substr(colon + 1), key));
        }
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return grid;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "missing key");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
        out.emplace_back(std::move(key), value);
    }
    return out;
}

ClaimDistribution parse_distribution(std::string_view text, const std::string& key) {
    text = trim(text);
    const std::size_t open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')')
        throw ConfigError(key, "expected kind(param, ...), got '" + std::string(text) + "'");
    const std::string kind(trim(text.substr(0, open)));
    const std::string_view inner = text.substr(open + 1, text.size() - open - 2);

    std::vector<double> params;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = inner.find(',', start);
        params.push_back(to_double(inner.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                        : comma - start),
                                   key));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }

    const auto arity = [&](std::size_t n) {
        if (params.size() != n)
            throw ConfigError(key, kind + " takes " + std::to_string(n) + " parameter(s)");
    };
    try {
        if (kind == "pareto") {
            arity(2);
            return ClaimDistribution::pareto(params[0], params[1]);
        }
        if (kind == "weibull") {
            arity(2);
            return ClaimDistribution::weibull(params[0], params[1]);
        }
        if (kind == "lognormal") {
            arity(2);
            return ClaimDistribution::lognormal(params[0], params[1]);
        }
        if (kind == "exponential") {
            arity(1);
            return ClaimDistribution::exponential(params[0]);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
    throw ConfigError(key, "unknown distribution '" + kind + "' (pareto, weibull, lognormal, exponential)");
}

RunParams parse_config(std::string_view text, const std::vector<std::string>& overrides,
                       const char* environment_workers) {
    KeyValues kv = parse_key_values(text);
    std::map<std::string, std::string, std::less<>> values(kv.begin(), kv.end());
    if (environment_workers != nullptr && *environment_workers != '\0')
        values["mc.workers"] = environment_workers;
    for (const std::string& o : overrides) {
        const std::size_t eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(o, "override must look like key=value");
        values[std::string(trim(std::string_view(o).substr(0, eq)))] =
            std::string(trim(std::string_view(o).substr(eq + 1)));
    }

    RunParams p;
    ModelConfig& m = p.model;
    std::optional<double> step;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    const auto real = [](double& slot) -> Setter {
        return [&slot](const std::string& k, const std::string& v) { slot = to_double(v, k); };
    };
    const std::map<std::string, Setter, std::less<>> setters = {
        {"model.u1", real(m.u1)},
        {"model.u2", real(m.u2)},
        {"model.r", real(m.r)},
        {"model.rho", real(m.rho)},
        {"model.sigma1", real(m.sigma1)},
        {"model.sigma2", real(m.sigma2)},
        {"model.lambda1", real(m.lambda1)},
        {"model.lambda2", real(m.lambda2)},
        {"model.c1", real(m.c1)},
        {"model.c2", real(m.c2)},
        {"model.T", real(m.T)},
        {"model.common_shock", [&m](const std::string& k, const std::string& v) { m.common_shock = to_bool(v, k); }},
        {"model.premium",
         [&m](const std::string& k, const std::string& v) {
             if (v == "linear") m.premium_mode = PremiumMode::linear;
             else if (v == "compound_poisson") m.premium_mode = PremiumMode::compound_poisson;
             else throw ConfigError(k, "expected linear or compound_poisson, got '" + v + "'");
         }},
        {"model.premium_rate1", real(m.premium1.rate)},
        {"model.premium_rate2", real(m.premium2.rate)},
        {"model.premium_jump1",
         [&m](const std::string& k, const std::string& v) { m.premium1.jumps = parse_distribution(v, k); }},
        {"model.premium_jump2",
         [&m](const std::string& k, const std::string& v) { m.premium2.jumps = parse_distribution(v, k); }},
        {"claims.dist1", [&m](const std::string& k, const std::string& v) { m.dist1 = parse_distribution(v, k); }},
        {"claims.dist2", [&m](const std::string& k, const std::string& v) { m.dist2 = parse_distribution(v, k); }},
        {"sim.h", [&step](const std::string& k, const std::string& v) { step = to_double(v, k); }},
        {"sim.bridge", [&m](const std::string& k, const std::string& v) { m.bridge = to_bool(v, k); }},
        {"mc.n_paths", [&p](const std::string& k, const std::string& v) { p.n_paths = to_count(v, k); }},
        {"mc.seed", [&p](const std::string& k, const std::string& v) { p.seed = to_count(v, k); }},
        {"mc.workers",
         [&p](const std::string& k, const std::string& v) {
             const std::uint64_t w = to_count(v, k);
             need(w <= 4096, k, "[0, 4096]");
             p.workers = static_cast<unsigned>(w);
         }},
        {"mc.batch_size", [&p](const std::string& k, const std::string& v) { p.batch_size = to_count(v, k); }},
        {"study.u_grid", [&p](const std::string& k, const std::string& v) { p.u_grid = to_grid(v, k); }},
        {"verify.probe_n", [&p](const std::string& k, const std::string& v) { p.probe_n = to_count(v, k); }},
        {"verify.probe_steps", [&p](const std::string& k, const std::string& v) { p.probe_steps = to_count(v, k); }},
    };
    static const std::vector<std::string> required = {
        "model.u1", "model.u2", "model.r", "model.rho", "model.sigma1", "model.sigma2",
        "model.lambda1", "model.lambda2", "model.T", "claims.dist1", "claims.dist2"};

    for (const auto& [key, value] : values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(key, "unknown key");
        it->second(key, value);
    }
    for (const std::string& key : required)
        if (!values.contains(key)) throw ConfigError(key, "missing required key");

    need(m.u1 >= 0.0, "model.u1", "[0, inf)");
    need(m.u2 >= 0.0, "model.u2", "[0, inf)");
    need(m.r >= 0.0, "model.r", "[0, inf)");
    need(m.rho >= -1.0 && m.rho <= 1.0, "model.rho", "[-1, 1]");
    need(m.sigma1 >= 0.0, "model.sigma1", "[0, inf)");
    need(m.sigma2 >= 0.0, "model.sigma2", "[0, inf)");
    need(m.lambda1 > 0.0, "model.lambda1", "(0, inf)");
    need(m.lambda2 > 0.0, "model.lambda2", "(0, inf)");
    need(m.c1 >= 0.0, "model.c1", "[0, inf)");
    need(m.c2 >= 0.0, "model.c2", "[0, inf)");
    need(m.T > 0.0, "model.T", "(0, inf)");
    need(m.premium1.rate >= 0.0, "model.premium_rate1", "[0, inf)");
    need(m.premium2.rate >= 0.0, "model.premium_rate2", "[0, inf)");
    if (m.premium_mode == PremiumMode::compound_poisson) {
        if (m.premium1.rate > 0.0 && !m.premium1.jumps) throw ConfigError("model.premium_jump1", "missing required key");
        if (m.premium2.rate > 0.0 && !m.premium2.jumps) throw ConfigError("model.premium_jump2", "missing required key");
    }
    m.h = step.value_or(m.T / ModelConfig::kDefaultStepsPerHorizon);
    need(m.h > 0.0 && m.h <= m.T, "sim.h", "(0, model.T]");
    need(p.n_paths >= 1, "mc.n_paths", "[1, inf)");
    need(p.batch_size >= 1, "mc.batch_size", "[1, inf)");
    need(p.probe_n >= 1, "verify.probe_n", "[1, inf)");
    need(p.probe_steps >= 1, "verify.probe_steps", "[1, inf)");
    validate(m);
    return p;
}

std::string describe(const RunParams& p) {
    const ModelConfig& m = p.model;
    std::ostringstream os;
    const auto line = [&os](const char* key, const std::string& value) { os << key << " = " << value << '\n'; };
    line("model.u1", format_double(m.u1));
    line("model.u2", format_double(m.u2));
    line("model.r", format_double(m.r));
    line("model.rho", format_double(m.rho));
    line("model.sigma1", format_double(m.sigma1));
    line("model.sigma2", format_double(m.sigma2));
    line("model.lambda1", format_double(m.lambda1));
    line("model.lambda2", format_double(m.lambda2));
    line("model.common_shock", m.common_shock ? "true" : "false");
    line("model.c1", format_double(m.c1));
    line("model.c2", format_double(m.c2));
    line("model.T", format_double(m.T));
    line("model.premium", m.premium_mode == PremiumMode::linear ? "linear" : "compound_poisson");
    if (m.premium_mode == PremiumMode::compound_poisson) {
        line("model.premium_rate1", format_double(m.premium1.rate));
        line("model.premium_rate2", format_double(m.premium2.rate));
        if (m.premium1.jumps) line("model.premium_jump1", m.premium1.jumps->describe());
        if (m.premium2.jumps) line("model.premium_jump2", m.premium2.jumps->describe());
    }
    line("claims.dist1", m.dist1.describe());
    line("claims.dist2", m.dist2.describe());
    line("sim.h", format_double(m.h));
    line("sim.bridge", m.bridge ? "true" : "false");
    line("mc.n_paths", std::to_string(p.n_paths));
    line("mc.seed", std::to_string(p.seed));
    line("mc.workers", std::to_string(p.workers));
    line("mc.batch_size", std::to_string(p.batch_size));
    if (!p.u_grid.empty()) {
        std::string grid;
        for (const auto& [a, b] : p.u_grid) {
            if (!grid.empty()) grid += ", ";
            grid += format_double(a) + ":" + format_double(b);
        }
        line("study.u_grid", grid);
    }
    line("verify.probe_n", std::to_string(p.probe_n));
    line("verify.probe_steps", std::to_string(p.probe_steps));
    return os.str();
}

}  // namespace biruin
