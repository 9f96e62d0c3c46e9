#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biruin/heavy_tails.hpp"
#include "biruin/risk_process.hpp"

namespace biruin {

/// Bad configuration. key() names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Everything a run needs: the model plus Monte Carlo and study settings.
struct RunParams {
    ModelConfig model;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: available parallelism
    std::uint64_t batch_size = std::uint64_t{1} << 14;
    std::vector<std::pair<double, double>> u_grid;
    std::uint64_t probe_n = 10000;
    std::uint64_t probe_steps = 10000;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits "key = value" lines; '#' starts a comment. Duplicate keys are an
/// error. Throws ConfigError.
KeyValues parse_key_values(std::string_view text);

/// Parses "pareto(1.5, 1)", "weibull(0.5, 1)", "lognormal(0, 1)" or
/// "exponential(2)". Throws ConfigError against `key`.
ClaimDistribution parse_distribution(std::string_view text, const std::string& key);

/// Builds validated RunParams from a config document. Each override is a
/// "key=value" string applied after the file (and after BIRUIN_WORKERS when
/// `environment_workers` is set). Throws ConfigError.
RunParams parse_config(std::string_view text, const std::vector<std::string>& overrides = {},
                       const char* environment_workers = nullptr);

/// The resolved configuration, one "key = value" line per setting,
/// suitable for feeding back into parse_config.
std::string describe(const RunParams& params);

/// Locale-independent shortest-round-trip-safe rendering with 17
/// significant digits.
std::string format_double(double v);

}  // namespace biruin
