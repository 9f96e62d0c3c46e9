#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biruin/config.hpp"
#include "biruin/mc_engine.hpp"

namespace biruin {

enum class Command { simulate, asymptotics, study, verify };

std::optional<Command> parse_command(std::string_view name) noexcept;

struct RunSpec {
    Command command = Command::simulate;
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> out_path;  // standard output when empty
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerify = 3;

/// Reads the config file, runs the command and writes CSV (or the verify
/// report) to out_path or `out`. Diagnostics and the resolved config go to
/// `err`. Returns one of the exit codes above.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Same, from config text already in memory.
int run_text(Command command, std::string_view config_text, const std::vector<std::string>& overrides,
             std::ostream& out, std::ostream& err);

void write_estimates_csv(std::ostream& os, const EstimateSet& set);
void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows);
void write_asymptotics_csv(std::ostream& os, const std::vector<AsymptoticResult>& results);

/// One asymptotics row per formula: max, min, sum, and (bound), line 1, line 2.
std::vector<AsymptoticResult> all_asymptotics(const ModelConfig& model, double u1, double u2);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant suite behind the verify command.
std::vector<CheckResult> verify_suite(const RunParams& params);

}  // namespace biruin
