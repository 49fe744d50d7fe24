#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "avgdiff/errors.hpp"
#include "avgdiff/field.hpp"
#include "avgdiff/genetics.hpp"
#include "avgdiff/stability.hpp"

namespace avgdiff {

// ---------------------------------------------------------------------------
// Scenario configs. The on-disk grammar is a strict key-value block language
// (see docs/config-grammar.md); unknown keys are rejected so experiment files
// always mean exactly what they say.
// ---------------------------------------------------------------------------

struct ConfigDiagnostic {
    int line = 0;
    std::string key;
    std::string reason;
};

class ConfigParseError : public Error {
public:
    explicit ConfigParseError(std::vector<ConfigDiagnostic> diags);
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diags_; }

private:
    std::vector<ConfigDiagnostic> diags_;
};

struct SimulateConfig {
    FieldSpec field;
    ScaleMode scale;
    Index n0 = 0;
    Vec x0;
    Index horizon = 100;
    bool operator==(const SimulateConfig&) const = default;
};

struct SnormConfig {
    FieldSpec field;
    bool absolute = false;  // variant = "sum" | "abs"
    Index window = 1;
    double grid_spacing = 0.25;
    Index probe_limit = 64;
    bool operator==(const SnormConfig&) const = default;
};

struct AverageConfig {
    FieldSpec field;
    Vec x;
    double tol = 1e-9;
    std::optional<Index> window;        // when set, also report a uniformity gap
    std::vector<Index> probes;          // starts used by the uniformity gap
    bool operator==(const AverageConfig&) const = default;
};

struct StabilityConfig {
    FieldSpec field;
    ScaleMode scale;
    Vec xi0;
    Index n0 = 0;
    std::vector<double> eps_grid;
    std::vector<Index> probes;
    int samples_per_shell = 8;
    Index horizon = 4096;
    std::optional<std::vector<int>> var_subset;  // 0-based internally
    bool operator==(const StabilityConfig&) const = default;
};

struct Theorem1Config {
    FieldSpec x_field;
    FieldSpec r_field;
    Vec xi0;
    double eps = 0.1;
    double eta1 = 0.05;
    double eta2 = 0.01;
    Index window = 1;
    std::vector<Index> probes = {0};
    int ic_samples = 4;
    Index horizon = 10000;
    double snorm_grid_spacing = 0.125;
    Index snorm_probe_limit = 64;
    bool operator==(const Theorem1Config&) const = default;
};

struct Theorem2Config {
    FieldSpec field;
    Vec xi0;
    std::vector<double> eps_list;
    double alpha = 0.1;
    double beta = 0.01;
    double horizon_constant = 10.0;
    Index n0 = 0;
    int ic_samples = 0;
    std::optional<std::vector<int>> var_subset;
    double avg_tol = 1e-9;
    bool operator==(const Theorem2Config&) const = default;
};

struct Theorem3Config {
    FieldSpec field;
    Vec xi0;
    std::vector<Index> n0_list;
    double alpha = 0.1;
    double beta = 0.01;
    Index horizon = 10000;
    int ic_samples = 0;
    std::optional<std::vector<int>> var_subset;
    double avg_tol = 1e-9;
    bool operator==(const Theorem3Config&) const = default;
};

struct GeneticsConfig {
    double eps = 0.01;
    Index period = 1;
    std::vector<double> alpha_seq;
    std::vector<double> beta_seq;
    std::vector<double> p0_list;
    Index horizon = 100000;
    double delta_target = 0.05;
    double entry_radius = 0.1;
    double orbit_tol = 1e-12;
    bool operator==(const GeneticsConfig&) const = default;
};

struct ScenarioConfig {
    enum class Command { Simulate, Snorm, Average, Stability, Theorem1, Theorem2, Theorem3, Genetics };

    Command command = Command::Simulate;
    std::uint64_t seed = 0;
    std::string out;  // output prefix; empty means "use the command name"
    std::variant<SimulateConfig, SnormConfig, AverageConfig, StabilityConfig, Theorem1Config,
                 Theorem2Config, Theorem3Config, GeneticsConfig>
        payload;

    bool operator==(const ScenarioConfig&) const = default;
};

std::string to_string(ScenarioConfig::Command c);
std::optional<ScenarioConfig::Command> command_from_string(const std::string& name);

/// Parses and fully validates a scenario document. Throws ConfigParseError
/// carrying (line, key, reason) diagnostics — all of them, not just the first.
ScenarioConfig parse_scenario(const std::string& text);

/// Canonical text form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& config);

/// Exit statuses of run_scenario.
inline constexpr int kStatusHolds = 0;
inline constexpr int kStatusViolated = 1;
inline constexpr int kStatusHypothesis = 2;
inline constexpr int kStatusIoError = 3;

/// Runs the configured experiment, writing <prefix>.csv and
/// <prefix>.summary.txt. Returns 0 when every checked conclusion holds with no
/// hypothesis flags, 1 on a conclusion violation, 2 on hypothesis or
/// validation failures, 3 on I/O trouble.
int run_scenario(const ScenarioConfig& config);

}  // namespace avgdiff
