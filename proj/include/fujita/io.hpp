#pragma once

#include "fujita/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fujita {

/// Every violation found while validating a configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct ExhaustSettings {
    std::vector<double> L_list{10.0, 20.0, 40.0};
    double t_check = 1.0;
    double tail_tol = 1e-3;
};

struct CompareSettings {
    InitialData phi = HarmonicData{0.5};
    InitialData psi = HarmonicData{1.0};
    ComparisonOptions options;
};

struct SupersolutionSettings {
    std::optional<SupersolutionSpec> barrier;
    double scale = 0.5;
    std::size_t samples = 10000;
    double span = 20.0;
    double t_max = 100.0;
    bool simulate = false;  // also run the bound study on the configured grid
};

struct RunConfig {
    ProblemSetup setup;
    std::string init_kind = "zero";
    ExhaustSettings exhaust;
    CompareSettings compare;
    InitialData neumann_psi = LaneEmdenData{};
    SupersolutionSettings supersolution;
    std::vector<double> sweep_p;
    std::vector<double> sweep_amplitudes;
    std::filesystem::path out_dir = "out";
};

/// Builds and validates a configuration. Throws ConfigError listing every violation.
RunConfig parse_config(const nlohmann::json& document);
RunConfig parse_config_file(const std::filesystem::path& path);

enum ExitCode : int { Pass = 0, Fail = 1, ConfigInvalid = 2, InconclusiveRun = 3, Refused = 4 };

const std::vector<std::string>& command_names();
std::string usage(const std::string& program);

/// Runs one command and writes its outputs under cfg.out_dir.
int dispatch(const std::string& command, const RunConfig& cfg, unsigned jobs, std::ostream& log);

/// Decimal with 17 significant digits.
std::string format_number(double value);

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
void write_phase_csv(const std::filesystem::path& path, const std::vector<SweepRecord>& records);
void write_residuals_csv(const std::filesystem::path& path, const ResidualSampling& sampling);
nlohmann::ordered_json to_json(const StudyReport& report);
void write_study_json(const std::filesystem::path& path, const StudyReport& report);

/// Machine-readable violation list, one JSON document.
std::string violations_json(const std::string& error, const std::vector<std::string>& violations);

}  // namespace fujita
