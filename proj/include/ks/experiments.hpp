/** @file experiments.hpp
 *  @brief End-to-end experiment pipelines behind the command-line tool.
 *
 *  Every command reads its parameters and PASS/FAIL tolerances from a Config,
 *  writes CSV/JSON outputs into one directory, and returns a list of claims.
 *  write_manifest ties the outputs to the config hash and the claims.
 */
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ks/config.hpp"

namespace ks {

inline constexpr int kManifestSchemaVersion = 1;

struct Claim {
    std::string id;
    std::string statement;
    std::string status;   ///< PASS, FAIL or INFO
    double measured = 0, expected = 0, tolerance = 0;
    std::string detail;
};

struct ExperimentResult {
    std::string command;
    std::vector<Claim> claims;
    std::vector<std::string> operations;
    std::vector<std::string> outputs;   ///< relative to the output directory
    nlohmann::json summary = nlohmann::json::object();

    bool any_fail() const;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Throws DomainError for invalid configs and NumericalError when a solver fails.
ExperimentResult run_command(const std::string& name, const Config& cfg, const std::string& out_dir);

ExperimentResult cmd_stationary_stability(const Config& cfg, const std::string& out_dir);
ExperimentResult cmd_bifurcation(const Config& cfg, const std::string& out_dir);
ExperimentResult cmd_spectrum(const Config& cfg, const std::string& out_dir);
ExperimentResult cmd_tw_stability(const Config& cfg, const std::string& out_dir);
ExperimentResult cmd_stiff_limit(const Config& cfg, const std::string& out_dir);
ExperimentResult cmd_simulate(const Config& cfg, const std::string& out_dir);

/// manifest.json: schema version, config hash and entries, module versions,
/// operations, outputs, claims, and the empirical thresholds in use.
void write_manifest(const ExperimentResult& r, const Config& cfg, const std::string& out_dir);

}  // namespace ks
