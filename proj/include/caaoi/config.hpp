#pragma once

/**
 * @file config.hpp
 * @brief Experiment description read from a JSON file (schema_version 1),
 *        plus the built-in figure presets.
 *
 * Example:
 *   {
 *     "schema_version": 1,
 *     "system": [{"weight": 1, "p": 0.1, "csi": "unknown"}, ...],
 *     "normalize_weights": true,
 *     "policies": [{"kind": "whittle", "metric": "ca_aoi"}, {"kind": "greedy"}],
 *     "sweep": {"path": "sensors[2].p", "values": [0.0, 0.5, 1.0]},
 *     "horizon": 1000000, "replications": 10, "seed": 1, "output": "out.csv"
 *   }
 *
 * Unknown keys are rejected; every error names the offending field.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "caaoi/core.hpp"
#include "caaoi/metrics.hpp"
#include "caaoi/policies.hpp"
#include "caaoi/sim.hpp"

namespace caaoi {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

struct PolicyEntry {
    PolicySpec spec;
    std::string label;               ///< CSV "policy" column
    std::vector<MetricKind> report;  ///< metrics emitted as rows; defaults to spec.metric
};

struct SweepSpec {
    std::string path;
    std::vector<double> values;
    Csi csi = Csi::Unknown; ///< CSI class of generated systems for the "n" path
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string description;
    SystemSpec system;
    std::vector<PolicyEntry> policies;
    std::optional<SweepSpec> sweep;
    std::uint64_t horizon = 1'000'000;
    std::uint32_t replications = 10;
    std::uint64_t seed = 1;
    std::string output;
};

std::string default_label(const PolicySpec& spec);

PolicyKind parse_policy_kind(const std::string& s);
MetricKind parse_metric(const std::string& s);
Csi parse_csi(const std::string& s);
std::string_view to_string(Csi c);

/// Parses JSON text. Throws ConfigParseError for malformed JSON or wrong
/// types, ValidationError for out-of-range values or unknown keys.
ExperimentConfig parse_config(const std::string& json_text);

/// Reads and parses a file; IoError if it cannot be read.
ExperimentConfig load_config(const std::string& path);

/// Semantic checks shared by files and presets (ValidationError).
void validate_config(const ExperimentConfig& cfg);

/// Canonical JSON echo; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

/// Builds the sim-level sweep request (a one-point sweep when no sweep is set).
SweepRequest to_sweep_request(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

std::vector<std::string> preset_names();
/// Throws ValidationError for an unknown name.
ExperimentConfig preset(const std::string& name);

} // namespace caaoi
