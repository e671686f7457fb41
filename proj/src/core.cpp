#include "caaoi/core.hpp"

#include <cmath>
#include <string>

namespace caaoi {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::EmptySystem: return "EmptySystem";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroSlots: return "ZeroSlots";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NonPositiveProbability: return "NonPositiveProbability";
    case ErrorCode::ParamMismatch: return "ParamMismatch";
    case ErrorCode::ZeroParam: return "ZeroParam";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateEquation: return "DegenerateEquation";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::ZeroDelta: return "ZeroDelta";
    case ErrorCode::ZeroAlpha: return "ZeroAlpha";
    case ErrorCode::PolicySpecMismatch: return "PolicySpecMismatch";
    case ErrorCode::ZeroHorizon: return "ZeroHorizon";
    case ErrorCode::BadParameterPath: return "BadParameterPath";
    case ErrorCode::ConfigParseError: return "ConfigParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Eigen::VectorXd SystemSpec::weights() const {
    Eigen::VectorXd w(static_cast<Eigen::Index>(sensors.size()));
    for (std::size_t i = 0; i < sensors.size(); ++i)
        w[static_cast<Eigen::Index>(i)] = sensors[i].weight;
    if (normalize_weights && w.size() > 0)
        w /= w.sum();
    return w;
}

Eigen::VectorXd SystemSpec::probs() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(sensors.size()));
    for (std::size_t i = 0; i < sensors.size(); ++i)
        p[static_cast<Eigen::Index>(i)] = sensors[i].channel_on_prob;
    return p;
}

std::vector<std::size_t> SystemSpec::indices_with(Csi csi) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sensors.size(); ++i)
        if (sensors[i].csi == csi)
            out.push_back(i);
    return out;
}

bool SystemSpec::has(Csi csi) const {
    for (const auto& s : sensors)
        if (s.csi == csi)
            return true;
    return false;
}

SystemSpec validate(const SystemSpec& spec) {
    if (spec.sensors.empty())
        throw Error(ErrorCode::EmptySystem, "system has no sensors");
    for (std::size_t i = 0; i < spec.sensors.size(); ++i) {
        const auto& s = spec.sensors[i];
        if (!(s.weight > 0.0) || !std::isfinite(s.weight))
            throw Error(ErrorCode::NonPositiveWeight,
                        "sensors[" + std::to_string(i) + "].weight must be positive");
        if (!(s.channel_on_prob >= 0.0 && s.channel_on_prob <= 1.0))
            throw Error(ErrorCode::ProbabilityOutOfRange,
                        "sensors[" + std::to_string(i) + "].p must lie in [0, 1]");
    }
    SystemSpec out = spec;
    if (out.normalize_weights) {
        const Eigen::VectorXd w = spec.weights();
        for (std::size_t i = 0; i < out.sensors.size(); ++i)
            out.sensors[i].weight = w[static_cast<Eigen::Index>(i)];
        out.normalize_weights = false;
    }
    return out;
}

Observation make_observation(const SystemSpec& spec, std::span<const Age> ages,
                             std::span<const Channel> channels) {
    Observation obs;
    refresh_observation(obs, spec, ages, channels);
    return obs;
}

void refresh_observation(Observation& obs, const SystemSpec& spec, std::span<const Age> ages,
                         std::span<const Channel> channels) {
    const std::size_t n = spec.size();
    if (ages.size() != n || channels.size() != n)
        throw Error(ErrorCode::LengthMismatch, "state does not match system size");
    obs.ages.assign(ages.begin(), ages.end());
    obs.known_channels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.sensors[i].csi == Csi::Known)
            obs.known_channels[i] = channels[i];
        else
            obs.known_channels[i].reset();
    }
}

} // namespace caaoi
