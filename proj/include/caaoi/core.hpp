#pragma once

/**
 * @file core.hpp
 * @brief Domain types shared by every module: the sensor system, per-slot
 *        state, what the scheduler is allowed to see, and its decision.
 *
 * Sensors are identified by their position in SystemSpec::sensors.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "caaoi/error.hpp"

namespace caaoi {

using Age = std::int64_t;

enum class Csi : std::uint8_t { Unknown, Known };

enum class Channel : std::uint8_t { Off = 0, On = 1 };

constexpr bool is_on(Channel c) { return c == Channel::On; }

struct SensorSpec {
    double weight = 1.0;
    double channel_on_prob = 1.0;
    Csi csi = Csi::Unknown;
};

/// A system description. `weights()` returns the effective weights, which are
/// the raw weights rescaled to sum to one when `normalize_weights` is set.
/// Construct through validate() to get the normalized, checked form.
struct SystemSpec {
    std::vector<SensorSpec> sensors;
    bool normalize_weights = false;

    std::size_t size() const { return sensors.size(); }
    Eigen::VectorXd weights() const;
    Eigen::VectorXd probs() const;
    /// Sensor indices with the given CSI availability, in ascending order.
    std::vector<std::size_t> indices_with(Csi csi) const;
    bool has(Csi csi) const;
};

/// Checks every field. The returned spec stores effective weights directly
/// (normalized if requested) and has normalize_weights cleared.
SystemSpec validate(const SystemSpec& spec);

struct SystemState {
    std::vector<Age> ages;
    std::vector<Channel> channels;
    std::uint64_t slot = 0;

    explicit SystemState(std::size_t n = 0) : ages(n, 0), channels(n, Channel::Off) {}
};

/// Idle when `scheduled` is empty.
struct ScheduleDecision {
    std::optional<std::size_t> scheduled;

    static ScheduleDecision idle() { return {}; }
    static ScheduleDecision sensor(std::size_t i) { return {i}; }
    bool is_idle() const { return !scheduled.has_value(); }
    bool operator==(const ScheduleDecision&) const = default;
};

/// What a policy may read: all ages, and the current channel realization
/// only for Known-CSI sensors.
struct Observation {
    std::vector<Age> ages;
    std::vector<std::optional<Channel>> known_channels;

    std::size_t size() const { return ages.size(); }
};

Observation make_observation(const SystemSpec& spec, std::span<const Age> ages,
                             std::span<const Channel> channels);

/// Refreshes `obs` in place; used by the simulation loop to avoid reallocating.
void refresh_observation(Observation& obs, const SystemSpec& spec, std::span<const Age> ages,
                         std::span<const Channel> channels);

} // namespace caaoi
