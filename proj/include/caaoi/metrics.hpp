#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "caaoi/core.hpp"

namespace caaoi {

enum class MetricKind : std::uint8_t { CaAoi, VanillaAoi };

std::string_view to_string(MetricKind m);

/// Channel-aware age: reset on a successful update, grow only on an ON slot
/// the sensor did not get, freeze on OFF slots.
constexpr Age ca_aoi_step(Age x, bool scheduled, Channel channel) {
    if (!is_on(channel))
        return x;
    return scheduled ? 0 : x + 1;
}

/// Vanilla age: reset on a successful update, otherwise grow by one.
constexpr Age aoi_step(Age x, bool scheduled, Channel channel) {
    return (scheduled && is_on(channel)) ? 0 : x + 1;
}

constexpr Age age_step(MetricKind m, Age x, bool scheduled, Channel channel) {
    return m == MetricKind::CaAoi ? ca_aoi_step(x, scheduled, channel)
                                  : aoi_step(x, scheduled, channel);
}

struct RunAccumulator {
    double cum_weighted_age = 0.0;
    std::uint64_t successful_updates = 0;
    std::vector<std::uint64_t> scheduled_counts;
    std::uint64_t slots = 0;

    explicit RunAccumulator(std::size_t n = 0) : scheduled_counts(n, 0) {}
};

/// Adds one slot. `ages` are the ages at the start of the slot, before the
/// slot's transition is applied.
void accumulate(RunAccumulator& acc, std::span<const Age> ages, const ScheduleDecision& decision,
                std::span<const Channel> channels, const Eigen::VectorXd& weights);

struct RunSummary {
    double avg_weighted_age = 0.0;
    double throughput = 0.0;
    Eigen::VectorXd resource_fractions;
};

RunSummary finalize(const RunAccumulator& acc);

} // namespace caaoi
