#include "caaoi/metrics.hpp"

namespace caaoi {

std::string_view to_string(MetricKind m) {
    return m == MetricKind::CaAoi ? "ca_aoi" : "aoi";
}

void accumulate(RunAccumulator& acc, std::span<const Age> ages, const ScheduleDecision& decision,
                std::span<const Channel> channels, const Eigen::VectorXd& weights) {
    const std::size_t n = ages.size();
    if (channels.size() != n || static_cast<std::size_t>(weights.size()) != n ||
        acc.scheduled_counts.size() != n)
        throw Error(ErrorCode::LengthMismatch, "accumulate: dimensions disagree");

    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += weights[static_cast<Eigen::Index>(i)] * static_cast<double>(ages[i]);
    acc.cum_weighted_age += s;

    if (decision.scheduled) {
        const std::size_t i = *decision.scheduled;
        if (i >= n)
            throw Error(ErrorCode::LengthMismatch, "accumulate: decision out of range");
        ++acc.scheduled_counts[i];
        if (is_on(channels[i]))
            ++acc.successful_updates;
    }
    ++acc.slots;
}

RunSummary finalize(const RunAccumulator& acc) {
    if (acc.slots == 0)
        throw Error(ErrorCode::ZeroSlots, "finalize: no slots accumulated");
    const double t = static_cast<double>(acc.slots);
    RunSummary out;
    out.avg_weighted_age = acc.cum_weighted_age / t;
    out.throughput = static_cast<double>(acc.successful_updates) / t;
    out.resource_fractions.resize(static_cast<Eigen::Index>(acc.scheduled_counts.size()));
    for (std::size_t i = 0; i < acc.scheduled_counts.size(); ++i)
        out.resource_fractions[static_cast<Eigen::Index>(i)] =
            static_cast<double>(acc.scheduled_counts[i]) / t;
    return out;
}

} // namespace caaoi
