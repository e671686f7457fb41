#pragma once

/**
 * @file sim.hpp
 * @brief Seeded slotted simulation: i.i.d. ON/OFF channels, CSI revealed per
 *        sensor class, one policy decision per slot, and both age metrics
 *        accumulated over the horizon.
 *
 * Stream layout: replication r uses the key derive_key(seed, Replication, r);
 * sensor i draws its channel from substream(key, Channel, i) and its policy
 * randomization from substream(key, Policy, i). Channel draws therefore do not
 * depend on the policy, which gives common random numbers across policies.
 */

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "caaoi/core.hpp"
#include "caaoi/metrics.hpp"
#include "caaoi/policies.hpp"

namespace caaoi {

struct SimConfig {
    SystemSpec spec;
    PolicySpec policy;
    /// Metric reported in RunReport::avg_weighted_age and std_error.
    MetricKind metric = MetricKind::CaAoi;
    std::uint64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    std::uint32_t replications = 10;
};

struct MetricStats {
    double avg_weighted_age = 0.0;
    double std_error = 0.0;
};

/// Replication averages. std_error is the sample standard deviation across
/// replications over sqrt(replications), and 0 for a single replication.
struct RunReport {
    MetricKind metric = MetricKind::CaAoi;
    double avg_weighted_age = 0.0;
    double std_error = 0.0;
    double throughput = 0.0;
    double throughput_std_error = 0.0;
    Eigen::VectorXd resource_fractions;
    std::vector<std::uint64_t> seeds_used;
    /// Both metrics, indexed by MetricKind.
    std::array<MetricStats, 2> by_metric{};

    const MetricStats& stats(MetricKind m) const { return by_metric[static_cast<std::size_t>(m)]; }
};

/// Outcome of a single replication.
struct ReplicationResult {
    std::array<double, 2> avg_weighted_age{}; ///< indexed by MetricKind
    double throughput = 0.0;
    Eigen::VectorXd resource_fractions;
};

/// Called after every decision with the slot, the true channels and the
/// decision. Meant for tests and tracing.
using SlotObserver =
    std::function<void(std::uint64_t slot, std::span<const Channel>, const ScheduleDecision&)>;

/// Simulates decision slots t = 0..T-1 from all-zero ages. The weighted age
/// is sampled after each transition, i.e. at t = 1..T, giving T samples.
/// `policy_metric` selects which age the policy observes.
ReplicationResult simulate_replication(const SystemSpec& spec, Policy& policy,
                                       MetricKind policy_metric, std::uint64_t horizon,
                                       std::uint64_t replication_key,
                                       const SlotObserver& observer = {});

std::uint64_t replication_key(std::uint64_t seed, std::uint32_t replication);

RunReport summarize(const std::vector<ReplicationResult>& reps, MetricKind metric,
                    std::vector<std::uint64_t> seeds_used);

/// Runs config.replications replications of config.policy.
RunReport run(const SimConfig& config, unsigned jobs = 1);

/// Same, with a caller-built policy that is cloned per replication.
RunReport run(const SimConfig& config, const Policy& prototype, unsigned jobs = 1);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// Addresses a swept field: "sensors[k].p", "sensors[k].weight", or "n" (a
/// fresh random system of that size).
struct ParameterPath {
    enum class Kind : std::uint8_t { SensorProb, SensorWeight, SystemSize };
    Kind kind = Kind::SensorProb;
    std::size_t sensor = 0;

    static ParameterPath parse(const std::string& text);
    std::string str() const;
};

/// A random system of `n` sensors: weights uniform on [1, 100], channel
/// probabilities uniform on [0, 1], weights normalized. Drawn from a
/// dedicated substream of `seed` keyed by n, independent of simulation noise.
SystemSpec random_system(std::size_t n, std::uint64_t seed, Csi csi);

/// The system at one sweep point.
SystemSpec apply_path(const SystemSpec& base, const ParameterPath& path, double value,
                      std::uint64_t seed, Csi generated_csi = Csi::Unknown);

struct SweepRequest {
    SystemSpec base;
    std::vector<PolicySpec> policies;
    ParameterPath path;
    std::vector<double> values;
    Csi generated_csi = Csi::Unknown; ///< CSI class of generated systems ("n" sweeps)
    std::uint64_t horizon = 1'000'000;
    std::uint64_t seed = 1;
    std::uint32_t replications = 10;
};

struct SweepPoint {
    double value = 0.0;
    SystemSpec system;            ///< validated system used at this point
    std::vector<RunReport> reports; ///< one per requested policy, in order
};

/// Every (point, policy, replication) is an independent task. Results are
/// assembled by key, so the output does not depend on `jobs`.
std::vector<SweepPoint> sweep(const SweepRequest& request, unsigned jobs = 1);

/// Runs fn(0..count-1) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

} // namespace caaoi
