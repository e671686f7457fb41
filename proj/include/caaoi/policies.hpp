#pragma once

/**
 * @file policies.hpp
 * @brief Scheduling policies behind one decision interface, plus the
 *        closed-form Whittle indices and the randomized-policy solvers.
 *
 * Every argmax breaks ties toward the lowest sensor index.
 */

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "caaoi/core.hpp"
#include "caaoi/metrics.hpp"
#include "caaoi/rng.hpp"

namespace caaoi {

// ---------------------------------------------------------------------------
// Closed-form Whittle indices
// ---------------------------------------------------------------------------

/// Index of a sensor without CSI at CA-AoI x: w(x+1)(x+2) / (2(2-p)).
template <typename Scalar>
Scalar whittle_index_no_csi(Age x, Scalar p, Scalar w) {
    const Scalar xs = static_cast<Scalar>(x);
    return w * (xs + 1) * (xs + 2) / (Scalar(2) * (Scalar(2) - p));
}

/// Index of a sensor with CSI: w(x+1)(x+2)/2 when its channel is ON, else 0.
template <typename Scalar>
Scalar whittle_index_csi(Age x, Channel channel, Scalar w) {
    if (!is_on(channel))
        return Scalar(0);
    const Scalar xs = static_cast<Scalar>(x);
    return w * (xs + 1) * (xs + 2) / Scalar(2);
}

// ---------------------------------------------------------------------------
// Randomized policy parameters
// ---------------------------------------------------------------------------

/// deltas follow the Unknown-CSI sensors in index order, alphas the
/// Known-CSI sensors in index order.
struct RandomizedParams {
    Eigen::VectorXd deltas;
    Eigen::VectorXd alphas;
    double lambda_star = 0.0;
};

/// Bernoulli rates for sensors without CSI; they sum to one.
Eigen::VectorXd solve_randomized_no_csi(const Eigen::VectorXd& weights);

/// ON-gated rates for sensors with CSI. Rates that reach one are clamped and
/// their p leaves the budget, then the rest are re-solved.
Eigen::VectorXd solve_randomized_csi(const Eigen::VectorXd& weights, const Eigen::VectorXd& probs,
                                     double* lambda_star = nullptr);

/// Joint solve for a partial-CSI system under sum(delta) + sum(p alpha) = 1.
RandomizedParams solve_randomized_partial(const Eigen::VectorXd& weights_unknown,
                                          const Eigen::VectorXd& weights_known,
                                          const Eigen::VectorXd& probs_known);

/// Solves for a whole system. Known-CSI sensors with p = 0 never see an ON
/// slot; they are left out of the solve and given alpha = 1.
RandomizedParams solve_randomized_for(const SystemSpec& spec);

/// sum w(1-delta)/delta over no-CSI sensors + sum w(1-alpha)/alpha over CSI
/// sensors.
double closed_form_cost(const RandomizedParams& params, const Eigen::VectorXd& weights_unknown,
                        const Eigen::VectorXd& weights_known);
double closed_form_cost(const RandomizedParams& params, const SystemSpec& spec);

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

enum class PolicyKind : std::uint8_t { Whittle, Randomized, Greedy, MaxThroughput };

std::string_view to_string(PolicyKind k);

/// Greedy rule for sensors with CSI: score only ON sensors (default) or any.
enum class GreedyCsiRule : std::uint8_t { OnOnly, Any };

struct PolicySpec {
    PolicyKind kind = PolicyKind::Whittle;
    /// The age the policy observes and optimizes.
    MetricKind metric = MetricKind::CaAoi;
    GreedyCsiRule greedy_rule = GreedyCsiRule::OnOnly;
};

class Policy {
public:
    virtual ~Policy() = default;

    /// `streams` holds one policy-randomization substream per sensor.
    virtual ScheduleDecision decide(const Observation& obs, std::span<RngStream> streams) = 0;
    virtual void reset() {}
    virtual std::unique_ptr<Policy> clone() const = 0;
    virtual std::string name() const = 0;
};

/// Highest Whittle index wins; idles when every index is 0. With
/// metric = VanillaAoi the indices come from the numeric AoI index tables.
std::unique_ptr<Policy> whittle_policy(const SystemSpec& spec,
                                       MetricKind metric = MetricKind::CaAoi);

/// Each no-CSI sensor volunteers w.p. delta, each ON CSI sensor w.p. alpha;
/// the volunteer with the largest weighted age is scheduled.
std::unique_ptr<Policy> randomized_policy(const RandomizedParams& params, const SystemSpec& spec);

std::unique_ptr<Policy> greedy_policy(const SystemSpec& spec,
                                      GreedyCsiRule rule = GreedyCsiRule::OnOnly);

/// Always the sensor with the largest p.
std::unique_ptr<Policy> max_throughput_policy(const SystemSpec& spec);

std::unique_ptr<Policy> make_policy(const PolicySpec& policy, const SystemSpec& spec);

} // namespace caaoi
