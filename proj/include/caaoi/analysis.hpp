#pragma once

/**
 * @file analysis.hpp
 * @brief Single-arm verification machinery: the decoupled subproblem MDP
 *        with a playing charge, discounted value iteration, threshold and
 *        indexability checks, threshold-policy average costs, numeric
 *        Whittle indices and closed-form transient expected ages.
 *
 * Two average-cost models are provided for a threshold policy ("schedule iff
 * age >= X"):
 *  - threshold_avg_cost: the published closed form C(X, c), used to extract
 *    the index by equalizing C(x, c) = C(x + 1, c);
 *  - threshold_chain_cost: the exact stationary cost of the per-slot chain
 *    that value iteration solves, computed numerically. This one also
 *    covers vanilla AoI, for which no closed form is used.
 */

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "caaoi/core.hpp"
#include "caaoi/metrics.hpp"

namespace caaoi {

/// One sensor, one channel and a charge paid on every scheduling attempt.
/// Ages are truncated at max_age; the increment from max_age self-loops.
struct SingleArmMdp {
    Csi csi_mode = Csi::Unknown;
    double p = 0.5;
    double w = 1.0;
    double charge = 0.0;
    Age max_age = 500;
    MetricKind metric = MetricKind::CaAoi;

    /// States per channel row: max_age + 1.
    Eigen::Index ages() const { return static_cast<Eigen::Index>(max_age) + 1; }
};

/// Discounted values and greedy actions. Unknown-CSI arms have one row of
/// ages; Known-CSI arms store the OFF row first, then the ON row.
struct ValueFunction {
    Csi csi_mode = Csi::Unknown;
    Age max_age = 0;
    Eigen::VectorXd values;
    std::vector<bool> schedule; ///< greedy action per state; ties schedule
    double discount = 0.0;
    long iterations = 0;
    double residual = 0.0;

    Eigen::Index index(Age x, Channel ch = Channel::On) const {
        const Eigen::Index row = (csi_mode == Csi::Known && is_on(ch)) ? max_age + 1 : 0;
        return row + static_cast<Eigen::Index>(x);
    }
    double value(Age x, Channel ch = Channel::On) const { return values[index(x, ch)]; }
    bool schedules(Age x, Channel ch = Channel::On) const {
        return schedule[static_cast<std::size_t>(index(x, ch))];
    }
};

struct ValueIterationOptions {
    double discount = 0.999;
    /// Stop once the sup-norm change of a sweep is <= tol * max(1, |V|_inf).
    double tol = 1e-10;
    long max_iterations = 2'000'000;
};

/// Iterates V_{n+1}(s) = min_a c(s,a) + discount * E[V_n(s')] from V_0 = 0.
ValueFunction value_iterate(const SingleArmMdp& mdp, const ValueIterationOptions& opts = {});

/// First age at which the greedy action schedules (on the ON row for Known
/// arms); empty if it never does within the truncation.
std::optional<Age> schedule_threshold(const ValueFunction& vf);

/// True when the scheduled ages form an upward-closed set on every row.
bool is_threshold_type(const ValueFunction& vf);

/// True when V is non-decreasing in age on every row, up to
/// rel_tol * max(1, |V|_inf).
bool is_nondecreasing_in_age(const ValueFunction& vf, double rel_tol = 1e-12);

// ---------------------------------------------------------------------------
// Published threshold cost and the index it implies
// ---------------------------------------------------------------------------

/// C(X, c) = age_term + c * charge_term.
template <typename Scalar>
struct AffineCost {
    Scalar age_term;
    Scalar charge_term;
    Scalar at(Scalar c) const { return age_term + c * charge_term; }
};

/// Unknown: wX/2 + c(2-p)/(X+1). Known: wX/2 + c/(X+1).
template <typename Scalar>
AffineCost<Scalar> threshold_cost_terms(Csi mode, Age X, Scalar w, Scalar p) {
    const Scalar xs = static_cast<Scalar>(X);
    const Scalar factor = mode == Csi::Unknown ? Scalar(2) - p : Scalar(1);
    return {w * xs / Scalar(2), factor / (xs + Scalar(1))};
}

template <typename Scalar>
Scalar threshold_avg_cost(Csi mode, Age X, Scalar c, Scalar w, Scalar p) {
    return threshold_cost_terms(mode, X, w, p).at(c);
}

/// The charge c solving C(x, c) = C(x + 1, c). Evaluate with Scalar = long
/// double when the result is compared at a precision close to one ulp.
template <typename Scalar>
Scalar numeric_whittle(Csi mode, Age x, Scalar w, Scalar p) {
    if (x < 0)
        throw Error(ErrorCode::DegenerateEquation, "age must be non-negative");
    const auto lo = threshold_cost_terms(mode, x, w, p);
    const auto hi = threshold_cost_terms(mode, x + 1, w, p);
    const Scalar slope = lo.charge_term - hi.charge_term;
    if (!(slope != Scalar(0)))
        throw Error(ErrorCode::DegenerateEquation, "threshold costs are parallel in c");
    return (hi.age_term - lo.age_term) / slope;
}

// ---------------------------------------------------------------------------
// Exact per-slot chain under a threshold policy
// ---------------------------------------------------------------------------

/// Long-run cost of "schedule iff age >= X": age_term is the mean weighted
/// post-action age, charge_term the long-run rate of charged attempts.
AffineCost<double> threshold_chain_cost(const SingleArmMdp& arm, Age threshold);

/// Charge at which thresholds x and x + 1 cost the same on the exact chain.
double chain_whittle(const SingleArmMdp& arm, Age x);

/// chain_whittle for x = 0 .. x_max, computed in one pass.
Eigen::VectorXd chain_whittle_table(const SingleArmMdp& arm, Age x_max);

// ---------------------------------------------------------------------------
// Indexability
// ---------------------------------------------------------------------------

struct IdleSetTrace {
    std::vector<double> charges;
    /// idle[k][s]: greedy action at state s is idle under charges[k].
    std::vector<std::vector<bool>> idle;

    std::size_t idle_count(std::size_t k) const;
};

/// Solves the arm for every charge (ascending) and checks that the idle sets
/// are nested. Throws MonotonicityViolation otherwise.
IdleSetTrace indexability_scan(const SingleArmMdp& arm, std::span<const double> charges,
                               const ValueIterationOptions& opts = {});

// ---------------------------------------------------------------------------
// Transient expected CA-AoI of one sensor under a randomized rule
// ---------------------------------------------------------------------------

/// Scheduled w.p. delta every slot: ((1-delta)/delta)(1 - (1 - p delta)^t).
double expected_age_no_csi(double p, double delta, Age t);

/// Scheduled w.p. alpha on ON slots: (beta/alpha)(1 - (p beta + q)^t),
/// beta = 1 - alpha, q = 1 - p.
double expected_age_csi(double p, double alpha, Age t);

} // namespace caaoi
