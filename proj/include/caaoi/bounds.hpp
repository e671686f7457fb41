#pragma once

/// Universal lower bounds on the long-run weighted CA-AoI of any
/// non-starving policy.

#include <algorithm>

#include <Eigen/Dense>

#include "caaoi/core.hpp"

namespace caaoi {

namespace detail {
template <typename A, typename B>
void check_same_length(const Eigen::DenseBase<A>& w, const Eigen::DenseBase<B>& p) {
    if (w.size() != p.size())
        throw Error(ErrorCode::LengthMismatch, "weights and probabilities differ in length");
}
} // namespace detail

/// No-CSI bound: ((sum sqrt(w p))^2 - sum w p) / 2, floored at 0.
template <typename A, typename B>
typename A::Scalar lower_bound_no_csi(const Eigen::DenseBase<A>& weights,
                                      const Eigen::DenseBase<B>& probs) {
    using Scalar = typename A::Scalar;
    detail::check_same_length(weights, probs);
    const auto r = (weights.derived().array() * probs.derived().array().template cast<Scalar>()).sqrt();
    const Scalar root_sum = r.sum();
    // Same value as (root_sum^2 - sum(w p)) / 2, but a sum of non-negative
    // cross terms: exactly 0 for a single sensor, no cancellation.
    return std::max(Scalar(0), (r * (root_sum - r)).sum() / Scalar(2));
}

/// CSI bound: ((sum sqrt(w) p)^2 - sum w p) / 2, floored at 0. Here p sits
/// outside the square root.
template <typename A, typename B>
typename A::Scalar lower_bound_csi(const Eigen::DenseBase<A>& weights,
                                   const Eigen::DenseBase<B>& probs) {
    using Scalar = typename A::Scalar;
    detail::check_same_length(weights, probs);
    const auto w = weights.derived().array();
    const auto p = probs.derived().array().template cast<Scalar>();
    const Scalar root_sum = (w.sqrt() * p).sum();
    return std::max(Scalar(0), (root_sum * root_sum - (w * p).sum()) / Scalar(2));
}

struct BoundReport {
    double value = 0.0;
    double no_csi = 0.0; ///< contribution of Unknown-CSI sensors
    double csi = 0.0;    ///< contribution of Known-CSI sensors
};

/// Sum of the two bounds over the respective CSI classes. Uses the spec's
/// effective weights.
BoundReport lower_bound_partial(const SystemSpec& spec);

} // namespace caaoi
