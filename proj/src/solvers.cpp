#include <cmath>
#include <vector>

#include "caaoi/policies.hpp"

namespace caaoi {

namespace {

void require_positive_weights(const Eigen::VectorXd& w) {
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (!(w[i] > 0.0))
            throw Error(ErrorCode::NonPositiveWeight, "solver weights must be positive");
}

void require_positive_probs(const Eigen::VectorXd& p) {
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (!(p[i] > 0.0) || p[i] > 1.0)
            throw Error(ErrorCode::NonPositiveProbability,
                        "solver channel probabilities must lie in (0, 1]");
}

struct ActiveSetResult {
    double sqrt_lambda = 0.0;
    double remaining_budget = 1.0;
    std::vector<bool> active;
};

// Shared clamping loop. `base` is the contribution of the never-clamped
// no-CSI sensors to sqrt(lambda) * R.
ActiveSetResult clamp_loop(double base, const Eigen::VectorXd& w, const Eigen::VectorXd& p,
                           Eigen::VectorXd& alphas) {
    const Eigen::Index n = w.size();
    ActiveSetResult r;
    r.active.assign(static_cast<std::size_t>(n), true);
    alphas.resize(n);
    std::size_t active_count = static_cast<std::size_t>(n);

    while (active_count > 0) {
        bool violation = false;
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (r.active[static_cast<std::size_t>(i)])
                sum += std::sqrt(w[i] * p[i]);
        r.sqrt_lambda = base / r.remaining_budget + sum / r.remaining_budget;

        for (Eigen::Index i = 0; i < n; ++i) {
            if (!r.active[static_cast<std::size_t>(i)])
                continue;
            // sqrt(w / (p lambda)) written so that exact ties land on 1.
            alphas[i] = std::sqrt(w[i] * p[i]) / (p[i] * r.sqrt_lambda);
            if (alphas[i] >= 1.0) {
                alphas[i] = 1.0;
                violation = true;
                r.remaining_budget -= p[i];
                r.active[static_cast<std::size_t>(i)] = false;
                --active_count;
            }
        }
        if (!violation)
            break;
    }
    return r;
}

} // namespace

Eigen::VectorXd solve_randomized_no_csi(const Eigen::VectorXd& weights) {
    if (weights.size() == 0)
        throw Error(ErrorCode::EmptySet, "no sensors to solve for");
    require_positive_weights(weights);
    const double sqrt_lambda = weights.array().sqrt().sum();
    return weights.array().sqrt() / sqrt_lambda;
}

Eigen::VectorXd solve_randomized_csi(const Eigen::VectorXd& weights, const Eigen::VectorXd& probs,
                                     double* lambda_star) {
    if (weights.size() == 0)
        throw Error(ErrorCode::EmptySet, "no sensors to solve for");
    if (weights.size() != probs.size())
        throw Error(ErrorCode::LengthMismatch, "weights and probabilities differ in length");
    require_positive_weights(weights);
    require_positive_probs(probs);

    Eigen::VectorXd alphas;
    const ActiveSetResult r = clamp_loop(0.0, weights, probs, alphas);
    if (lambda_star)
        *lambda_star = r.sqrt_lambda * r.sqrt_lambda;
    return alphas;
}

RandomizedParams solve_randomized_partial(const Eigen::VectorXd& weights_unknown,
                                          const Eigen::VectorXd& weights_known,
                                          const Eigen::VectorXd& probs_known) {
    if (weights_unknown.size() + weights_known.size() == 0)
        throw Error(ErrorCode::EmptySet, "no sensors to solve for");
    if (weights_known.size() != probs_known.size())
        throw Error(ErrorCode::LengthMismatch, "weights and probabilities differ in length");
    require_positive_weights(weights_unknown);
    require_positive_weights(weights_known);
    require_positive_probs(probs_known);

    RandomizedParams out;
    const double base = weights_unknown.array().sqrt().sum();
    ActiveSetResult r = clamp_loop(base, weights_known, probs_known, out.alphas);

    // When the last pass clamped every remaining CSI sensor, lambda was
    // computed before those removals; re-solve it on the final budget so the
    // no-CSI rates use the budget that is actually left.
    bool any_active = false;
    for (bool a : r.active)
        any_active = any_active || a;
    if (!any_active && weights_unknown.size() > 0)
        r.sqrt_lambda = base / r.remaining_budget;

    out.deltas = weights_unknown.array().sqrt() / r.sqrt_lambda;
    out.lambda_star = r.sqrt_lambda * r.sqrt_lambda;
    return out;
}

RandomizedParams solve_randomized_for(const SystemSpec& spec) {
    const Eigen::VectorXd w = spec.weights();
    const Eigen::VectorXd p = spec.probs();
    const auto unknown = spec.indices_with(Csi::Unknown);
    const auto known = spec.indices_with(Csi::Known);

    std::vector<std::size_t> solvable;
    for (std::size_t i : known)
        if (p[static_cast<Eigen::Index>(i)] > 0.0)
            solvable.push_back(i);

    Eigen::VectorXd wu(static_cast<Eigen::Index>(unknown.size()));
    for (std::size_t k = 0; k < unknown.size(); ++k)
        wu[static_cast<Eigen::Index>(k)] = w[static_cast<Eigen::Index>(unknown[k])];
    Eigen::VectorXd wk(static_cast<Eigen::Index>(solvable.size()));
    Eigen::VectorXd pk(static_cast<Eigen::Index>(solvable.size()));
    for (std::size_t k = 0; k < solvable.size(); ++k) {
        wk[static_cast<Eigen::Index>(k)] = w[static_cast<Eigen::Index>(solvable[k])];
        pk[static_cast<Eigen::Index>(k)] = p[static_cast<Eigen::Index>(solvable[k])];
    }

    RandomizedParams out;
    if (wu.size() + wk.size() > 0) {
        out = solve_randomized_partial(wu, wk, pk);
    } else {
        out.deltas.resize(0);
    }

    Eigen::VectorXd alphas = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(known.size()));
    for (std::size_t k = 0, s = 0; k < known.size(); ++k)
        if (s < solvable.size() && solvable[s] == known[k])
            alphas[static_cast<Eigen::Index>(k)] = out.alphas[static_cast<Eigen::Index>(s++)];
    out.alphas = alphas;
    return out;
}

double closed_form_cost(const RandomizedParams& params, const Eigen::VectorXd& weights_unknown,
                        const Eigen::VectorXd& weights_known) {
    if (params.deltas.size() != weights_unknown.size() ||
        params.alphas.size() != weights_known.size())
        throw Error(ErrorCode::ParamMismatch, "parameter and weight counts differ");
    if ((params.deltas.array() <= 0.0).any() || (params.alphas.array() <= 0.0).any())
        throw Error(ErrorCode::ZeroParam, "rates must be positive");
    const auto d = params.deltas.array();
    const auto a = params.alphas.array();
    return (weights_unknown.array() * (1.0 - d) / d).sum() +
           (weights_known.array() * (1.0 - a) / a).sum();
}

double closed_form_cost(const RandomizedParams& params, const SystemSpec& spec) {
    const Eigen::VectorXd w = spec.weights();
    const auto unknown = spec.indices_with(Csi::Unknown);
    const auto known = spec.indices_with(Csi::Known);
    Eigen::VectorXd wu(static_cast<Eigen::Index>(unknown.size()));
    Eigen::VectorXd wk(static_cast<Eigen::Index>(known.size()));
    for (std::size_t k = 0; k < unknown.size(); ++k)
        wu[static_cast<Eigen::Index>(k)] = w[static_cast<Eigen::Index>(unknown[k])];
    for (std::size_t k = 0; k < known.size(); ++k)
        wk[static_cast<Eigen::Index>(k)] = w[static_cast<Eigen::Index>(known[k])];
    return closed_form_cost(params, wu, wk);
}

} // namespace caaoi
