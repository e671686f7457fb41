#include "caaoi/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace caaoi {

namespace {

void check_arm(const SingleArmMdp& mdp) {
    if (mdp.max_age < 2)
        throw Error(ErrorCode::ValidationError, "max_age must be at least 2");
    if (!(mdp.p >= 0.0 && mdp.p <= 1.0))
        throw Error(ErrorCode::ProbabilityOutOfRange, "p must lie in [0, 1]");
    if (!(mdp.w > 0.0))
        throw Error(ErrorCode::NonPositiveWeight, "w must be positive");
}

// Value of the successor reached by "age + 1", with the self-loop at the cap.
Eigen::ArrayXd shift_up(const Eigen::ArrayXd& v) {
    const Eigen::Index n = v.size();
    Eigen::ArrayXd out(n);
    out.head(n - 1) = v.tail(n - 1);
    out[n - 1] = v[n - 1];
    return out;
}

} // namespace

ValueFunction value_iterate(const SingleArmMdp& mdp, const ValueIterationOptions& opts) {
    check_arm(mdp);
    if (!(opts.discount > 0.0 && opts.discount < 1.0))
        throw Error(ErrorCode::ValidationError, "discount must lie in (0, 1)");
    if (!(opts.tol > 0.0))
        throw Error(ErrorCode::ValidationError, "tol must be positive");

    const Eigen::Index n = mdp.ages();
    const double p = mdp.p, q = 1.0 - mdp.p, w = mdp.w, c = mdp.charge, g = opts.discount;
    const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1));
    const bool aoi = mdp.metric == MetricKind::VanillaAoi;

    ValueFunction vf;
    vf.csi_mode = mdp.csi_mode;
    vf.max_age = mdp.max_age;
    vf.discount = g;

    if (mdp.csi_mode == Csi::Unknown) {
        Eigen::ArrayXd v = Eigen::ArrayXd::Zero(n), q0(n), q1(n), next(n);
        // Stage costs do not depend on V.
        const Eigen::ArrayXd cost0 = aoi ? Eigen::ArrayXd(w * (x + 1.0)) : Eigen::ArrayXd(w * (x + p));
        const Eigen::ArrayXd cost1 = aoi ? Eigen::ArrayXd(c + w * (x + 1.0) * q) : Eigen::ArrayXd(c + w * x * q);
        for (long it = 1; it <= opts.max_iterations; ++it) {
            const Eigen::ArrayXd up = shift_up(v);
            if (aoi) {
                q0 = cost0 + g * up;
                q1 = cost1 + g * (p * v[0] + q * up);
            } else {
                q0 = cost0 + g * (p * up + q * v);
                q1 = cost1 + g * (p * v[0] + q * v);
            }
            next = q0.min(q1);
            vf.residual = (next - v).abs().maxCoeff();
            v = next;
            vf.iterations = it;
            if (vf.residual <= opts.tol * std::max(1.0, v.abs().maxCoeff()))
                break;
        }
        vf.values = v.matrix();
        vf.schedule.resize(static_cast<std::size_t>(n));
        for (Eigen::Index s = 0; s < n; ++s)
            vf.schedule[static_cast<std::size_t>(s)] = q1[s] <= q0[s];
    } else {
        Eigen::ArrayXd v_off = Eigen::ArrayXd::Zero(n), v_on = Eigen::ArrayXd::Zero(n);
        Eigen::ArrayXd off0(n), off1(n), on0(n), on1(n);
        const Eigen::ArrayXd off_cost = aoi ? Eigen::ArrayXd(w * (x + 1.0)) : Eigen::ArrayXd(w * x);
        const Eigen::ArrayXd on_idle_cost = w * (x + 1.0);
        for (long it = 1; it <= opts.max_iterations; ++it) {
            const Eigen::ArrayXd ev = p * v_on + q * v_off;
            const Eigen::ArrayXd ev_up = shift_up(ev);
            off0 = off_cost + g * (aoi ? ev_up : ev);
            off1 = off0 + c;
            on0 = on_idle_cost + g * ev_up;
            on1 = Eigen::ArrayXd::Constant(n, c + g * ev[0]);
            const Eigen::ArrayXd next_off = off0.min(off1);
            const Eigen::ArrayXd next_on = on0.min(on1);
            vf.residual = std::max((next_off - v_off).abs().maxCoeff(),
                                   (next_on - v_on).abs().maxCoeff());
            v_off = next_off;
            v_on = next_on;
            vf.iterations = it;
            const double scale = std::max({1.0, v_off.abs().maxCoeff(), v_on.abs().maxCoeff()});
            if (vf.residual <= opts.tol * scale)
                break;
        }
        vf.values.resize(2 * n);
        vf.values.head(n) = v_off.matrix();
        vf.values.tail(n) = v_on.matrix();
        vf.schedule.resize(static_cast<std::size_t>(2 * n));
        for (Eigen::Index s = 0; s < n; ++s) {
            vf.schedule[static_cast<std::size_t>(s)] = off1[s] <= off0[s];
            vf.schedule[static_cast<std::size_t>(n + s)] = on1[s] <= on0[s];
        }
    }

    if (vf.residual > opts.tol * std::max(1.0, vf.values.cwiseAbs().maxCoeff()))
        throw Error(ErrorCode::NonConvergence,
                    "value iteration hit " + std::to_string(opts.max_iterations) + " sweeps");
    if (!vf.values.allFinite())
        throw Error(ErrorCode::NonConvergence, "value iteration produced non-finite values");
    return vf;
}

std::optional<Age> schedule_threshold(const ValueFunction& vf) {
    for (Age x = 0; x <= vf.max_age; ++x)
        if (vf.schedules(x, Channel::On))
            return x;
    return std::nullopt;
}

bool is_threshold_type(const ValueFunction& vf) {
    const int rows = vf.csi_mode == Csi::Known ? 2 : 1;
    const auto n = static_cast<std::size_t>(vf.max_age + 1);
    for (int r = 0; r < rows; ++r) {
        bool seen = false;
        for (std::size_t x = 0; x < n; ++x) {
            const bool s = vf.schedule[r * n + x];
            if (seen && !s)
                return false;
            seen = seen || s;
        }
    }
    return true;
}

bool is_nondecreasing_in_age(const ValueFunction& vf, double rel_tol) {
    const double slack = rel_tol * std::max(1.0, vf.values.cwiseAbs().maxCoeff());
    const int rows = vf.csi_mode == Csi::Known ? 2 : 1;
    const Eigen::Index n = vf.max_age + 1;
    for (int r = 0; r < rows; ++r)
        for (Eigen::Index x = 1; x < n; ++x)
            if (vf.values[r * n + x] < vf.values[r * n + x - 1] - slack)
                return false;
    return true;
}

// ---------------------------------------------------------------------------

AffineCost<double> threshold_chain_cost(const SingleArmMdp& arm, Age threshold) {
    if (!(arm.p > 0.0 && arm.p <= 1.0))
        throw Error(ErrorCode::NonPositiveProbability, "chain cost needs p in (0, 1]");
    if (!(arm.w > 0.0))
        throw Error(ErrorCode::NonPositiveWeight, "w must be positive");
    if (threshold < 0)
        throw Error(ErrorCode::ValidationError, "threshold must be non-negative");

    const double p = arm.p, q = 1.0 - arm.p, w = arm.w;
    const bool aoi = arm.metric == MetricKind::VanillaAoi;
    // Charged attempts per active slot: every slot without CSI, ON slots with.
    const double attempts = arm.csi_mode == Csi::Unknown ? 1.0 : p;

    // Under CA-AoI the age never passes the threshold. Under AoI it keeps
    // growing on failures; keep enough tail that (1-p)^tail is negligible.
    Age last = threshold;
    if (aoi && q > 0.0) {
        const double tail = std::ceil(std::log(1e-20) / std::log(q));
        last = threshold + static_cast<Age>(std::min(tail, 1e7)) + 1;
    }

    // Skip-free chain: each age moves up by one, stays, or resets to 0. The
    // stationary weights follow pi[y] (1 - stay[y]) = pi[y-1] up[y-1].
    double mass = 0.0, age_cost = 0.0, active = 0.0;
    double pi = 1.0, prev_up = 0.0;
    for (Age y = 0; y <= last; ++y) {
        const bool act = y >= threshold;
        const double ys = static_cast<double>(y);
        double up, stay, stage;
        if (!aoi) {
            up = act ? 0.0 : p;
            stay = q;
            stage = act ? w * ys * q : w * (ys + p);
        } else {
            up = act ? q : 1.0;
            stay = 0.0;
            stage = act ? w * (ys + 1.0) * q : w * (ys + 1.0);
        }
        if (y == last) {
            stay += up;
            up = 0.0;
        }
        if (y > 0) {
            const double leave = 1.0 - stay;
            if (!(leave > 0.0))
                throw Error(ErrorCode::DegenerateEquation, "absorbing state in threshold chain");
            pi = pi * prev_up / leave;
        }
        mass += pi;
        age_cost += pi * stage;
        if (act)
            active += pi * attempts;
        prev_up = up;
    }
    return {age_cost / mass, active / mass};
}

double chain_whittle(const SingleArmMdp& arm, Age x) {
    const auto lo = threshold_chain_cost(arm, x);
    const auto hi = threshold_chain_cost(arm, x + 1);
    const double slope = lo.charge_term - hi.charge_term;
    if (!(slope > 0.0))
        throw Error(ErrorCode::DegenerateEquation, "threshold chain costs are parallel in c");
    return (hi.age_term - lo.age_term) / slope;
}

Eigen::VectorXd chain_whittle_table(const SingleArmMdp& arm, Age x_max) {
    if (x_max < 0)
        throw Error(ErrorCode::ValidationError, "x_max must be non-negative");
    Eigen::VectorXd out(x_max + 1);
    auto lo = threshold_chain_cost(arm, 0);
    for (Age x = 0; x <= x_max; ++x) {
        const auto hi = threshold_chain_cost(arm, x + 1);
        const double slope = lo.charge_term - hi.charge_term;
        if (!(slope > 0.0))
            throw Error(ErrorCode::DegenerateEquation, "threshold chain costs are parallel in c");
        out[x] = (hi.age_term - lo.age_term) / slope;
        lo = hi;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::size_t IdleSetTrace::idle_count(std::size_t k) const {
    return static_cast<std::size_t>(std::count(idle[k].begin(), idle[k].end(), true));
}

IdleSetTrace indexability_scan(const SingleArmMdp& arm, std::span<const double> charges,
                               const ValueIterationOptions& opts) {
    if (!std::is_sorted(charges.begin(), charges.end()))
        throw Error(ErrorCode::ValidationError, "charges must be sorted ascending");
    IdleSetTrace trace;
    SingleArmMdp m = arm;
    for (double c : charges) {
        m.charge = c;
        const ValueFunction vf = value_iterate(m, opts);
        std::vector<bool> idle(vf.schedule.size());
        for (std::size_t s = 0; s < idle.size(); ++s)
            idle[s] = !vf.schedule[s];
        if (!trace.idle.empty()) {
            const auto& prev = trace.idle.back();
            for (std::size_t s = 0; s < idle.size(); ++s)
                if (prev[s] && !idle[s])
                    throw Error(ErrorCode::MonotonicityViolation,
                                "idle set shrank between charges " +
                                    std::to_string(trace.charges.back()) + " and " +
                                    std::to_string(c));
        }
        trace.charges.push_back(c);
        trace.idle.push_back(std::move(idle));
    }
    return trace;
}

// ---------------------------------------------------------------------------

double expected_age_no_csi(double p, double delta, Age t) {
    if (!(delta > 0.0))
        throw Error(ErrorCode::ZeroDelta, "delta must be positive");
    const double decay = 1.0 - p * delta;
    return (1.0 - delta) / delta * (1.0 - std::pow(decay, static_cast<double>(t)));
}

double expected_age_csi(double p, double alpha, Age t) {
    if (!(alpha > 0.0))
        throw Error(ErrorCode::ZeroAlpha, "alpha must be positive");
    const double beta = 1.0 - alpha;
    const double q = 1.0 - p;
    return beta / alpha * (1.0 - std::pow(p * beta + q, static_cast<double>(t)));
}

} // namespace caaoi
