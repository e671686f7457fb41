#include "caaoi/policies.hpp"

#include <limits>
#include <vector>

#include "caaoi/analysis.hpp"

namespace caaoi {

std::string_view to_string(PolicyKind k) {
    switch (k) {
    case PolicyKind::Whittle: return "whittle";
    case PolicyKind::Randomized: return "randomized";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::MaxThroughput: return "max_throughput";
    }
    return "unknown";
}

namespace {

void check_observation(const Observation& obs, std::size_t n) {
    if (obs.ages.size() != n || obs.known_channels.size() != n)
        throw Error(ErrorCode::PolicySpecMismatch, "observation does not match the system size");
}

// Tables of numeric AoI indices, one per sensor, shared by clones.
struct AoiIndexTables {
    static constexpr Age kTableAges = 2048;
    std::vector<SingleArmMdp> arms;
    std::vector<Eigen::VectorXd> tables;

    double index(std::size_t i, Age x) const {
        const auto& t = tables[i];
        if (x < t.size())
            return t[x];
        return chain_whittle(arms[i], x);
    }
};

class WhittlePolicy final : public Policy {
public:
    WhittlePolicy(const SystemSpec& spec, MetricKind metric)
        : w_(spec.weights()), p_(spec.probs()), metric_(metric) {
        csi_.reserve(spec.size());
        for (const auto& s : spec.sensors)
            csi_.push_back(s.csi);
        if (metric == MetricKind::VanillaAoi) {
            auto tables = std::make_shared<AoiIndexTables>();
            for (std::size_t i = 0; i < spec.size(); ++i) {
                SingleArmMdp arm;
                arm.csi_mode = csi_[i];
                arm.p = p_[static_cast<Eigen::Index>(i)];
                arm.w = w_[static_cast<Eigen::Index>(i)];
                arm.metric = MetricKind::VanillaAoi;
                // p = 0 arms are never indexed (see index_of); keep an empty slot.
                tables->tables.push_back(arm.p > 0.0
                                             ? chain_whittle_table(arm, AoiIndexTables::kTableAges)
                                             : Eigen::VectorXd());
                tables->arms.push_back(arm);
            }
            aoi_ = std::move(tables);
        }
    }

    ScheduleDecision decide(const Observation& obs, std::span<RngStream>) override {
        check_observation(obs, csi_.size());
        double best = 0.0;
        ScheduleDecision d;
        for (std::size_t i = 0; i < csi_.size(); ++i) {
            const double v = index_of(i, obs);
            if (v > best) {
                best = v;
                d.scheduled = i;
            }
        }
        return d;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<WhittlePolicy>(*this); }

    std::string name() const override {
        return metric_ == MetricKind::CaAoi ? "whittle" : "whittle_aoi";
    }

private:
    double index_of(std::size_t i, const Observation& obs) const {
        const Age x = obs.ages[i];
        const auto e = static_cast<Eigen::Index>(i);
        const bool known = csi_[i] == Csi::Known;
        if (known && !is_on(*obs.known_channels[i]))
            return 0.0;
        // A sensor whose channel is never ON gains nothing from being
        // scheduled: both actions leave its state unchanged, so its index
        // (the charge that makes them equally attractive) is 0.
        if (!(p_[e] > 0.0))
            return 0.0;
        if (metric_ == MetricKind::VanillaAoi)
            return aoi_->index(i, x);
        return known ? whittle_index_csi(x, Channel::On, w_[e])
                     : whittle_index_no_csi(x, p_[e], w_[e]);
    }

    Eigen::VectorXd w_, p_;
    std::vector<Csi> csi_;
    MetricKind metric_;
    std::shared_ptr<const AoiIndexTables> aoi_;
};

class RandomizedPolicy final : public Policy {
public:
    RandomizedPolicy(const RandomizedParams& params, const SystemSpec& spec) : w_(spec.weights()) {
        const auto unknown = spec.indices_with(Csi::Unknown);
        const auto known = spec.indices_with(Csi::Known);
        if (static_cast<std::size_t>(params.deltas.size()) != unknown.size() ||
            static_cast<std::size_t>(params.alphas.size()) != known.size())
            throw Error(ErrorCode::ParamMismatch,
                        "randomized parameters do not match the CSI partition");
        rate_.resize(spec.size());
        csi_.resize(spec.size());
        for (std::size_t k = 0; k < unknown.size(); ++k) {
            rate_[unknown[k]] = params.deltas[static_cast<Eigen::Index>(k)];
            csi_[unknown[k]] = Csi::Unknown;
        }
        for (std::size_t k = 0; k < known.size(); ++k) {
            rate_[known[k]] = params.alphas[static_cast<Eigen::Index>(k)];
            csi_[known[k]] = Csi::Known;
        }
    }

    ScheduleDecision decide(const Observation& obs, std::span<RngStream> streams) override {
        check_observation(obs, csi_.size());
        if (streams.size() != csi_.size())
            throw Error(ErrorCode::PolicySpecMismatch, "one policy stream per sensor required");
        double best = -std::numeric_limits<double>::infinity();
        ScheduleDecision d;
        for (std::size_t i = 0; i < csi_.size(); ++i) {
            // Draw every slot so each stream advances once per slot.
            const double u = streams[i].uniform();
            bool selected = u < rate_[i];
            if (csi_[i] == Csi::Known)
                selected = selected && is_on(*obs.known_channels[i]);
            if (!selected)
                continue;
            const double score = w_[static_cast<Eigen::Index>(i)] * static_cast<double>(obs.ages[i]);
            if (score > best) {
                best = score;
                d.scheduled = i;
            }
        }
        return d;
    }

    std::unique_ptr<Policy> clone() const override {
        return std::make_unique<RandomizedPolicy>(*this);
    }
    std::string name() const override { return "randomized"; }

private:
    Eigen::VectorXd w_;
    std::vector<double> rate_;
    std::vector<Csi> csi_;
};

class GreedyPolicy final : public Policy {
public:
    GreedyPolicy(const SystemSpec& spec, GreedyCsiRule rule)
        : w_(spec.weights()), p_(spec.probs()), rule_(rule) {
        for (const auto& s : spec.sensors)
            csi_.push_back(s.csi);
    }

    ScheduleDecision decide(const Observation& obs, std::span<RngStream>) override {
        check_observation(obs, csi_.size());
        double best = -1.0;
        ScheduleDecision d;
        for (std::size_t i = 0; i < csi_.size(); ++i) {
            const auto e = static_cast<Eigen::Index>(i);
            const double wx = w_[e] * static_cast<double>(obs.ages[i]);
            double score;
            if (csi_[i] == Csi::Unknown) {
                score = wx * p_[e];
            } else {
                if (rule_ == GreedyCsiRule::OnOnly && !is_on(*obs.known_channels[i]))
                    continue;
                score = wx;
            }
            if (score > best) {
                best = score;
                d.scheduled = i;
            }
        }
        return d;
    }

    std::unique_ptr<Policy> clone() const override { return std::make_unique<GreedyPolicy>(*this); }
    std::string name() const override {
        return rule_ == GreedyCsiRule::OnOnly ? "greedy" : "greedy_any";
    }

private:
    Eigen::VectorXd w_, p_;
    std::vector<Csi> csi_;
    GreedyCsiRule rule_;
};

class MaxThroughputPolicy final : public Policy {
public:
    explicit MaxThroughputPolicy(const SystemSpec& spec) : n_(spec.size()) {
        const Eigen::VectorXd p = spec.probs();
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < p.size(); ++i)
            if (p[i] > p[best])
                best = i;
        target_ = static_cast<std::size_t>(best);
    }

    ScheduleDecision decide(const Observation& obs, std::span<RngStream>) override {
        check_observation(obs, n_);
        return ScheduleDecision::sensor(target_);
    }

    std::unique_ptr<Policy> clone() const override {
        return std::make_unique<MaxThroughputPolicy>(*this);
    }
    std::string name() const override { return "max_throughput"; }

private:
    std::size_t n_;
    std::size_t target_;
};

void require_sensors(const SystemSpec& spec) {
    if (spec.sensors.empty())
        throw Error(ErrorCode::EmptySystem, "system has no sensors");
}

} // namespace

std::unique_ptr<Policy> whittle_policy(const SystemSpec& spec, MetricKind metric) {
    require_sensors(spec);
    return std::make_unique<WhittlePolicy>(spec, metric);
}

std::unique_ptr<Policy> randomized_policy(const RandomizedParams& params, const SystemSpec& spec) {
    require_sensors(spec);
    return std::make_unique<RandomizedPolicy>(params, spec);
}

std::unique_ptr<Policy> greedy_policy(const SystemSpec& spec, GreedyCsiRule rule) {
    require_sensors(spec);
    return std::make_unique<GreedyPolicy>(spec, rule);
}

std::unique_ptr<Policy> max_throughput_policy(const SystemSpec& spec) {
    require_sensors(spec);
    return std::make_unique<MaxThroughputPolicy>(spec);
}

std::unique_ptr<Policy> make_policy(const PolicySpec& policy, const SystemSpec& spec) {
    switch (policy.kind) {
    case PolicyKind::Whittle: return whittle_policy(spec, policy.metric);
    case PolicyKind::Randomized: return randomized_policy(solve_randomized_for(spec), spec);
    case PolicyKind::Greedy: return greedy_policy(spec, policy.greedy_rule);
    case PolicyKind::MaxThroughput: return max_throughput_policy(spec);
    }
    throw Error(ErrorCode::ValidationError, "unknown policy kind");
}

} // namespace caaoi
