#include "caaoi/sim.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "caaoi/rng.hpp"

namespace caaoi {

namespace {

constexpr std::size_t kCa = static_cast<std::size_t>(MetricKind::CaAoi);
constexpr std::size_t kAoi = static_cast<std::size_t>(MetricKind::VanillaAoi);

/// Mean and standard error of the mean.
std::pair<double, double> mean_se(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= n;
    if (xs.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

void check_run_inputs(const SystemSpec& spec, std::uint64_t horizon, std::uint32_t reps) {
    if (spec.sensors.empty())
        throw Error(ErrorCode::EmptySystem, "system has no sensors");
    if (horizon == 0)
        throw Error(ErrorCode::ZeroHorizon, "horizon must be at least one slot");
    if (reps == 0)
        throw Error(ErrorCode::ValidationError, "replications must be at least 1");
}

} // namespace

std::uint64_t replication_key(std::uint64_t seed, std::uint32_t replication) {
    return derive_key(seed, StreamTag::Replication, replication);
}

ReplicationResult simulate_replication(const SystemSpec& spec, Policy& policy,
                                       MetricKind policy_metric, std::uint64_t horizon,
                                       std::uint64_t rep_key, const SlotObserver& observer) {
    if (horizon == 0)
        throw Error(ErrorCode::ZeroHorizon, "horizon must be at least one slot");
    const std::size_t n = spec.size();
    const Eigen::VectorXd weights = spec.weights();
    std::vector<double> p(n);
    std::vector<RngStream> channel_streams, policy_streams;
    channel_streams.reserve(n);
    policy_streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        p[i] = spec.sensors[i].channel_on_prob;
        channel_streams.push_back(substream(rep_key, StreamTag::Channel, i));
        policy_streams.push_back(substream(rep_key, StreamTag::Policy, i));
    }

    std::array<std::vector<Age>, 2> ages{std::vector<Age>(n, 0), std::vector<Age>(n, 0)};
    std::vector<Channel> channels(n, Channel::Off);
    std::array<double, 2> cum{0.0, 0.0};
    std::vector<std::uint64_t> scheduled(n, 0);
    std::uint64_t successes = 0;
    Observation obs;
    const auto& observed = ages[static_cast<std::size_t>(policy_metric)];
    policy.reset();

    for (std::uint64_t t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            channels[i] = channel_streams[i].bernoulli(p[i]) ? Channel::On : Channel::Off;
        refresh_observation(obs, spec, observed, channels);
        const ScheduleDecision d = policy.decide(obs, policy_streams);
        if (d.scheduled) {
            if (*d.scheduled >= n)
                throw Error(ErrorCode::PolicySpecMismatch, "policy scheduled a missing sensor");
            ++scheduled[*d.scheduled];
            if (is_on(channels[*d.scheduled]))
                ++successes;
        }
        if (observer)
            observer(t, channels, d);

        double s_ca = 0.0, s_aoi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool chosen = d.scheduled == i;
            const double w = weights[static_cast<Eigen::Index>(i)];
            ages[kCa][i] = ca_aoi_step(ages[kCa][i], chosen, channels[i]);
            ages[kAoi][i] = aoi_step(ages[kAoi][i], chosen, channels[i]);
            s_ca += w * static_cast<double>(ages[kCa][i]);
            s_aoi += w * static_cast<double>(ages[kAoi][i]);
        }
        cum[kCa] += s_ca;
        cum[kAoi] += s_aoi;
    }

    const double T = static_cast<double>(horizon);
    ReplicationResult out;
    out.avg_weighted_age = {cum[kCa] / T, cum[kAoi] / T};
    out.throughput = static_cast<double>(successes) / T;
    out.resource_fractions.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        out.resource_fractions[static_cast<Eigen::Index>(i)] = static_cast<double>(scheduled[i]) / T;
    return out;
}

RunReport summarize(const std::vector<ReplicationResult>& reps, MetricKind metric,
                    std::vector<std::uint64_t> seeds_used) {
    if (reps.empty())
        throw Error(ErrorCode::ValidationError, "no replications to summarize");
    RunReport r;
    r.metric = metric;
    for (std::size_t m = 0; m < 2; ++m) {
        std::vector<double> xs;
        for (const auto& rep : reps)
            xs.push_back(rep.avg_weighted_age[m]);
        const auto [mean, se] = mean_se(xs);
        r.by_metric[m] = {mean, se};
    }
    std::vector<double> th;
    for (const auto& rep : reps)
        th.push_back(rep.throughput);
    std::tie(r.throughput, r.throughput_std_error) = mean_se(th);
    r.resource_fractions = Eigen::VectorXd::Zero(reps.front().resource_fractions.size());
    for (const auto& rep : reps)
        r.resource_fractions += rep.resource_fractions;
    r.resource_fractions /= static_cast<double>(reps.size());
    r.avg_weighted_age = r.stats(metric).avg_weighted_age;
    r.std_error = r.stats(metric).std_error;
    r.seeds_used = std::move(seeds_used);
    return r;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(count);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

RunReport run(const SimConfig& config, const Policy& prototype, unsigned jobs) {
    check_run_inputs(config.spec, config.horizon, config.replications);
    const SystemSpec spec = validate(config.spec);
    std::vector<ReplicationResult> reps(config.replications);
    std::vector<std::uint64_t> keys(config.replications);
    for (std::uint32_t r = 0; r < config.replications; ++r)
        keys[r] = replication_key(config.seed, r);
    parallel_for(config.replications, jobs, [&](std::size_t r) {
        auto policy = prototype.clone();
        reps[r] = simulate_replication(spec, *policy, config.policy.metric, config.horizon, keys[r]);
    });
    return summarize(reps, config.metric, std::move(keys));
}

RunReport run(const SimConfig& config, unsigned jobs) {
    check_run_inputs(config.spec, config.horizon, config.replications);
    const SystemSpec spec = validate(config.spec);
    const auto prototype = make_policy(config.policy, spec);
    SimConfig validated = config;
    validated.spec = spec;
    return run(validated, *prototype, jobs);
}

// ---------------------------------------------------------------------------

ParameterPath ParameterPath::parse(const std::string& text) {
    if (text == "n")
        return {Kind::SystemSize, 0};
    const std::string prefix = "sensors[";
    const auto close = text.find(']');
    if (text.rfind(prefix, 0) == 0 && close != std::string::npos && close > prefix.size()) {
        const std::string digits = text.substr(prefix.size(), close - prefix.size());
        const std::string field = text.substr(close + 1);
        const bool numeric = digits.find_first_not_of("0123456789") == std::string::npos;
        if (numeric && digits.size() <= 9) {
            const std::size_t k = std::stoul(digits);
            if (field == ".p")
                return {Kind::SensorProb, k};
            if (field == ".weight")
                return {Kind::SensorWeight, k};
        }
    }
    throw Error(ErrorCode::BadParameterPath,
                "unsupported sweep path '" + text + "' (use sensors[k].p, sensors[k].weight or n)");
}

std::string ParameterPath::str() const {
    switch (kind) {
    case Kind::SensorProb: return "sensors[" + std::to_string(sensor) + "].p";
    case Kind::SensorWeight: return "sensors[" + std::to_string(sensor) + "].weight";
    case Kind::SystemSize: return "n";
    }
    return "?";
}

SystemSpec random_system(std::size_t n, std::uint64_t seed, Csi csi) {
    if (n == 0)
        throw Error(ErrorCode::EmptySystem, "system size must be positive");
    RngStream rng = substream(seed, StreamTag::SystemGen, n);
    SystemSpec spec;
    spec.normalize_weights = true;
    for (std::size_t i = 0; i < n; ++i) {
        SensorSpec s;
        s.weight = 1.0 + 99.0 * rng.uniform();
        s.channel_on_prob = rng.uniform();
        s.csi = csi;
        spec.sensors.push_back(s);
    }
    return validate(spec);
}

SystemSpec apply_path(const SystemSpec& base, const ParameterPath& path, double value,
                      std::uint64_t seed, Csi generated_csi) {
    if (path.kind == ParameterPath::Kind::SystemSize) {
        if (!(value >= 1.0) || value != std::floor(value) || value > 1e6)
            throw Error(ErrorCode::BadParameterPath, "n must be a positive integer");
        return random_system(static_cast<std::size_t>(value), seed, generated_csi);
    }
    if (path.sensor >= base.size())
        throw Error(ErrorCode::BadParameterPath,
                    "sweep path " + path.str() + " addresses a missing sensor");
    SystemSpec spec = base;
    auto& s = spec.sensors[path.sensor];
    if (path.kind == ParameterPath::Kind::SensorProb)
        s.channel_on_prob = value;
    else
        s.weight = value;
    return validate(spec);
}

std::vector<SweepPoint> sweep(const SweepRequest& req, unsigned jobs) {
    std::vector<SweepPoint> points(req.values.size());
    if (points.empty())
        return points;
    if (req.horizon == 0)
        throw Error(ErrorCode::ZeroHorizon, "horizon must be at least one slot");
    if (req.replications == 0)
        throw Error(ErrorCode::ValidationError, "replications must be at least 1");
    for (std::size_t k = 0; k < points.size(); ++k) {
        points[k].value = req.values[k];
        points[k].system = apply_path(req.base, req.path, req.values[k], req.seed, req.generated_csi);
    }

    const std::size_t np = req.policies.size();
    const std::size_t reps = req.replications;
    std::vector<std::unique_ptr<Policy>> prototypes(points.size() * np);
    parallel_for(prototypes.size(), jobs, [&](std::size_t k) {
        prototypes[k] = make_policy(req.policies[k % np], points[k / np].system);
    });

    std::vector<std::uint64_t> keys(reps);
    for (std::uint32_t r = 0; r < req.replications; ++r)
        keys[r] = replication_key(req.seed, r);

    std::vector<ReplicationResult> results(prototypes.size() * reps);
    parallel_for(results.size(), jobs, [&](std::size_t task) {
        const std::size_t cell = task / reps;
        const std::size_t r = task % reps;
        auto policy = prototypes[cell]->clone();
        results[task] = simulate_replication(points[cell / np].system, *policy,
                                             req.policies[cell % np].metric, req.horizon, keys[r]);
    });

    for (std::size_t cell = 0; cell < prototypes.size(); ++cell) {
        std::vector<ReplicationResult> slice(results.begin() + static_cast<std::ptrdiff_t>(cell * reps),
                                             results.begin() + static_cast<std::ptrdiff_t>((cell + 1) * reps));
        points[cell / np].reports.push_back(
            summarize(slice, req.policies[cell % np].metric, keys));
    }
    return points;
}

} // namespace caaoi
