#include "doctest.h"

#include <vector>

#include "caaoi/policies.hpp"

using namespace caaoi;

namespace {

SystemSpec make_system(std::vector<SensorSpec> sensors) {
    SystemSpec s;
    s.sensors = std::move(sensors);
    return validate(s);
}

Observation observe(const SystemSpec& spec, std::vector<Age> ages, std::vector<Channel> channels) {
    return make_observation(spec, ages, channels);
}

std::vector<RngStream> streams(std::size_t n, std::uint64_t seed = 5) {
    std::vector<RngStream> s;
    for (std::size_t i = 0; i < n; ++i)
        s.push_back(substream(seed, StreamTag::Policy, 0, i));
    return s;
}

constexpr Channel On = Channel::On;
constexpr Channel Off = Channel::Off;

} // namespace

TEST_SUITE("policies") {

TEST_CASE("no-CSI Whittle index closed form") {
    CHECK(whittle_index_no_csi(0, 0.0, 1.0) == 0.5);
    CHECK(whittle_index_no_csi(2, 0.5, 2.0) == doctest::Approx(8.0));
    CHECK(whittle_index_no_csi(0, 1.0, 1.0) == 1.0);
    CHECK(whittle_index_no_csi(3, 0.5, 1.0) == doctest::Approx(20.0 / 3));
    CHECK(whittle_index_no_csi<long double>(2, 0.5L, 2.0L) == 8.0L);
}

TEST_CASE("CSI Whittle index closed form") {
    CHECK(whittle_index_csi(2, On, 1.0) == 6.0);
    CHECK(whittle_index_csi(5, Off, 10.0) == 0.0);
    CHECK(whittle_index_csi(0, On, 1.0) == 1.0);
}

TEST_CASE("indices grow in x and p; CSI dominates no-CSI with equality at p = 1") {
    for (double w : {0.5, 1.0, 10.0})
        for (Age x = 0; x < 40; ++x) {
            const double csi = whittle_index_csi(x, On, w);
            CHECK(whittle_index_no_csi(x + 1, 0.5, w) > whittle_index_no_csi(x, 0.5, w));
            for (int k = 0; k < 10; ++k) {
                const double p = k / 10.0;
                CHECK(whittle_index_no_csi(x, p + 0.1, w) > whittle_index_no_csi(x, p, w));
                CHECK(whittle_index_no_csi(x, p, w) < csi);
                CHECK(whittle_index_no_csi(x, p, w) * (2 - p) == doctest::Approx(csi));
            }
            CHECK(whittle_index_no_csi(x, 1.0, w) == csi);
        }
}

TEST_CASE("Whittle policy decisions") {
    auto rng = streams(2);
    const auto unknown = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}});
    CHECK(whittle_policy(unknown)->decide(observe(unknown, {0, 3}, {Off, Off}), rng) ==
          ScheduleDecision::sensor(1));

    const auto known = make_system({{1, 0.5, Csi::Known}, {1, 0.5, Csi::Known}});
    CHECK(whittle_policy(known)->decide(observe(known, {4, 9}, {Off, Off}), rng).is_idle());
    CHECK(whittle_policy(known)->decide(observe(known, {4, 9}, {On, Off}), rng) ==
          ScheduleDecision::sensor(0));

    const auto mixed = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Known}});
    CHECK(whittle_policy(mixed)->decide(observe(mixed, {0, 0}, {On, On}), rng) ==
          ScheduleDecision::sensor(1));
    // The Known sensor is OFF: the Unknown sensor wins with any positive index.
    CHECK(whittle_policy(mixed)->decide(observe(mixed, {0, 50}, {On, Off}), rng) ==
          ScheduleDecision::sensor(0));
}

TEST_CASE("Whittle ties go to the lowest index") {
    auto rng = streams(3);
    const auto spec = make_system(
        {{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}});
    CHECK(whittle_policy(spec)->decide(observe(spec, {2, 2, 2}, {On, On, On}), rng) ==
          ScheduleDecision::sensor(0));
    CHECK(whittle_policy(spec)->decide(observe(spec, {1, 2, 2}, {On, On, On}), rng) ==
          ScheduleDecision::sensor(1));
}

TEST_CASE("AoI Whittle policy uses the numeric index") {
    auto rng = streams(2);
    const auto spec = make_system({{1, 0.1, Csi::Unknown}, {1, 0.9, Csi::Unknown}});
    auto pol = whittle_policy(spec, MetricKind::VanillaAoi);
    CHECK(pol->name() == "whittle_aoi");
    // Ages [10, 5]: the vanilla index (w p h (h + (2 - p)/p) / 2, h = x + 1)
    // gives 16.5 vs 19.5 and picks the good channel; the CA-AoI index gives
    // 34.7 vs 19.1 and picks the poor one.
    CHECK(pol->decide(observe(spec, {10, 5}, {On, On}), rng) == ScheduleDecision::sensor(1));
    CHECK(whittle_policy(spec)->decide(observe(spec, {10, 5}, {On, On}), rng) ==
          ScheduleDecision::sensor(0));
    // Much older good sensor wins.
    CHECK(pol->decide(observe(spec, {1, 40}, {On, On}), rng) == ScheduleDecision::sensor(1));
    // Beyond the precomputed table the index is computed on demand.
    CHECK(pol->decide(observe(spec, {3000, 1}, {On, On}), rng) == ScheduleDecision::sensor(0));
    auto copy = pol->clone();
    CHECK(copy->decide(observe(spec, {1, 40}, {On, On}), rng) == ScheduleDecision::sensor(1));
}

TEST_CASE("randomized policy: greedy among volunteers") {
    const auto spec = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}});
    RandomizedParams all;
    all.deltas = Eigen::Vector2d(1.0, 1.0);
    all.alphas.resize(0);
    auto rng = streams(2);
    auto pol = randomized_policy(all, spec);
    CHECK(pol->decide(observe(spec, {3, 7}, {On, On}), rng) == ScheduleDecision::sensor(1));
    CHECK(pol->decide(observe(spec, {7, 3}, {On, On}), rng) == ScheduleDecision::sensor(0));

    // Rates that are never hit (u < 0 is impossible): nobody volunteers.
    RandomizedParams none = all;
    none.deltas = Eigen::Vector2d(0.0, 0.0);
    CHECK(randomized_policy(none, spec)->decide(observe(spec, {3, 7}, {On, On}), rng).is_idle());

    const auto single = make_system({{1, 0.3, Csi::Unknown}});
    RandomizedParams one;
    one.deltas = Eigen::VectorXd::Ones(1);
    auto always = randomized_policy(one, single);
    auto rng1 = streams(1);
    for (int t = 0; t < 100; ++t)
        CHECK(always->decide(observe(single, {t}, {Off}), rng1) == ScheduleDecision::sensor(0));
}

TEST_CASE("randomized policy: CSI sensors volunteer only when ON") {
    const auto spec = make_system({{1, 0.5, Csi::Known}});
    RandomizedParams params;
    params.deltas.resize(0);
    params.alphas = Eigen::VectorXd::Ones(1);
    auto pol = randomized_policy(params, spec);
    auto rng = streams(1);
    CHECK(pol->decide(observe(spec, {4}, {Off}), rng).is_idle());
    CHECK(pol->decide(observe(spec, {4}, {On}), rng) == ScheduleDecision::sensor(0));
}

TEST_CASE("randomized policy: selection frequency matches the rate") {
    const auto spec = make_system({{1, 0.5, Csi::Unknown}});
    RandomizedParams params;
    params.deltas = Eigen::VectorXd::Constant(1, 0.3);
    auto pol = randomized_policy(params, spec);
    auto rng = streams(1, 77);
    const int n = 100000;
    int hits = 0;
    for (int t = 0; t < n; ++t)
        hits += !pol->decide(observe(spec, {1}, {On}), rng).is_idle();
    CHECK(std::abs(hits / double(n) - 0.3) < 5 * std::sqrt(0.21 / n));
}

TEST_CASE("randomized policy rejects parameters of the wrong shape") {
    const auto spec = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Known}});
    RandomizedParams bad;
    bad.deltas = Eigen::Vector2d(0.5, 0.5);
    try {
        randomized_policy(bad, spec);
        FAIL("expected ParamMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParamMismatch);
    }
}

TEST_CASE("greedy policy") {
    auto rng = streams(2);
    const auto unknown = make_system({{1, 0.1, Csi::Unknown}, {1, 0.9, Csi::Unknown}});
    CHECK(greedy_policy(unknown)->decide(observe(unknown, {10, 1}, {Off, Off}), rng) ==
          ScheduleDecision::sensor(0));

    const auto known = make_system({{1, 0.5, Csi::Known}, {1, 0.5, Csi::Known}});
    CHECK(greedy_policy(known)->decide(observe(known, {5, 8}, {On, On}), rng) ==
          ScheduleDecision::sensor(1));
    CHECK(greedy_policy(known)->decide(observe(known, {5, 8}, {On, Off}), rng) ==
          ScheduleDecision::sensor(0));
    CHECK(greedy_policy(known)->decide(observe(known, {5, 8}, {Off, Off}), rng).is_idle());
    // The channel-blind variant follows the raw argmax.
    auto any = greedy_policy(known, GreedyCsiRule::Any);
    CHECK(any->name() == "greedy_any");
    CHECK(any->decide(observe(known, {5, 8}, {On, Off}), rng) == ScheduleDecision::sensor(1));

    // With an Unknown-CSI sensor present the greedy policy never idles.
    const auto mixed = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Known}});
    CHECK(greedy_policy(mixed)->decide(observe(mixed, {0, 0}, {On, Off}), rng) ==
          ScheduleDecision::sensor(0));
}

TEST_CASE("max-throughput policy") {
    auto rng = streams(2);
    const auto a = make_system({{1, 0.1, Csi::Unknown}, {1, 0.7, Csi::Unknown}});
    CHECK(max_throughput_policy(a)->decide(observe(a, {50, 0}, {On, Off}), rng) ==
          ScheduleDecision::sensor(1));
    const auto b = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}});
    CHECK(max_throughput_policy(b)->decide(observe(b, {0, 50}, {On, On}), rng) ==
          ScheduleDecision::sensor(0));
    const auto c = make_system({{3, 0.2, Csi::Known}});
    auto rng1 = streams(1);
    CHECK(max_throughput_policy(c)->decide(observe(c, {0}, {Off}), rng1) ==
          ScheduleDecision::sensor(0));
}

TEST_CASE("decisions are invariant to a common weight scale") {
    const auto base = make_system({{1, 0.2, Csi::Unknown}, {3, 0.7, Csi::Known}, {2, 0.5, Csi::Unknown}});
    SystemSpec scaled = base;
    for (auto& s : scaled.sensors)
        s.weight *= 37.5;
    RngStream pick(99);
    auto rng = streams(3);
    for (PolicyKind kind : {PolicyKind::Whittle, PolicyKind::Greedy}) {
        auto p1 = make_policy({kind}, base);
        auto p2 = make_policy({kind}, scaled);
        for (int t = 0; t < 2000; ++t) {
            std::vector<Age> ages{Age(pick.next() % 30), Age(pick.next() % 30), Age(pick.next() % 30)};
            std::vector<Channel> ch{pick.bernoulli(0.5) ? On : Off, pick.bernoulli(0.5) ? On : Off,
                                    pick.bernoulli(0.5) ? On : Off};
            REQUIRE(p1->decide(observe(base, ages, ch), rng) == p2->decide(observe(scaled, ages, ch), rng));
        }
    }
}

TEST_CASE("policies read only the observation") {
    // Changing the hidden channel of an Unknown-CSI sensor cannot change the
    // decision: it is not part of the observation.
    const auto spec = make_system({{1, 0.4, Csi::Unknown}, {2, 0.6, Csi::Known}, {1, 0.9, Csi::Unknown}});
    RngStream pick(5);
    for (PolicyKind kind : {PolicyKind::Whittle, PolicyKind::Randomized, PolicyKind::Greedy,
                            PolicyKind::MaxThroughput}) {
        auto pol = make_policy({kind}, spec);
        for (int t = 0; t < 500; ++t) {
            std::vector<Age> ages{Age(pick.next() % 20), Age(pick.next() % 20), Age(pick.next() % 20)};
            const Channel known = pick.bernoulli(0.5) ? On : Off;
            auto r1 = streams(3, static_cast<std::uint64_t>(t));
            auto r2 = streams(3, static_cast<std::uint64_t>(t));
            const auto d1 = pol->decide(observe(spec, ages, {On, known, On}), r1);
            const auto d2 = pol->decide(observe(spec, ages, {Off, known, Off}), r2);
            REQUIRE(d1 == d2);
        }
    }
}

TEST_CASE("policy factory and names") {
    const auto spec = make_system({{1, 0.5, Csi::Unknown}});
    CHECK(make_policy({PolicyKind::Whittle}, spec)->name() == "whittle");
    CHECK(make_policy({PolicyKind::Randomized}, spec)->name() == "randomized");
    CHECK(make_policy({PolicyKind::Greedy}, spec)->name() == "greedy");
    CHECK(make_policy({PolicyKind::MaxThroughput}, spec)->name() == "max_throughput");
    CHECK(to_string(PolicyKind::MaxThroughput) == "max_throughput");
    SystemSpec empty;
    CHECK_THROWS_AS(whittle_policy(empty), Error);
    auto rng = streams(2);
    auto pol = whittle_policy(spec);
    const auto two = make_system({{1, 0.5, Csi::Unknown}, {1, 0.5, Csi::Unknown}});
    try {
        pol->decide(observe(two, {0, 0}, {On, On}), rng);
        FAIL("expected PolicySpecMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PolicySpecMismatch);
    }
}

} // TEST_SUITE
