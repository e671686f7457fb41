#include "doctest.h"

#include <cmath>
#include <vector>

#include "caaoi/analysis.hpp"
#include "caaoi/policies.hpp"
#include "caaoi/rng.hpp"

using namespace caaoi;

namespace {

SingleArmMdp arm(Csi mode, double p, double w, double c, MetricKind m = MetricKind::CaAoi,
                 Age max_age = 500) {
    SingleArmMdp a;
    a.csi_mode = mode;
    a.p = p;
    a.w = w;
    a.charge = c;
    a.metric = m;
    a.max_age = max_age;
    return a;
}

/// argmin over thresholds 0..x_max of a cost functor, lowest on ties.
template <typename F>
Age argmin_threshold(F cost, Age x_max) {
    Age best = 0;
    double best_cost = cost(0);
    for (Age X = 1; X <= x_max; ++X) {
        const double v = cost(X);
        if (v < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
            best = X;
            best_cost = v;
        }
    }
    return best;
}

/// Independent simulation of a threshold policy on one arm: per-slot stage
/// cost (post-action age plus charge per attempt), averaged over T slots.
double simulate_threshold(const SingleArmMdp& a, Age X, double c, std::uint64_t T) {
    RngStream rng(1234);
    Age x = 0;
    double total = 0.0;
    for (std::uint64_t t = 0; t < T; ++t) {
        const Channel ch = rng.bernoulli(a.p) ? Channel::On : Channel::Off;
        bool act = x >= X;
        if (a.csi_mode == Csi::Known && !is_on(ch))
            act = false;
        const Age next = age_step(a.metric, x, act, ch);
        total += a.w * static_cast<double>(next) + (act ? c : 0.0);
        x = next;
    }
    return total / static_cast<double>(T);
}

} // namespace

TEST_SUITE("analysis") {

TEST_CASE("published threshold cost") {
    CHECK(threshold_avg_cost(Csi::Unknown, 2, 3.0, 1.0, 0.5) == doctest::Approx(2.5));
    CHECK(threshold_avg_cost(Csi::Known, 1, 4.0, 2.0, 0.3) == doctest::Approx(3.0));
    for (Csi m : {Csi::Unknown, Csi::Known})
        for (Age X = 1; X < 10; ++X)
            CHECK(threshold_avg_cost(m, X, 0.0, 1.5, 0.4) == doctest::Approx(1.5 * X / 2));
}

TEST_CASE("published threshold cost is convex in X") {
    for (Csi m : {Csi::Unknown, Csi::Known})
        for (double c : {0.0, 1.0, 10.0, 250.0})
            for (Age X = 2; X < 60; ++X) {
                const double d2 = threshold_avg_cost(m, X + 1, c, 1.0, 0.3) -
                                  2 * threshold_avg_cost(m, X, c, 1.0, 0.3) +
                                  threshold_avg_cost(m, X - 1, c, 1.0, 0.3);
                CHECK(d2 >= -1e-12);
            }
}

TEST_CASE("numeric index reproduces the closed forms") {
    CHECK(numeric_whittle(Csi::Unknown, 0, 1.0, 0.0) == doctest::Approx(0.5));
    CHECK(numeric_whittle(Csi::Unknown, 2, 2.0, 0.5) == doctest::Approx(8.0));
    CHECK(numeric_whittle(Csi::Known, 2, 1.0, 0.5) == doctest::Approx(6.0));
    using Real = long double;
    for (Age x = 0; x <= 50; ++x)
        for (int k = 1; k <= 9; ++k)
            for (Real w : {0.5L, 1.0L, 10.0L}) {
                const Real p = k / Real(10);
                const Real u = numeric_whittle<Real>(Csi::Unknown, x, w, p);
                const Real kn = numeric_whittle<Real>(Csi::Known, x, w, p);
                REQUIRE(std::fabs(u - whittle_index_no_csi<Real>(x, p, w)) <= 1e-12L);
                REQUIRE(std::fabs(kn - whittle_index_csi<Real>(x, Channel::On, w)) <= 1e-12L);
            }
    CHECK_THROWS_AS(numeric_whittle(Csi::Unknown, -1, 1.0, 0.5), Error);
    // p = 2 would make the Unknown-CSI cost flat in c.
    CHECK_THROWS_AS(numeric_whittle(Csi::Unknown, 1, 1.0, 2.0), Error);
}

TEST_CASE("value iteration: perfect channel and free charge schedules everywhere") {
    const ValueFunction vf = value_iterate(arm(Csi::Unknown, 1.0, 1.0, 0.0));
    CHECK(vf.values[0] == doctest::Approx(0.0));
    for (Age x = 0; x <= vf.max_age; ++x)
        REQUIRE(vf.schedules(x));
    CHECK(schedule_threshold(vf) == Age(0));
}

TEST_CASE("value iteration: threshold structure and monotone values") {
    for (Csi mode : {Csi::Unknown, Csi::Known})
        for (double p : {0.2, 0.5, 0.9})
            for (double c : {0.0, 3.0, 10.0, 40.0}) {
                const ValueFunction vf = value_iterate(arm(mode, p, 1.0, c));
                CHECK(vf.residual <= 1e-10 * std::max(1.0, vf.values.cwiseAbs().maxCoeff()));
                CHECK(is_threshold_type(vf));
                CHECK(is_nondecreasing_in_age(vf));
                CHECK(vf.values.allFinite());
            }
    const ValueFunction mid = value_iterate(arm(Csi::Unknown, 0.5, 1.0, 10.0));
    const auto th = schedule_threshold(mid);
    REQUIRE(th.has_value());
    CHECK(*th > 0);
    CHECK(*th < 50);
}

TEST_CASE("value iteration also handles vanilla AoI arms") {
    for (Csi mode : {Csi::Unknown, Csi::Known})
        for (double c : {0.5, 5.0, 50.0}) {
            const ValueFunction vf = value_iterate(arm(mode, 0.4, 1.0, c, MetricKind::VanillaAoi));
            CHECK(is_threshold_type(vf));
            CHECK(is_nondecreasing_in_age(vf));
        }
}

TEST_CASE("value iteration reports non-convergence") {
    ValueIterationOptions opts;
    opts.max_iterations = 3;
    try {
        value_iterate(arm(Csi::Unknown, 0.5, 1.0, 1.0), opts);
        FAIL("expected NonConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonConvergence);
    }
    opts = {};
    opts.discount = 1.0;
    CHECK_THROWS_AS(value_iterate(arm(Csi::Unknown, 0.5, 1.0, 1.0), opts), Error);
    CHECK_THROWS_AS(value_iterate(arm(Csi::Unknown, 0.5, 1.0, 1.0, MetricKind::CaAoi, 1)), Error);
}

TEST_CASE("exact chain cost matches a direct simulation of the threshold rule") {
    for (MetricKind m : {MetricKind::CaAoi, MetricKind::VanillaAoi})
        for (Csi mode : {Csi::Unknown, Csi::Known})
            for (double p : {0.3, 0.8})
                for (Age X : {0, 2, 5}) {
                    const SingleArmMdp a = arm(mode, p, 2.0, 0.0, m);
                    const AffineCost<double> cc = threshold_chain_cost(a, X);
                    const double c = 3.0;
                    const double sim = simulate_threshold(a, X, c, 2'000'000);
                    CHECK(cc.at(c) == doctest::Approx(sim).epsilon(0.02));
                }
}

TEST_CASE("exact chain index has simple closed forms") {
    // CA-AoI: without CSI every attempt is charged, with CSI only ON slots are,
    // which divides the per-attempt index by p. Vanilla AoI reproduces the
    // known unreliable-channel index w p h (h + (2 - p)/p) / 2 with h = x + 1.
    for (double p : {0.1, 0.35, 0.9, 1.0})
        for (double w : {0.5, 3.0}) {
            const auto ca_u = chain_whittle_table(arm(Csi::Unknown, p, w, 0), 30);
            const auto ca_k = chain_whittle_table(arm(Csi::Known, p, w, 0), 30);
            const auto aoi_u = chain_whittle_table(arm(Csi::Unknown, p, w, 0, MetricKind::VanillaAoi), 30);
            for (Age x = 0; x <= 30; ++x) {
                const double h = static_cast<double>(x + 1);
                const double base = w * h * (h + 1) / 2;
                CHECK(ca_u[x] == doctest::Approx(base).epsilon(1e-9));
                CHECK(ca_k[x] == doctest::Approx(base / p).epsilon(1e-9));
                CHECK(aoi_u[x] == doctest::Approx(w * p * h * (h + (2 - p) / p) / 2).epsilon(1e-9));
                CHECK(chain_whittle(arm(Csi::Unknown, p, w, 0, MetricKind::VanillaAoi), x) ==
                      doctest::Approx(aoi_u[x]).epsilon(1e-12));
            }
        }
}

TEST_CASE("discounted threshold sits within one state of the exact chain optimum") {
    for (Csi mode : {Csi::Unknown, Csi::Known})
        for (MetricKind m : {MetricKind::CaAoi, MetricKind::VanillaAoi})
            for (double p : {0.3, 0.6, 1.0})
                for (double c : {2.0, 15.0, 60.0}) {
                    const SingleArmMdp a = arm(mode, p, 1.0, c, m);
                    const auto th = schedule_threshold(value_iterate(a));
                    REQUIRE(th.has_value());
                    const Age best = argmin_threshold(
                        [&](Age X) { return threshold_chain_cost(a, X).at(c); }, 200);
                    CHECK(std::abs(*th - best) <= 1);
                }
}

TEST_CASE("on a perfect channel the published cost locates the same threshold") {
    for (Csi mode : {Csi::Unknown, Csi::Known})
        for (double c : {1.0, 7.0, 30.0, 120.0}) {
            const SingleArmMdp a = arm(mode, 1.0, 1.0, c);
            const auto th = schedule_threshold(value_iterate(a));
            REQUIRE(th.has_value());
            const Age best = argmin_threshold(
                [&](Age X) { return threshold_avg_cost(mode, X, c, 1.0, 1.0); }, 200);
            CHECK(std::abs(*th - best) <= 1);
        }
}

TEST_CASE("indexability scan") {
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k)
        grid.push_back(-1.0 + 4.0 * k);
    for (Csi mode : {Csi::Unknown, Csi::Known}) {
        const IdleSetTrace tr = indexability_scan(arm(mode, 0.5, 1.0, 0, MetricKind::CaAoi, 200), grid);
        REQUIRE(tr.idle.size() == grid.size());
        CHECK(tr.idle_count(0) == 0); // c < 0
        for (std::size_t k = 1; k < grid.size(); ++k)
            CHECK(tr.idle_count(k) >= tr.idle_count(k - 1));
    }
    const double zero[] = {0.0};
    CHECK(indexability_scan(arm(Csi::Unknown, 0.5, 1.0, 0), zero).idle_count(0) == 0);

    // A charge far above every index on the truncated space: idle below the cap.
    const Age cap = 40;
    const double huge[] = {1e9};
    const IdleSetTrace big = indexability_scan(arm(Csi::Unknown, 0.5, 1.0, 0, MetricKind::CaAoi, cap), huge);
    for (Age x = 0; x < cap; ++x)
        CHECK(big.idle[0][static_cast<std::size_t>(x)]);

    const double unsorted[] = {2.0, 1.0};
    CHECK_THROWS_AS(indexability_scan(arm(Csi::Unknown, 0.5, 1.0, 0), unsorted), Error);
}

TEST_CASE("transient expected age closed forms") {
    CHECK(expected_age_no_csi(0.5, 0.5, 0) == 0.0);
    CHECK(expected_age_no_csi(0.3, 1.0, 17) == 0.0);
    CHECK(expected_age_no_csi(0.5, 0.5, 2) == doctest::Approx(0.4375));
    CHECK(expected_age_no_csi(0.5, 0.3, 100000) == doctest::Approx(0.7 / 0.3));
    CHECK(expected_age_csi(0.5, 0.5, 0) == 0.0);
    CHECK(expected_age_csi(0.4, 1.0, 9) == 0.0);
    CHECK(expected_age_csi(1.0, 0.5, 1) == doctest::Approx(0.5));
    try {
        expected_age_no_csi(0.5, 0.0, 3);
        FAIL("expected ZeroDelta");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroDelta);
    }
    try {
        expected_age_csi(0.5, 0.0, 3);
        FAIL("expected ZeroAlpha");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroAlpha);
    }
}

TEST_CASE("transient expected age agrees with Monte Carlo") {
    const int reps = 200000;
    RngStream rng(404);
    struct Case { bool csi; double p, rate; Age t; };
    for (const Case& cs : {Case{false, 0.5, 0.5, 2}, Case{true, 1.0, 0.5, 1}, Case{false, 0.3, 0.7, 5},
                           Case{true, 0.7, 0.3, 5}}) {
        double sum = 0, sq = 0;
        for (int r = 0; r < reps; ++r) {
            Age x = 0;
            for (Age s = 0; s < cs.t; ++s) {
                const Channel ch = rng.bernoulli(cs.p) ? Channel::On : Channel::Off;
                const bool pick = rng.bernoulli(cs.rate) && (!cs.csi || is_on(ch));
                x = ca_aoi_step(x, pick, ch);
            }
            sum += static_cast<double>(x);
            sq += static_cast<double>(x * x);
        }
        const double mean = sum / reps;
        const double se = std::sqrt((sq / reps - mean * mean) / reps);
        const double expect = cs.csi ? expected_age_csi(cs.p, cs.rate, cs.t)
                                     : expected_age_no_csi(cs.p, cs.rate, cs.t);
        CHECK(std::abs(mean - expect) <= 4 * se);
    }
}

} // TEST_SUITE
