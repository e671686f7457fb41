#include "caaoi/config.hpp"

#include <functional>
#include <map>

namespace caaoi {

namespace {

std::vector<double> grid(int from_tenths, int to_tenths) {
    std::vector<double> v;
    for (int k = from_tenths; k <= to_tenths; ++k)
        v.push_back(k / 10.0);
    return v;
}

SensorSpec sensor(double w, double p, Csi csi) { return {w, p, csi}; }

PolicyEntry entry(PolicyKind kind, MetricKind metric = MetricKind::CaAoi,
                  std::vector<MetricKind> report = {}) {
    PolicyEntry e;
    e.spec.kind = kind;
    e.spec.metric = metric;
    e.label = default_label(e.spec);
    e.report = report.empty() ? std::vector<MetricKind>{metric} : std::move(report);
    return e;
}

std::vector<PolicyEntry> standard_policies() {
    return {entry(PolicyKind::Whittle), entry(PolicyKind::Randomized), entry(PolicyKind::Greedy)};
}

ExperimentConfig base(const std::string& name, const std::string& description) {
    ExperimentConfig c;
    c.name = name;
    c.description = description;
    c.system.normalize_weights = true;
    c.policies = standard_policies();
    return c;
}

ExperimentConfig three_sensor(const std::string& name, Csi csi) {
    auto c = base(name, std::string("Three sensors ") +
                            (csi == Csi::Known ? "with" : "without") +
                            " CSI: p1 = 0.1, p2 = 0.9, w = [1, 1, 100] (normalized); p3 swept "
                            "from 0 to 1. Policies: whittle, randomized, greedy.");
    c.system.sensors = {sensor(1, 0.1, csi), sensor(1, 0.9, csi), sensor(100, 0.5, csi)};
    c.sweep = SweepSpec{"sensors[2].p", grid(0, 10), Csi::Unknown};
    return c;
}

ExperimentConfig two_sensor(const std::string& name, Csi csi) {
    auto c = base(name, std::string("Two sensors ") + (csi == Csi::Known ? "with" : "without") +
                            " CSI, an important sensor on a poor channel: p1 = 0.1, "
                            "w = [1000, 1] (normalized); p2 swept from 0 to 1. Policies: "
                            "whittle, randomized, greedy.");
    c.system.sensors = {sensor(1000, 0.1, csi), sensor(1, 0.5, csi)};
    c.sweep = SweepSpec{"sensors[1].p", grid(0, 10), Csi::Unknown};
    return c;
}

ExperimentConfig system_size(const std::string& name, Csi csi) {
    auto c = base(name, std::string("Random systems ") + (csi == Csi::Known ? "with" : "without") +
                            " CSI of n = 10, 15, ..., 40 sensors: weights uniform on [1, 100] "
                            "(normalized), p uniform on [0, 1], drawn from the seed. Policies: "
                            "whittle, randomized, greedy.");
    c.system.sensors = {sensor(1, 0.5, csi)};
    c.sweep = SweepSpec{"n", {10, 15, 20, 25, 30, 35, 40}, csi};
    return c;
}

ExperimentConfig trade_off(const std::string& name, const std::string& focus,
                           std::vector<PolicyEntry> policies) {
    ExperimentConfig c;
    c.name = name;
    c.description = "Two equally weighted sensors without CSI: p_poor = 0.1, p_good swept over "
                    "0.2 .. 1.0. " + focus;
    c.system.sensors = {sensor(1, 0.1, Csi::Unknown), sensor(1, 0.5, Csi::Unknown)};
    c.system.normalize_weights = true;
    c.sweep = SweepSpec{"sensors[1].p", grid(2, 10), Csi::Unknown};
    c.policies = std::move(policies);
    return c;
}

const std::map<std::string, std::function<ExperimentConfig()>>& registry() {
    static const std::map<std::string, std::function<ExperimentConfig()>> presets = {
        {"fig3", [] { return three_sensor("fig3", Csi::Unknown); }},
        {"fig4", [] { return two_sensor("fig4", Csi::Unknown); }},
        {"fig5", [] { return system_size("fig5", Csi::Unknown); }},
        {"fig6", [] { return three_sensor("fig6", Csi::Known); }},
        {"fig7", [] { return two_sensor("fig7", Csi::Known); }},
        {"fig8", [] { return system_size("fig8", Csi::Known); }},
        {"partial1",
         [] {
             auto c = base("partial1",
                           "Partial CSI: two sensors without CSI (p = 0.1, 0.9; w = 1, 1) and two "
                           "with CSI (p1 = 0.1, w1 = 1; w2 = 100), p2 of the CSI pair swept from "
                           "0 to 1; weights normalized. Policies: whittle, randomized, greedy.");
             c.system.sensors = {sensor(1, 0.1, Csi::Unknown), sensor(1, 0.9, Csi::Unknown),
                                 sensor(1, 0.1, Csi::Known), sensor(100, 0.5, Csi::Known)};
             c.sweep = SweepSpec{"sensors[3].p", grid(0, 10), Csi::Unknown};
             return c;
         }},
        {"partial2",
         [] {
             auto c = base("partial2",
                           "Partial CSI with the roles exchanged: without CSI p1 = 0.1 (w = 1) and "
                           "p2 swept from 0 to 1 (w = 100); with CSI p = 0.1, 0.9 (w = 1, 1); "
                           "weights normalized. Policies: whittle, randomized, greedy.");
             c.system.sensors = {sensor(1, 0.1, Csi::Unknown), sensor(100, 0.5, Csi::Unknown),
                                 sensor(1, 0.1, Csi::Known), sensor(1, 0.9, Csi::Known)};
             c.sweep = SweepSpec{"sensors[1].p", grid(0, 10), Csi::Unknown};
             return c;
         }},
        {"fig9",
         [] {
             return trade_off("fig9",
                              "Throughput of the CA-AoI Whittle policy, the AoI Whittle policy "
                              "(numeric index) and the max-throughput policy.",
                              {entry(PolicyKind::Whittle), entry(PolicyKind::Whittle, MetricKind::VanillaAoi),
                               entry(PolicyKind::MaxThroughput)});
         }},
        {"fig10",
         [] {
             return trade_off("fig10",
                              "Fraction of slots given to the poor sensor (frac_sensor_0) under the "
                              "same three policies.",
                              {entry(PolicyKind::Whittle), entry(PolicyKind::Whittle, MetricKind::VanillaAoi),
                               entry(PolicyKind::MaxThroughput)});
         }},
        {"fig11",
         [] {
             const std::vector<MetricKind> aoi{MetricKind::VanillaAoi};
             return trade_off("fig11",
                              "Freshness of the same three policies measured in vanilla AoI.",
                              {entry(PolicyKind::Whittle, MetricKind::CaAoi, aoi),
                               entry(PolicyKind::Whittle, MetricKind::VanillaAoi, aoi),
                               entry(PolicyKind::MaxThroughput, MetricKind::CaAoi, aoi)});
         }},
        {"fig12",
         [] {
             const std::vector<MetricKind> both{MetricKind::CaAoi, MetricKind::VanillaAoi};
             return trade_off("fig12",
                              "Both Whittle policies scored in both metrics, side by side.",
                              {entry(PolicyKind::Whittle, MetricKind::CaAoi, both),
                               entry(PolicyKind::Whittle, MetricKind::VanillaAoi, both)});
         }},
    };
    return presets;
}

} // namespace

std::vector<std::string> preset_names() {
    // Figure order rather than lexicographic order.
    return {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "partial1", "partial2",
            "fig9", "fig10", "fig11", "fig12"};
}

ExperimentConfig preset(const std::string& name) {
    const auto& r = registry();
    const auto it = r.find(name);
    if (it == r.end())
        throw Error(ErrorCode::ValidationError, "preset: unknown preset '" + name + "'");
    ExperimentConfig c = it->second();
    validate_config(c);
    return c;
}

} // namespace caaoi
