#include "caaoi/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "caaoi/analysis.hpp"
#include "caaoi/bounds.hpp"
#include "json.hpp"

namespace caaoi {

namespace {

std::string format_long(long double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string results_csv(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points) {
    std::size_t width = 0;
    for (const auto& pt : points)
        width = std::max(width, pt.system.size());

    std::string out = "sweep_value,policy,metric,avg_weighted_age,std_error,throughput";
    for (std::size_t i = 0; i < width; ++i)
        out += ",frac_sensor_" + std::to_string(i);
    out += ",lower_bound,horizon,replications,seed\n";

    const std::string tail = "," + std::to_string(cfg.horizon) + "," +
                             std::to_string(cfg.replications) + "," + std::to_string(cfg.seed) + "\n";
    for (const auto& pt : points) {
        const std::string sweep_value = cfg.sweep ? format_number(pt.value) : "";
        const std::string bound = format_number(lower_bound_partial(pt.system).value);
        for (std::size_t k = 0; k < cfg.policies.size(); ++k) {
            const auto& entry = cfg.policies[k];
            const RunReport& rep = pt.reports.at(k);
            for (MetricKind m : entry.report) {
                const auto& st = rep.stats(m);
                out += sweep_value + "," + entry.label + "," + std::string(to_string(m)) + "," +
                       format_number(st.avg_weighted_age) + "," + format_number(st.std_error) + "," +
                       format_number(rep.throughput);
                for (std::size_t i = 0; i < width; ++i) {
                    out += ",";
                    if (i < static_cast<std::size_t>(rep.resource_fractions.size()))
                        out += format_number(rep.resource_fractions[static_cast<Eigen::Index>(i)]);
                }
                out += ",";
                if (m == MetricKind::CaAoi)
                    out += bound;
                out += tail;
            }
        }
    }
    return out;
}

std::vector<std::pair<double, SystemSpec>> sweep_systems(const ExperimentConfig& cfg) {
    const SweepRequest req = to_sweep_request(cfg);
    std::vector<std::pair<double, SystemSpec>> out;
    for (double v : req.values)
        out.emplace_back(v, apply_path(req.base, req.path, v, req.seed, req.generated_csi));
    return out;
}

std::string bounds_csv(const ExperimentConfig& cfg) {
    std::string out = "sweep_value,n_unknown,n_known,l_minus,l_plus,lower_bound\n";
    for (const auto& [value, system] : sweep_systems(cfg)) {
        const BoundReport b = lower_bound_partial(system);
        out += (cfg.sweep ? format_number(value) : std::string()) + "," +
               std::to_string(system.indices_with(Csi::Unknown).size()) + "," +
               std::to_string(system.indices_with(Csi::Known).size()) + "," +
               format_number(b.no_csi) + "," + format_number(b.csi) + "," + format_number(b.value) +
               "\n";
    }
    return out;
}

std::string index_table_csv(Csi mode, double w, double p, Age x_max) {
    if (x_max < 1)
        throw Error(ErrorCode::ValidationError, "x_max: must be at least 1");
    if (!(w > 0.0))
        throw Error(ErrorCode::ValidationError, "w: must be positive");
    if (!(p > 0.0 && p <= 1.0))
        throw Error(ErrorCode::ValidationError, "p: must lie in (0, 1]");
    using Real = long double;
    std::string out = "x,closed_form,numeric,abs_diff\n";
    for (Age x = 0; x <= x_max; ++x) {
        const Real closed = mode == Csi::Unknown
                                ? whittle_index_no_csi<Real>(x, static_cast<Real>(p), static_cast<Real>(w))
                                : whittle_index_csi<Real>(x, Channel::On, static_cast<Real>(w));
        const Real numeric = numeric_whittle<Real>(mode, x, static_cast<Real>(w), static_cast<Real>(p));
        out += std::to_string(x) + "," + format_long(closed, "%.17Lg") + "," +
               format_long(numeric, "%.17Lg") + "," + format_long(std::fabs(closed - numeric), "%.3Le") +
               "\n";
    }
    return out;
}

std::string sidecar_json(const ExperimentConfig& cfg, const std::string& command,
                         const std::string& csv_path, std::size_t rows) {
    nlohmann::ordered_json j;
    j["tool"] = "caaoi";
    j["tool_version"] = kToolVersion;
    j["csv_version"] = kCsvVersion;
    j["command"] = command;
    j["csv"] = csv_path;
    j["rows"] = rows;
    j["rng"] = "splitmix64 counter streams; replication r uses derive_key(seed, replication, r)";
    j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, path + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out)
        throw Error(ErrorCode::IoError, path + ": write failed");
}

} // namespace caaoi
