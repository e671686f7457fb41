#include "caaoi/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace caaoi {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ConfigParseError, field + ": " + what);
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ValidationError, field + ": " + what);
}

void reject_unknown_keys(const ordered_json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            ok = ok || key == a;
        if (!ok)
            invalid(where.empty() ? key : where + "." + key, "unknown key");
    }
}

const ordered_json& require_object(const ordered_json& j, const std::string& field) {
    if (!j.is_object())
        parse_fail(field, "expected an object");
    return j;
}

double get_number(const ordered_json& j, const std::string& field) {
    if (!j.is_number())
        parse_fail(field, "expected a number");
    return j.get<double>();
}

std::uint64_t get_unsigned(const ordered_json& j, const std::string& field) {
    if (j.is_number_unsigned())
        return j.get<std::uint64_t>();
    if (j.is_number_integer())
        invalid(field, "must be non-negative");
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19)
            return static_cast<std::uint64_t>(d);
        invalid(field, "must be a non-negative integer");
    }
    parse_fail(field, "expected an integer");
}

std::string get_string(const ordered_json& j, const std::string& field) {
    if (!j.is_string())
        parse_fail(field, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const ordered_json& j, const std::string& field) {
    if (!j.is_boolean())
        parse_fail(field, "expected true or false");
    return j.get<bool>();
}

const ordered_json& require_array(const ordered_json& j, const std::string& field) {
    if (!j.is_array())
        parse_fail(field, "expected an array");
    return j;
}

template <typename F>
auto with_field(const std::string& field, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::ConfigParseError)
            invalid(field, e.detail());
        throw;
    }
}

std::string_view to_string(GreedyCsiRule r) { return r == GreedyCsiRule::OnOnly ? "on_only" : "any"; }

} // namespace

std::string_view to_string(Csi c) { return c == Csi::Known ? "known" : "unknown"; }

PolicyKind parse_policy_kind(const std::string& s) {
    if (s == "whittle") return PolicyKind::Whittle;
    if (s == "randomized") return PolicyKind::Randomized;
    if (s == "greedy") return PolicyKind::Greedy;
    if (s == "max_throughput") return PolicyKind::MaxThroughput;
    throw Error(ErrorCode::ValidationError,
                "unknown policy kind '" + s + "' (whittle|randomized|greedy|max_throughput)");
}

MetricKind parse_metric(const std::string& s) {
    if (s == "ca_aoi") return MetricKind::CaAoi;
    if (s == "aoi") return MetricKind::VanillaAoi;
    throw Error(ErrorCode::ValidationError, "unknown metric '" + s + "' (ca_aoi|aoi)");
}

Csi parse_csi(const std::string& s) {
    if (s == "unknown") return Csi::Unknown;
    if (s == "known") return Csi::Known;
    throw Error(ErrorCode::ValidationError, "unknown csi '" + s + "' (unknown|known)");
}

std::string default_label(const PolicySpec& spec) {
    switch (spec.kind) {
    case PolicyKind::Whittle:
        return spec.metric == MetricKind::CaAoi ? "whittle" : "whittle_aoi";
    case PolicyKind::Randomized: return "randomized";
    case PolicyKind::Greedy:
        return spec.greedy_rule == GreedyCsiRule::OnOnly ? "greedy" : "greedy_any";
    case PolicyKind::MaxThroughput: return "max_throughput";
    }
    return "policy";
}

ExperimentConfig parse_config(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw Error(ErrorCode::ConfigParseError, std::string("malformed JSON: ") + e.what());
    }
    require_object(root, "<root>");
    reject_unknown_keys(root, "",
                        {"schema_version", "name", "description", "system", "normalize_weights",
                         "policies", "sweep", "horizon", "replications", "seed", "output"});

    ExperimentConfig cfg;
    if (root.contains("schema_version")) {
        const auto v = get_unsigned(root["schema_version"], "schema_version");
        if (v != static_cast<std::uint64_t>(kSchemaVersion))
            invalid("schema_version", "unsupported version " + std::to_string(v));
    }
    if (root.contains("name"))
        cfg.name = get_string(root["name"], "name");
    if (root.contains("description"))
        cfg.description = get_string(root["description"], "description");

    if (!root.contains("system"))
        invalid("system", "required");
    const auto& sys = require_array(root["system"], "system");
    for (std::size_t i = 0; i < sys.size(); ++i) {
        const std::string f = "system[" + std::to_string(i) + "]";
        require_object(sys[i], f);
        reject_unknown_keys(sys[i], f, {"weight", "p", "csi"});
        SensorSpec s;
        if (!sys[i].contains("weight"))
            invalid(f + ".weight", "required");
        if (!sys[i].contains("p"))
            invalid(f + ".p", "required");
        s.weight = get_number(sys[i]["weight"], f + ".weight");
        s.channel_on_prob = get_number(sys[i]["p"], f + ".p");
        if (sys[i].contains("csi"))
            s.csi = with_field(f + ".csi", [&] { return parse_csi(get_string(sys[i]["csi"], f + ".csi")); });
        cfg.system.sensors.push_back(s);
    }
    if (root.contains("normalize_weights"))
        cfg.system.normalize_weights = get_bool(root["normalize_weights"], "normalize_weights");

    if (!root.contains("policies"))
        invalid("policies", "required");
    const auto& pols = require_array(root["policies"], "policies");
    for (std::size_t i = 0; i < pols.size(); ++i) {
        const std::string f = "policies[" + std::to_string(i) + "]";
        require_object(pols[i], f);
        reject_unknown_keys(pols[i], f, {"kind", "metric", "report", "label", "greedy_rule"});
        PolicyEntry e;
        if (!pols[i].contains("kind"))
            invalid(f + ".kind", "required");
        e.spec.kind = with_field(f + ".kind",
                                 [&] { return parse_policy_kind(get_string(pols[i]["kind"], f + ".kind")); });
        if (pols[i].contains("metric"))
            e.spec.metric = with_field(
                f + ".metric", [&] { return parse_metric(get_string(pols[i]["metric"], f + ".metric")); });
        if (pols[i].contains("greedy_rule")) {
            const auto r = get_string(pols[i]["greedy_rule"], f + ".greedy_rule");
            if (r == "on_only")
                e.spec.greedy_rule = GreedyCsiRule::OnOnly;
            else if (r == "any")
                e.spec.greedy_rule = GreedyCsiRule::Any;
            else
                invalid(f + ".greedy_rule", "expected on_only or any");
        }
        if (pols[i].contains("report")) {
            const auto& rep = require_array(pols[i]["report"], f + ".report");
            for (std::size_t k = 0; k < rep.size(); ++k) {
                const std::string rf = f + ".report[" + std::to_string(k) + "]";
                e.report.push_back(with_field(rf, [&] { return parse_metric(get_string(rep[k], rf)); }));
            }
        } else {
            e.report.push_back(e.spec.metric);
        }
        e.label = pols[i].contains("label") ? get_string(pols[i]["label"], f + ".label")
                                            : default_label(e.spec);
        cfg.policies.push_back(std::move(e));
    }

    if (root.contains("sweep") && !root["sweep"].is_null()) {
        const auto& sw = require_object(root["sweep"], "sweep");
        reject_unknown_keys(sw, "sweep", {"path", "values", "csi"});
        SweepSpec s;
        if (!sw.contains("path"))
            invalid("sweep.path", "required");
        if (!sw.contains("values"))
            invalid("sweep.values", "required");
        s.path = get_string(sw["path"], "sweep.path");
        const auto& vals = require_array(sw["values"], "sweep.values");
        for (std::size_t k = 0; k < vals.size(); ++k)
            s.values.push_back(get_number(vals[k], "sweep.values[" + std::to_string(k) + "]"));
        if (sw.contains("csi"))
            s.csi = with_field("sweep.csi", [&] { return parse_csi(get_string(sw["csi"], "sweep.csi")); });
        cfg.sweep = std::move(s);
    }

    if (root.contains("horizon"))
        cfg.horizon = get_unsigned(root["horizon"], "horizon");
    if (root.contains("replications")) {
        const auto r = get_unsigned(root["replications"], "replications");
        if (r > 1'000'000'000ULL)
            invalid("replications", "too large");
        cfg.replications = static_cast<std::uint32_t>(r);
    }
    if (root.contains("seed"))
        cfg.seed = get_unsigned(root["seed"], "seed");
    if (root.contains("output"))
        cfg.output = get_string(root["output"], "output");

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoError, path + ": read failed");
    return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.system.sensors.empty())
        invalid("system", "must list at least one sensor");
    for (std::size_t i = 0; i < cfg.system.sensors.size(); ++i) {
        const auto& s = cfg.system.sensors[i];
        const std::string f = "system[" + std::to_string(i) + "]";
        if (!(s.weight > 0.0) || !std::isfinite(s.weight))
            invalid(f + ".weight", "must be positive (got " + std::to_string(s.weight) + ")");
        if (!(s.channel_on_prob >= 0.0 && s.channel_on_prob <= 1.0))
            invalid(f + ".p", "must lie in [0, 1]");
    }
    if (cfg.policies.empty())
        invalid("policies", "must list at least one policy");
    std::set<std::pair<std::string, MetricKind>> rows;
    for (std::size_t i = 0; i < cfg.policies.size(); ++i) {
        const auto& e = cfg.policies[i];
        const std::string f = "policies[" + std::to_string(i) + "]";
        if (e.label.empty())
            invalid(f + ".label", "must not be empty");
        if (e.report.empty())
            invalid(f + ".report", "must list at least one metric");
        for (MetricKind m : e.report)
            if (!rows.insert({e.label, m}).second)
                invalid(f, "duplicate (label, metric) row '" + e.label + "'");
    }
    if (cfg.horizon == 0)
        invalid("horizon", "must be at least 1");
    if (cfg.replications == 0)
        invalid("replications", "must be at least 1");
    if (cfg.sweep) {
        ParameterPath path;
        try {
            path = ParameterPath::parse(cfg.sweep->path);
        } catch (const Error& e) {
            invalid("sweep.path", e.detail());
        }
        for (std::size_t k = 0; k < cfg.sweep->values.size(); ++k) {
            const double v = cfg.sweep->values[k];
            const std::string f = "sweep.values[" + std::to_string(k) + "]";
            switch (path.kind) {
            case ParameterPath::Kind::SensorProb:
                if (!(v >= 0.0 && v <= 1.0))
                    invalid(f, "probability must lie in [0, 1]");
                break;
            case ParameterPath::Kind::SensorWeight:
                if (!(v > 0.0) || !std::isfinite(v))
                    invalid(f, "weight must be positive");
                break;
            case ParameterPath::Kind::SystemSize:
                if (!(v >= 1.0 && v <= 100000.0) || v != std::floor(v))
                    invalid(f, "n must be a positive integer");
                break;
            }
        }
        if (path.kind != ParameterPath::Kind::SystemSize && path.sensor >= cfg.system.size())
            invalid("sweep.path", "addresses sensor " + std::to_string(path.sensor) +
                                      " but the system has " + std::to_string(cfg.system.size()));
    }
}

std::string config_to_json(const ExperimentConfig& cfg, int indent) {
    ordered_json root;
    root["schema_version"] = cfg.schema_version;
    if (!cfg.name.empty())
        root["name"] = cfg.name;
    if (!cfg.description.empty())
        root["description"] = cfg.description;
    root["system"] = ordered_json::array();
    for (const auto& s : cfg.system.sensors)
        root["system"].push_back(
            {{"weight", s.weight}, {"p", s.channel_on_prob}, {"csi", std::string(to_string(s.csi))}});
    root["normalize_weights"] = cfg.system.normalize_weights;
    root["policies"] = ordered_json::array();
    for (const auto& e : cfg.policies) {
        ordered_json p;
        p["kind"] = std::string(to_string(e.spec.kind));
        p["metric"] = std::string(to_string(e.spec.metric));
        if (e.spec.kind == PolicyKind::Greedy)
            p["greedy_rule"] = std::string(to_string(e.spec.greedy_rule));
        p["label"] = e.label;
        p["report"] = ordered_json::array();
        for (MetricKind m : e.report)
            p["report"].push_back(std::string(to_string(m)));
        root["policies"].push_back(std::move(p));
    }
    if (cfg.sweep) {
        ordered_json sw;
        sw["path"] = cfg.sweep->path;
        sw["values"] = cfg.sweep->values;
        if (cfg.sweep->path == "n")
            sw["csi"] = std::string(to_string(cfg.sweep->csi));
        root["sweep"] = std::move(sw);
    }
    root["horizon"] = cfg.horizon;
    root["replications"] = cfg.replications;
    root["seed"] = cfg.seed;
    if (!cfg.output.empty())
        root["output"] = cfg.output;
    return root.dump(indent);
}

SweepRequest to_sweep_request(const ExperimentConfig& cfg) {
    SweepRequest req;
    req.base = cfg.system;
    for (const auto& e : cfg.policies)
        req.policies.push_back(e.spec);
    if (cfg.sweep) {
        req.path = ParameterPath::parse(cfg.sweep->path);
        req.values = cfg.sweep->values;
        req.generated_csi = cfg.sweep->csi;
    } else {
        req.path = {ParameterPath::Kind::SensorProb, 0};
        req.values = {cfg.system.sensors.at(0).channel_on_prob};
    }
    req.horizon = cfg.horizon;
    req.seed = cfg.seed;
    req.replications = cfg.replications;
    return req;
}

} // namespace caaoi
