// caaoi: run CA-AoI scheduling experiments, print bounds and index tables.
//
// Exit codes: 0 success, 1 validation, 2 runtime, 3 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "caaoi/config.hpp"
#include "caaoi/report.hpp"
#include "caaoi/sim.hpp"

namespace {

using namespace caaoi;

enum Exit : int { kOk = 0, kValidation = 1, kRuntime = 2, kIo = 3 };

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::IoError: return kIo;
    case ErrorCode::ConfigParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::NonPositiveWeight:
    case ErrorCode::ProbabilityOutOfRange:
    case ErrorCode::EmptySystem:
    case ErrorCode::BadParameterPath:
    case ErrorCode::ZeroHorizon: return kValidation;
    default: return kRuntime;
    }
}

struct Source {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed, horizon;
    std::optional<std::uint32_t> reps;
    unsigned jobs = 1;
    std::string out;
};

void add_source_options(CLI::App* cmd, Source& src, bool overrides) {
    auto* cfg = cmd->add_option("--config", src.config_path, "JSON experiment file");
    auto* pre = cmd->add_option("--preset", src.preset_name, "built-in preset (see `describe`)");
    cfg->excludes(pre);
    cmd->add_option("--out", src.out, "CSV output path (a .json sidecar is written next to it)");
    if (!overrides)
        return;
    cmd->add_option("--seed", src.seed, "master seed");
    cmd->add_option("--horizon", src.horizon, "slots per replication")->check(CLI::PositiveNumber);
    cmd->add_option("--reps", src.reps, "replications")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", src.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const Source& src) {
    if (src.config_path.empty() == src.preset_name.empty())
        throw Error(ErrorCode::ValidationError, "exactly one of --config or --preset is required");
    ExperimentConfig cfg = src.config_path.empty() ? preset(src.preset_name) : load_config(src.config_path);
    if (src.seed)
        cfg.seed = *src.seed;
    if (src.horizon)
        cfg.horizon = *src.horizon;
    if (src.reps)
        cfg.replications = *src.reps;
    if (!src.out.empty())
        cfg.output = src.out;
    validate_config(cfg);
    return cfg;
}

std::size_t count_rows(const std::string& csv) {
    std::size_t lines = 0;
    for (char c : csv)
        lines += c == '\n';
    return lines == 0 ? 0 : lines - 1;
}

void emit(const std::string& csv, const std::string& path, const ExperimentConfig* cfg,
          const std::string& command) {
    if (path.empty() || path == "-") {
        std::fwrite(csv.data(), 1, csv.size(), stdout);
        return;
    }
    write_text_file(path, csv);
    if (cfg)
        write_text_file(path + ".json", sidecar_json(*cfg, command, path, count_rows(csv)));
    std::fprintf(stderr, "wrote %s\n", path.c_str());
}

int cmd_run(const Source& src, bool require_sweep, const std::string& command) {
    const ExperimentConfig cfg = resolve(src);
    if (require_sweep && !cfg.sweep)
        throw Error(ErrorCode::ValidationError, "sweep: the experiment defines no sweep");
    const auto points = sweep(to_sweep_request(cfg), src.jobs);
    emit(results_csv(cfg, points), cfg.output, &cfg, command);
    return kOk;
}

int cmd_bounds(const Source& src) {
    const ExperimentConfig cfg = resolve(src);
    emit(bounds_csv(cfg), src.out, nullptr, "bounds");
    return kOk;
}

int cmd_describe(const std::string& name) {
    const auto names = name.empty() ? preset_names() : std::vector<std::string>{name};
    for (const auto& n : names) {
        const ExperimentConfig c = preset(n);
        std::printf("%s\n  %s\n", n.c_str(), c.description.c_str());
        if (!name.empty())
            std::printf("%s\n", config_to_json(c).c_str());
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel-aware age-of-information scheduling experiments"};
    app.set_version_flag("--version", std::string(caaoi::kToolVersion));
    app.require_subcommand(1);

    Source run_src, sweep_src, bounds_src;
    auto* run = app.add_subcommand("run", "simulate every policy (and sweep point) of an experiment");
    add_source_options(run, run_src, true);
    auto* sw = app.add_subcommand("sweep", "like run, but the experiment must define a sweep");
    add_source_options(sw, sweep_src, true);
    auto* bounds = app.add_subcommand("bounds", "lower bounds for each system of an experiment");
    add_source_options(bounds, bounds_src, false);
    bounds->add_option("--seed", bounds_src.seed, "seed for generated systems");

    std::string mode = "unknown", table_out;
    double w = 1.0, p = 0.5;
    caaoi::Age x_max = 10;
    auto* table = app.add_subcommand("index-table", "closed-form vs numeric Whittle indices");
    table->add_option("--mode", mode, "csi availability: unknown|known")
        ->check(CLI::IsMember({"unknown", "known"}));
    table->add_option("--w", w, "weight");
    table->add_option("--p", p, "channel ON probability");
    table->add_option("--x-max", x_max, "largest age");
    table->add_option("--out", table_out, "CSV output path");

    std::string describe_name;
    auto* describe = app.add_subcommand("describe", "list presets, or print one in full");
    describe->add_option("--preset,name", describe_name, "preset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kValidation;
    }

    try {
        if (*run)
            return cmd_run(run_src, false, "run");
        if (*sw)
            return cmd_run(sweep_src, true, "sweep");
        if (*bounds)
            return cmd_bounds(bounds_src);
        if (*table) {
            emit(index_table_csv(parse_csi(mode), w, p, x_max), table_out, nullptr, "index-table");
            return kOk;
        }
        if (*describe)
            return cmd_describe(describe_name);
    } catch (const caaoi::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
    return kOk;
}
