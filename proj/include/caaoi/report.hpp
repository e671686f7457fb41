#pragma once

/**
 * @file report.hpp
 * @brief Serialization of results: the results CSV, the bounds and index
 *        tables, and the JSON sidecar. All text is UTF-8 with '\n' endings.
 *
 * Results CSV columns (fixed order):
 *   sweep_value, policy, metric, avg_weighted_age, std_error, throughput,
 *   frac_sensor_0 .. frac_sensor_{n-1}, lower_bound, horizon, replications, seed
 * where n is the largest system size in the sweep. lower_bound is blank for
 * rows measured in vanilla AoI, which the bounds do not cover.
 */

#include <string>
#include <vector>

#include "caaoi/config.hpp"
#include "caaoi/sim.hpp"

namespace caaoi {

inline constexpr int kCsvVersion = 1;

/// printf "%.12g"; the representation used in every CSV.
std::string format_number(double v);

std::string results_csv(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points);

/// Systems at each sweep point (the base system alone without a sweep).
std::vector<std::pair<double, SystemSpec>> sweep_systems(const ExperimentConfig& cfg);

/// Columns: sweep_value, n_unknown, n_known, l_minus, l_plus, lower_bound.
std::string bounds_csv(const ExperimentConfig& cfg);

/// Columns: x, closed_form, numeric, abs_diff, for x = 0..x_max.
std::string index_table_csv(Csi mode, double w, double p, Age x_max);

/// Sidecar with tool version, command, the full config echo and row count.
std::string sidecar_json(const ExperimentConfig& cfg, const std::string& command,
                         const std::string& csv_path, std::size_t rows);

/// Writes `content` to `path`; IoError on failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace caaoi
