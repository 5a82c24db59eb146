// SPDX-License-Identifier: Apache-2.0
//
// Scenario config files and simulation summary output.
//
// Config is a JSON object; every key is optional except "kind" and "tau2":
//
//   kind            "mean" | "md" | "smd"
//   k               number of studies (default 10)
//   schedule        "proportional" (n_i = i * n) | "balanced" (n_i = n)
//   n_grid          base sample sizes, default [10, 20, ..., 90]
//   mu, mu_t, mu_c  true means (default 0)
//   tau2            between-study variance
//   sigma2          error variance (default 100 for mean, 1 otherwise)
//   variance_model  "common" | "gamma" (mean kind only)
//   gamma_shape, gamma_scale   default 25 and 4
//   scale_lo, scale_hi         SMD study scale range, default 0.5 and 1.5
//   smd_method      "hedges" | "cohen"
//   reps            replications per grid point (default 10000)
//   seed            unsigned 64-bit root seed
//   workers         thread count, 0 = all cores; never changes results
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "json.hpp"
#include "metahet/simulation.hpp"

namespace metahet {

SimConfig sim_config_from_json(const nlohmann::json& doc);
SimConfig parse_sim_config(std::string_view text);
SimConfig load_sim_config(const std::filesystem::path& path);
nlohmann::json to_json(const SimConfig& config);

/// Header: n_base,statistic,mean,q1,median,q3,lo_whisker,hi_whisker,icc_ma_true
/// with one row per grid point and statistic (I2, I2_A, I2_ANOVA).
void write_summary_csv(std::ostream& out, const SimResult& result);

}  // namespace metahet
