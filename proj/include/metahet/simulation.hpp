// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo engine: draws individual-level data under the random-effects
// ANOVA models, collapses each study to summary statistics and records the
// I2, I2_A and I2_ANOVA estimates per replication.
//
// Every replication owns a child RNG stream seeded from (root seed, n_base,
// replication index), so results do not depend on the number of workers.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "metahet/effect_sizes.hpp"
#include "metahet/model.hpp"

namespace metahet {

using SimRng = std::mt19937_64;

enum class SizeSchedule {
  Proportional,  // n_i = i * n_base, i = 1..k
  Balanced,      // n_i = n_base
};

enum class VarianceModel {
  CommonPop,  // every study shares sigma2
  GammaPop,   // sigma_i^2 ~ Gamma(shape, scale), fresh per study and replication
};

std::string_view to_string(SizeSchedule schedule) noexcept;
std::string_view to_string(VarianceModel model) noexcept;

struct SimConfig {
  EffectSizeKind kind = EffectSizeKind::Mean;
  int k = 10;
  SizeSchedule schedule = SizeSchedule::Proportional;
  std::vector<int> n_grid{10, 20, 30, 40, 50, 60, 70, 80, 90};

  double mu = 0.0;    // Mean kind
  double mu_t = 0.0;  // two-arm kinds
  double mu_c = 0.0;
  /// Between-study variance. For two-arm kinds this is var(delta_T - delta_C);
  /// each arm deviation is drawn from N(0, tau2 / 2).
  double tau2 = 9.0;
  /// Per-observation error variance for Mean and MD. SMD always draws unit
  /// errors and rescales each study by sigma_i ~ Unif(scale_lo, scale_hi).
  double sigma2 = 100.0;

  VarianceModel variance_model = VarianceModel::CommonPop;
  double gamma_shape = 25.0;
  double gamma_scale = 4.0;

  double scale_lo = 0.5;
  double scale_hi = 1.5;
  SmdMethod smd_method = SmdMethod::HedgesG;

  int reps = 10000;
  std::uint64_t seed = 20240101;
  /// 0 picks std::thread::hardware_concurrency(). Never affects results.
  unsigned workers = 0;
};

/// Throws InvalidConfig naming the offending field.
void validate(const SimConfig& config);

std::vector<int> study_sizes(const SimConfig& config, int n_base);

/// Population variance the true ICC_MA refers to: sigma2 for Mean/MD,
/// gamma mean (shape * scale) under GammaPop, 1 for SMD.
double reference_sigma2_pop(const SimConfig& config);
double true_icc_ma(const SimConfig& config);

/// One study per entry of `sizes`. Mean kind only.
MetaDataset gen_one_arm(const SimConfig& config, std::span<const int> sizes, SimRng& rng);
/// Both arms of study i get sizes[i] subjects.
MetaDataset gen_two_arm_md(const SimConfig& config, std::span<const int> sizes, SimRng& rng);
/// Draws the same unit-variance arm data as gen_two_arm_md would with
/// sigma2 = 1, then draws sigma_i per study and rescales study i.
MetaDataset gen_two_arm_smd(const SimConfig& config, std::span<const int> sizes, SimRng& rng);

MetaDataset generate(const SimConfig& config, std::span<const int> sizes, SimRng& rng);

/// Child stream for one replication. `stream` separates independent uses of
/// the same root seed (grid point, check type).
SimRng replication_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t rep);

struct StatisticSummary {
  double mean = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double lo_whisker = 0.0;  // smallest draw >= q1 - 1.5 IQR
  double hi_whisker = 0.0;  // largest draw <= q3 + 1.5 IQR
};

/// Tukey box summary. Quartiles use linear interpolation between order
/// statistics; the mean is an ordered left-to-right sum.
StatisticSummary summarize(std::span<const double> draws);

struct GridPointResult {
  int n_base = 0;
  std::vector<int> sizes;
  double n_tilde = 0.0;
  double icc_ma_true = 0.0;

  std::vector<double> i2;
  std::vector<double> i2_a;
  std::vector<double> i2_anova;

  StatisticSummary i2_summary;
  StatisticSummary i2_a_summary;
  StatisticSummary i2_anova_summary;
};

struct SimResult {
  SimConfig config;
  std::vector<GridPointResult> points;
};

GridPointResult run_grid_point(const SimConfig& config, int n_base);
SimResult run_monte_carlo(const SimConfig& config);

struct Lemma1Report {
  int reps = 0;
  double n_tilde = 0.0;
  double mean_msb = 0.0;
  double mean_msw = 0.0;
  double expected_msb = 0.0;  // n_tilde tau2 + sigma2
  double expected_msw = 0.0;  // sigma2
  double rel_dev_msb = 0.0;
  double rel_dev_msw = 0.0;
  double mean_difference = 0.0;      // mean MSB - mean MSW
  double expected_difference = 0.0;  // n_tilde tau2
  double rel_dev_difference = 0.0;   // NaN when tau2 = 0
};

/// Monte Carlo check of the mean-square expectations under the one-arm
/// model with a common population variance.
Lemma1Report lemma1_check(const SimConfig& config, int n_base, int reps);

}  // namespace metahet
