// SPDX-License-Identifier: Apache-2.0
//
// Heterogeneity statistics computed from study-level summary data.
//
// Everything here is pure arithmetic on immutable inputs. Within-study
// variances are treated as known constants.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metahet {

enum class EffectSizeKind { Mean, MeanDifference, StandardizedMeanDifference };

std::string_view to_string(EffectSizeKind kind) noexcept;
/// Accepts "mean", "md", "smd" (the CLI spellings).
EffectSizeKind parse_effect_size_kind(std::string_view text);

/// Summary data of a single-arm study: sample mean, its estimated variance
/// and the number of observations behind it.
struct OneArmStudy {
  double y = 0.0;
  double var_y = 0.0;
  int n = 0;
  std::string label;
};

/// Summary data of a two-arm study. Standard errors are those of the arm
/// means, as typically reported in published tables.
struct TwoArmStudy {
  double y_t = 0.0;
  double se_t = 0.0;
  int n_t = 0;
  double y_c = 0.0;
  double se_c = 0.0;
  int n_c = 0;
  std::string label;
};

/// Throws InvalidStudy unless se_t, se_c > 0 and n_t, n_c >= 2.
void validate(const TwoArmStudy& study);

/// Canonical per-study triple every statistic works from. For two-arm kinds
/// `n` is the real-valued effective sample size 1/(1/n_t + 1/n_c).
struct StudyEffect {
  double y = 0.0;
  double var_y = 0.0;
  double n = 0.0;
};

class MetaDataset {
 public:
  /// Validates k >= 2, var_y > 0, n > 0 and finiteness. For two-arm kinds
  /// `arms` is either empty or holds one entry per study.
  MetaDataset(EffectSizeKind kind, std::vector<StudyEffect> studies,
              std::vector<TwoArmStudy> arms = {},
              std::vector<std::string> labels = {});

  /// Mean-kind dataset straight from one-arm summaries (n >= 1 each).
  static MetaDataset from_one_arm(std::span<const OneArmStudy> studies);

  EffectSizeKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return studies_.size(); }
  const std::vector<StudyEffect>& studies() const noexcept { return studies_; }
  const std::vector<TwoArmStudy>& arms() const noexcept { return arms_; }
  bool has_arm_detail() const noexcept { return !arms_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  EffectSizeKind kind_;
  std::vector<StudyEffect> studies_;
  std::vector<TwoArmStudy> arms_;
  std::vector<std::string> labels_;
};

/// Inverse-variance weight aggregates shared by Q, the DL estimator and
/// the adjusted weight.
struct WeightSums {
  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_wy = 0.0;

  /// sum_w - sum_w2 / sum_w
  double spread() const noexcept { return sum_w - sum_w2 / sum_w; }
};

WeightSums weight_sums(const MetaDataset& dataset);

double cochran_q(const MetaDataset& dataset);
double dl_tau2(const MetaDataset& dataset);
/// (k - 1) / (sum_w - sum_w2 / sum_w); the typical within-study variance.
double sigma_tilde2(const MetaDataset& dataset);

double i_squared(double q, int k);
/// Adjusted mean sample size (sum n - sum n^2 / sum n) / (k - 1).
double adjusted_mean_n(std::span<const double> n);
double adjusted_mean_n(const MetaDataset& dataset);
/// Same form as adjusted_mean_n applied to the inverse-variance weights.
double adjusted_mean_weight(const MetaDataset& dataset);

double i_squared_a(double q, int k, double n_tilde);
double i_squared_a_smd(double q, int k, double w_tilde);

/// Sample-size weighted grand mean sum(n y) / sum(n).
double size_weighted_mean(const MetaDataset& dataset);
double msb_ma(const MetaDataset& dataset);
/// Pooled within-population variance. Needs n_i >= 2 for Mean, arm detail
/// for MD, and is fixed at 1 for SMD because the effects are standardized.
double msw_ma(const MetaDataset& dataset);
double i_squared_anova(double msb, double msw, double n_tilde);

/// tau2 / (tau2 + sigma_y2): share of an observed effect's variance that
/// lies between studies. Depends on the study sample sizes.
double icc_ht(double tau2, double sigma_y2);
/// tau2 / (tau2 + sigma2_pop): share of a single observation's variance that
/// lies between study populations. Invariant to the study sample sizes.
double icc_ma(double tau2, double sigma2_pop);

struct PopulationScenario {
  double mu = 0.0;
  double tau2 = 0.0;
  double sigma2_pop = 1.0;
};

double icc_ma(const PopulationScenario& scenario);

/// Which adjustment the I2_A statistic used: the adjusted mean sample size
/// for Mean/MD, the adjusted mean weight for SMD.
enum class AdjustmentKind { AdjustedMeanSize, AdjustedMeanWeight };

std::string_view to_string(AdjustmentKind kind) noexcept;

struct HeterogeneityPanel {
  EffectSizeKind kind = EffectSizeKind::Mean;
  int k = 0;

  double sum_w = 0.0;
  double sum_w2 = 0.0;
  double sum_wy = 0.0;
  double weighted_mean = 0.0;  // sum_wy / sum_w
  double q = 0.0;
  double q_excess = 0.0;       // Q - (k - 1), untruncated

  double tau2_dl = 0.0;
  double tau2_dl_raw = 0.0;
  double sigma_tilde2 = 0.0;

  /// Adjusted mean sample size of the (effective) sample sizes. I2_ANOVA
  /// uses it for every kind.
  double n_tilde = 0.0;
  AdjustmentKind adjustment = AdjustmentKind::AdjustedMeanSize;
  /// n_tilde or w_tilde, whichever `adjustment` names.
  double adjustment_value = 0.0;

  double i2 = 0.0;
  double i2_a = 0.0;
  double i2_anova = 0.0;
  /// Untruncated ratios; empty where the ratio is 0/0 (Q = 0).
  std::optional<double> i2_raw;
  std::optional<double> i2_a_raw;
  double i2_anova_raw = 0.0;

  double size_weighted_mean = 0.0;
  double msb = 0.0;
  double msw = 0.0;
};

HeterogeneityPanel full_panel(const MetaDataset& dataset);

}  // namespace metahet
