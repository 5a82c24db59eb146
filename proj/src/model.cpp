// SPDX-License-Identifier: Apache-2.0
#include "metahet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "metahet/error.hpp"

namespace metahet {

namespace {

void require_studies(std::size_t k) {
  if (k < 2) {
    throw Error(ErrorCode::InsufficientStudies,
                "at least 2 studies are required, got " + std::to_string(k));
  }
}

void require_q(double q) {
  if (!std::isfinite(q) || q < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "Q must be finite and non-negative");
  }
}

// sum_i x_i - sum_i x_i^2 / sum_i x_i, evaluated as sum_i x_i * (others_i) / sum
// so that a dominant entry does not cancel away the result.
double between_spread(std::span<const double> x) {
  const std::size_t k = x.size();
  std::vector<double> prefix(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] + x[i];
  double suffix = 0.0;
  double cross = 0.0;
  for (std::size_t i = k; i-- > 0;) {
    cross += x[i] * (prefix[i] + suffix);
    suffix += x[i];
  }
  return cross / prefix[k];
}

std::vector<double> weights_of(const MetaDataset& dataset) {
  std::vector<double> w;
  w.reserve(dataset.size());
  for (const auto& s : dataset.studies()) w.push_back(1.0 / s.var_y);
  return w;
}

std::vector<double> sizes_of(const MetaDataset& dataset) {
  std::vector<double> n;
  n.reserve(dataset.size());
  for (const auto& s : dataset.studies()) n.push_back(s.n);
  return n;
}

double weight_spread(const MetaDataset& dataset) {
  const auto w = weights_of(dataset);
  const double spread = between_spread(w);
  if (!(spread > 0.0) || !std::isfinite(spread)) {
    throw Error(ErrorCode::DegenerateWeights,
                "sum_w - sum_w2 / sum_w is not positive; all weight sits in one study");
  }
  return spread;
}

}  // namespace

std::string_view to_string(EffectSizeKind kind) noexcept {
  switch (kind) {
    case EffectSizeKind::Mean: return "mean";
    case EffectSizeKind::MeanDifference: return "md";
    case EffectSizeKind::StandardizedMeanDifference: return "smd";
  }
  return "unknown";
}

EffectSizeKind parse_effect_size_kind(std::string_view text) {
  if (text == "mean") return EffectSizeKind::Mean;
  if (text == "md") return EffectSizeKind::MeanDifference;
  if (text == "smd") return EffectSizeKind::StandardizedMeanDifference;
  throw Error(ErrorCode::UsageError,
              "unknown effect size kind '" + std::string(text) + "' (expected mean, md or smd)");
}

std::string_view to_string(AdjustmentKind kind) noexcept {
  return kind == AdjustmentKind::AdjustedMeanSize ? "n_tilde" : "w_tilde";
}

void validate(const TwoArmStudy& study) {
  const bool ok = std::isfinite(study.y_t) && std::isfinite(study.y_c) &&
                  std::isfinite(study.se_t) && std::isfinite(study.se_c) &&
                  study.se_t > 0.0 && study.se_c > 0.0;
  if (!ok) {
    throw Error(ErrorCode::InvalidStudy,
                "two-arm study '" + study.label + "' needs finite means and positive standard errors");
  }
  if (study.n_t < 2 || study.n_c < 2) {
    throw Error(ErrorCode::InsufficientDegreesOfFreedom,
                "two-arm study '" + study.label + "' needs at least 2 subjects per arm");
  }
}

MetaDataset::MetaDataset(EffectSizeKind kind, std::vector<StudyEffect> studies,
                         std::vector<TwoArmStudy> arms, std::vector<std::string> labels)
    : kind_(kind), studies_(std::move(studies)), arms_(std::move(arms)), labels_(std::move(labels)) {
  require_studies(studies_.size());
  for (std::size_t i = 0; i < studies_.size(); ++i) {
    const auto& s = studies_[i];
    if (!std::isfinite(s.y)) {
      throw Error(ErrorCode::InvalidArgument, "effect size of study " + std::to_string(i + 1) + " is not finite");
    }
    if (!(s.var_y > 0.0) || !std::isfinite(s.var_y)) {
      throw Error(ErrorCode::InvalidVariance,
                  "within-study variance of study " + std::to_string(i + 1) + " must be positive");
    }
    if (!(s.n > 0.0) || !std::isfinite(s.n)) {
      throw Error(ErrorCode::InvalidArgument,
                  "sample size of study " + std::to_string(i + 1) + " must be positive");
    }
  }
  if (!arms_.empty()) {
    if (kind_ == EffectSizeKind::Mean) {
      throw Error(ErrorCode::InvalidArgument, "arm detail is only meaningful for two-arm kinds");
    }
    if (arms_.size() != studies_.size()) {
      throw Error(ErrorCode::InvalidArgument, "arm detail must have one entry per study");
    }
    for (const auto& a : arms_) validate(a);
  }
  if (!labels_.empty() && labels_.size() != studies_.size()) {
    throw Error(ErrorCode::InvalidArgument, "labels must have one entry per study");
  }
}

MetaDataset MetaDataset::from_one_arm(std::span<const OneArmStudy> studies) {
  std::vector<StudyEffect> effects;
  std::vector<std::string> labels;
  effects.reserve(studies.size());
  bool any_label = false;
  for (const auto& s : studies) {
    if (s.n < 1) {
      throw Error(ErrorCode::InvalidArgument, "sample size of study '" + s.label + "' must be at least 1");
    }
    effects.push_back({s.y, s.var_y, static_cast<double>(s.n)});
    labels.push_back(s.label);
    any_label = any_label || !s.label.empty();
  }
  if (!any_label) labels.clear();
  return MetaDataset(EffectSizeKind::Mean, std::move(effects), {}, std::move(labels));
}

WeightSums weight_sums(const MetaDataset& dataset) {
  WeightSums sums;
  for (const auto& s : dataset.studies()) {
    const double w = 1.0 / s.var_y;
    sums.sum_w += w;
    sums.sum_w2 += w * w;
    sums.sum_wy += w * s.y;
  }
  return sums;
}

double cochran_q(const MetaDataset& dataset) {
  const auto sums = weight_sums(dataset);
  const double mean = sums.sum_wy / sums.sum_w;
  double q = 0.0;
  for (const auto& s : dataset.studies()) {
    const double d = s.y - mean;
    q += d * d / s.var_y;
  }
  return q;
}

double dl_tau2(const MetaDataset& dataset) {
  const double spread = weight_spread(dataset);
  const double k = static_cast<double>(dataset.size());
  return std::max((cochran_q(dataset) - (k - 1.0)) / spread, 0.0);
}

double sigma_tilde2(const MetaDataset& dataset) {
  const double k = static_cast<double>(dataset.size());
  return (k - 1.0) / weight_spread(dataset);
}

double i_squared(double q, int k) {
  require_studies(k < 0 ? 0 : static_cast<std::size_t>(k));
  require_q(q);
  if (q == 0.0) return 0.0;
  return std::max((q - (k - 1)) / q, 0.0);
}

double adjusted_mean_n(std::span<const double> n) {
  require_studies(n.size());
  for (double v : n) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, "sample sizes must be positive and finite");
    }
  }
  return between_spread(n) / static_cast<double>(n.size() - 1);
}

double adjusted_mean_n(const MetaDataset& dataset) {
  const auto n = sizes_of(dataset);
  return adjusted_mean_n(n);
}

double adjusted_mean_weight(const MetaDataset& dataset) {
  return weight_spread(dataset) / static_cast<double>(dataset.size() - 1);
}

double i_squared_a(double q, int k, double n_tilde) {
  require_studies(k < 0 ? 0 : static_cast<std::size_t>(k));
  require_q(q);
  if (!(n_tilde >= 1.0) || !std::isfinite(n_tilde)) {
    throw Error(ErrorCode::InvalidAdjustedSize,
                "adjusted mean sample size must be at least 1, got " + std::to_string(n_tilde));
  }
  if (q == 0.0) return 0.0;
  const double df = k - 1;
  return std::max((q - df) / (q + df * (n_tilde - 1.0)), 0.0);
}

double i_squared_a_smd(double q, int k, double w_tilde) {
  if (!(w_tilde >= 1.0) || !std::isfinite(w_tilde)) {
    throw Error(ErrorCode::InvalidAdjustedSize,
                "adjusted mean weight must be at least 1, got " + std::to_string(w_tilde));
  }
  return i_squared_a(q, k, w_tilde);
}

double size_weighted_mean(const MetaDataset& dataset) {
  double sum_n = 0.0;
  double sum_ny = 0.0;
  for (const auto& s : dataset.studies()) {
    sum_n += s.n;
    sum_ny += s.n * s.y;
  }
  return sum_ny / sum_n;
}

double msb_ma(const MetaDataset& dataset) {
  const double mean = size_weighted_mean(dataset);
  double ss = 0.0;
  for (const auto& s : dataset.studies()) {
    const double d = s.y - mean;
    ss += s.n * d * d;
  }
  return ss / static_cast<double>(dataset.size() - 1);
}

double msw_ma(const MetaDataset& dataset) {
  switch (dataset.kind()) {
    case EffectSizeKind::Mean: {
      double num = 0.0;
      double df = 0.0;
      for (const auto& s : dataset.studies()) {
        if (!(s.n >= 2.0)) {
          throw Error(ErrorCode::InsufficientDegreesOfFreedom,
                      "every study needs n >= 2 for the within-population mean square");
        }
        num += s.n * (s.n - 1.0) * s.var_y;
        df += s.n - 1.0;
      }
      return num / df;
    }
    case EffectSizeKind::MeanDifference: {
      if (!dataset.has_arm_detail()) {
        throw Error(ErrorCode::MissingArmDetail,
                    "mean-difference datasets need per-arm sizes and standard errors for MSW");
      }
      double num = 0.0;
      double total = 0.0;
      for (const auto& a : dataset.arms()) {
        const double nt = a.n_t;
        const double nc = a.n_c;
        num += nt * (nt - 1.0) * a.se_t * a.se_t + nc * (nc - 1.0) * a.se_c * a.se_c;
        total += nt + nc;
      }
      const double df = total - 2.0 * static_cast<double>(dataset.size());
      if (!(df > 0.0)) {
        throw Error(ErrorCode::InsufficientDegreesOfFreedom, "no within-arm degrees of freedom");
      }
      return num / df;
    }
    case EffectSizeKind::StandardizedMeanDifference:
      return 1.0;
  }
  return 1.0;
}

double i_squared_anova(double msb, double msw, double n_tilde) {
  if (!(msw > 0.0) || !std::isfinite(msw)) {
    throw Error(ErrorCode::InvalidVariance, "MSW must be positive");
  }
  if (!(msb >= 0.0) || !std::isfinite(msb)) {
    throw Error(ErrorCode::InvalidArgument, "MSB must be finite and non-negative");
  }
  const double denom = msb + (n_tilde - 1.0) * msw;
  if (!(n_tilde > 0.0) || !(denom > 0.0)) {
    throw Error(ErrorCode::InvalidAdjustedSize, "MSB + (n_tilde - 1) MSW must be positive");
  }
  return std::max((msb - msw) / denom, 0.0);
}

double icc_ht(double tau2, double sigma_y2) {
  if (!(sigma_y2 > 0.0)) throw Error(ErrorCode::InvalidVariance, "within-study variance must be positive");
  if (!(tau2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "between-study variance must be non-negative");
  return tau2 / (tau2 + sigma_y2);
}

double icc_ma(double tau2, double sigma2_pop) {
  if (!(sigma2_pop > 0.0)) throw Error(ErrorCode::InvalidVariance, "population variance must be positive");
  if (!(tau2 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "between-study variance must be non-negative");
  return tau2 / (tau2 + sigma2_pop);
}

double icc_ma(const PopulationScenario& scenario) { return icc_ma(scenario.tau2, scenario.sigma2_pop); }

HeterogeneityPanel full_panel(const MetaDataset& dataset) {
  HeterogeneityPanel p;
  p.kind = dataset.kind();
  p.k = static_cast<int>(dataset.size());
  const double df = p.k - 1;

  const auto sums = weight_sums(dataset);
  p.sum_w = sums.sum_w;
  p.sum_w2 = sums.sum_w2;
  p.sum_wy = sums.sum_wy;
  p.weighted_mean = sums.sum_wy / sums.sum_w;
  p.q = cochran_q(dataset);
  p.q_excess = p.q - df;

  const double spread = weight_spread(dataset);
  p.tau2_dl_raw = p.q_excess / spread;
  p.tau2_dl = std::max(p.tau2_dl_raw, 0.0);
  p.sigma_tilde2 = df / spread;

  p.n_tilde = adjusted_mean_n(dataset);
  p.i2 = i_squared(p.q, p.k);
  if (dataset.kind() == EffectSizeKind::StandardizedMeanDifference) {
    p.adjustment = AdjustmentKind::AdjustedMeanWeight;
    p.adjustment_value = spread / df;
    p.i2_a = i_squared_a_smd(p.q, p.k, p.adjustment_value);
  } else {
    p.adjustment = AdjustmentKind::AdjustedMeanSize;
    p.adjustment_value = p.n_tilde;
    p.i2_a = i_squared_a(p.q, p.k, p.n_tilde);
  }
  if (p.q > 0.0) {
    p.i2_raw = p.q_excess / p.q;
    p.i2_a_raw = p.q_excess / (p.q + df * (p.adjustment_value - 1.0));
  }

  p.size_weighted_mean = size_weighted_mean(dataset);
  p.msb = msb_ma(dataset);
  p.msw = msw_ma(dataset);
  p.i2_anova = i_squared_anova(p.msb, p.msw, p.n_tilde);
  p.i2_anova_raw = (p.msb - p.msw) / (p.msb + (p.n_tilde - 1.0) * p.msw);
  return p;
}

}  // namespace metahet
