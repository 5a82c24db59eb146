// SPDX-License-Identifier: Apache-2.0
#include "metahet/effect_sizes.hpp"

#include <cmath>
#include <string>

#include "metahet/error.hpp"

namespace metahet {

namespace {

double pooled_variance(const TwoArmStudy& s) {
  const double nt = s.n_t;
  const double nc = s.n_c;
  // n (n - 1) se^2 == (n - 1) sd^2
  return (nt * (nt - 1.0) * s.se_t * s.se_t + nc * (nc - 1.0) * s.se_c * s.se_c) / (nt + nc - 2.0);
}

double cohens_d(const TwoArmStudy& s) {
  const double sd = pooled_sd(s);
  if (!(sd > 0.0) || !std::isfinite(sd)) {
    throw Error(ErrorCode::DegenerateVariance, "pooled SD of study '" + s.label + "' is zero");
  }
  return (s.y_t - s.y_c) / sd;
}

template <typename Derive>
MetaDataset build(EffectSizeKind kind, std::span<const TwoArmStudy> studies, Derive derive) {
  std::vector<StudyEffect> effects;
  std::vector<TwoArmStudy> arms(studies.begin(), studies.end());
  std::vector<std::string> labels;
  bool any_label = false;
  effects.reserve(studies.size());
  for (const auto& s : studies) {
    const DerivedEffect e = derive(s);
    effects.push_back({e.y, e.var_y, e.n_eff});
    labels.push_back(s.label);
    any_label = any_label || !s.label.empty();
  }
  if (!any_label) labels.clear();
  return MetaDataset(kind, std::move(effects), std::move(arms), std::move(labels));
}

}  // namespace

std::string_view to_string(SmdMethod method) noexcept {
  return method == SmdMethod::HedgesG ? "hedges" : "cohen";
}

SmdMethod parse_smd_method(std::string_view text) {
  if (text == "hedges") return SmdMethod::HedgesG;
  if (text == "cohen") return SmdMethod::CohensD;
  throw Error(ErrorCode::UsageError,
              "unknown SMD method '" + std::string(text) + "' (expected hedges or cohen)");
}

double effective_sample_size(int n_t, int n_c) {
  if (n_t < 1 || n_c < 1) {
    throw Error(ErrorCode::InvalidStudy, "arm sizes must be positive");
  }
  return 1.0 / (1.0 / n_t + 1.0 / n_c);
}

DerivedEffect md_effect(const TwoArmStudy& study) {
  validate(study);
  return {study.y_t - study.y_c,
          study.se_t * study.se_t + study.se_c * study.se_c,
          effective_sample_size(study.n_t, study.n_c)};
}

double pooled_sd(const TwoArmStudy& study) {
  validate(study);
  return std::sqrt(pooled_variance(study));
}

double hedges_correction(int n_t, int n_c) {
  if (n_t < 2 || n_c < 2) {
    throw Error(ErrorCode::InsufficientDegreesOfFreedom, "Hedges' correction needs n_t, n_c >= 2");
  }
  return 1.0 - 3.0 / (4.0 * (n_t + n_c - 2) - 1.0);
}

DerivedEffect smd_effect(const TwoArmStudy& study, SmdMethod method) {
  const double d = cohens_d(study);
  const double nt = study.n_t;
  const double nc = study.n_c;
  const double y = method == SmdMethod::HedgesG ? hedges_correction(study.n_t, study.n_c) * d : d;
  const double var = (nt + nc) / (nt * nc) + y * y / (2.0 * (nt + nc));
  return {y, var, effective_sample_size(study.n_t, study.n_c)};
}

double hedges_variance_j2_scaled(const TwoArmStudy& study) {
  const double d = cohens_d(study);
  const double j = hedges_correction(study.n_t, study.n_c);
  const double nt = study.n_t;
  const double nc = study.n_c;
  return j * j * ((nt + nc) / (nt * nc) + d * d / (2.0 * (nt + nc)));
}

MetaDataset make_md_dataset(std::span<const TwoArmStudy> studies) {
  return build(EffectSizeKind::MeanDifference, studies, [](const TwoArmStudy& s) { return md_effect(s); });
}

MetaDataset make_smd_dataset(std::span<const TwoArmStudy> studies, SmdMethod method) {
  return build(EffectSizeKind::StandardizedMeanDifference, studies,
               [method](const TwoArmStudy& s) { return smd_effect(s, method); });
}

}  // namespace metahet
