// SPDX-License-Identifier: Apache-2.0
//
// Two-arm summary data reduced to the canonical (y, var_y, n_eff) triple,
// for raw mean differences and standardized mean differences.
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "metahet/model.hpp"

namespace metahet {

enum class SmdMethod {
  HedgesG,  // small-sample corrected, the default
  CohensD,
};

std::string_view to_string(SmdMethod method) noexcept;
/// Accepts "hedges" or "cohen".
SmdMethod parse_smd_method(std::string_view text);

struct DerivedEffect {
  double y = 0.0;
  double var_y = 0.0;
  double n_eff = 0.0;
};

/// 1 / (1/n_t + 1/n_c)
double effective_sample_size(int n_t, int n_c);

DerivedEffect md_effect(const TwoArmStudy& study);

/// Pooled standard deviation of the two arms. Arm SDs are rebuilt from the
/// standard errors as se * sqrt(n) and pooled on n - 1 degrees of freedom.
double pooled_sd(const TwoArmStudy& study);

/// Hedges' correction factor J = 1 - 3 / (4 (n_t + n_c - 2) - 1).
double hedges_correction(int n_t, int n_c);

/// Standardized mean difference of a two-arm study.
///
/// HedgesG: g = J d with variance (n_t + n_c)/(n_t n_c) + g^2 / (2 (n_t + n_c)).
/// CohensD: d with variance (n_t + n_c)/(n_t n_c) + d^2 / (2 (n_t + n_c)).
DerivedEffect smd_effect(const TwoArmStudy& study, SmdMethod method = SmdMethod::HedgesG);

/// Alternate Hedges variance J^2 ((n_t + n_c)/(n_t n_c) + d^2 / (2 (n_t + n_c))).
/// Exposed for comparison only; dataset builders never use it.
double hedges_variance_j2_scaled(const TwoArmStudy& study);

MetaDataset make_md_dataset(std::span<const TwoArmStudy> studies);
MetaDataset make_smd_dataset(std::span<const TwoArmStudy> studies,
                             SmdMethod method = SmdMethod::HedgesG);

}  // namespace metahet
