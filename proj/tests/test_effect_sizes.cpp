// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "metahet/effect_sizes.hpp"
#include "metahet/error.hpp"
#include "metahet/examples.hpp"

using namespace metahet;

namespace {

const TwoArmStudy kJackson{-34, 10.43, 9, -66, 12.78, 6, "Jackson (2021)"};
const TwoArmStudy kZheng2019{-13.6, 3.23, 48, -8.8, 3.14, 60, "Zheng (2019)"};

}  // namespace

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(9, 6) == doctest::Approx(3.6));
  CHECK(effective_sample_size(48, 60) == doctest::Approx(26.6666666667));
  CHECK(effective_sample_size(10, 10) == 5.0);
  CHECK(effective_sample_size(7, 13) == effective_sample_size(13, 7));
  CHECK_THROWS_AS(effective_sample_size(0, 5), Error);
}

TEST_CASE("mean difference of the opioid table") {
  const auto e = md_effect(kJackson);
  CHECK(e.y == 32.0);
  CHECK(e.var_y == doctest::Approx(10.43 * 10.43 + 12.78 * 12.78));
  CHECK(e.n_eff == doctest::Approx(3.6));

  const auto d = make_md_dataset(avery2022_studies());
  REQUIRE(d.size() == 3);
  CHECK(d.has_arm_detail());
  CHECK(d.labels()[2] == "Zheng (2008)");
  CHECK(d.studies()[1].y == doctest::Approx(-4.8));
  CHECK(d.studies()[2].y == doctest::Approx(-14.8));
  CHECK(d.studies()[1].var_y == doctest::Approx(20.2925));
  CHECK(d.studies()[2].n == doctest::Approx(8.742857142857));
}

TEST_CASE("pooled SD is rebuilt from the arm standard errors") {
  CHECK(pooled_sd(kJackson) == doctest::Approx(31.2956).epsilon(1e-5));
  CHECK(pooled_sd(kZheng2019) == doctest::Approx(23.4801).epsilon(1e-5));
  const double sd_t = 10.43 * 3.0;
  const double sd_c = 12.78 * std::sqrt(6.0);
  CHECK(pooled_sd(kJackson) == doctest::Approx(std::sqrt((8 * sd_t * sd_t + 5 * sd_c * sd_c) / 13.0)));
}

TEST_CASE("Hedges' g on the opioid table") {
  CHECK(hedges_correction(9, 6) == doctest::Approx(1.0 - 3.0 / 51.0));
  const auto d = make_smd_dataset(avery2022_studies(), SmdMethod::HedgesG);
  const auto& s = d.studies();
  CHECK(s[0].y == doctest::Approx(0.962361).epsilon(1e-5));
  CHECK(s[1].y == doctest::Approx(-0.202978).epsilon(1e-5));
  CHECK(s[2].y == doctest::Approx(-0.618012).epsilon(1e-5));
  CHECK(s[0].var_y == doctest::Approx(0.308649).epsilon(1e-5));
  CHECK(s[1].var_y == doctest::Approx(0.037691).epsilon(1e-4));
  CHECK(s[2].var_y == doctest::Approx(0.119835).epsilon(1e-5));

  const auto p = full_panel(d);
  CHECK(p.sum_w == doctest::Approx(38.1164).epsilon(1e-5));
  CHECK(p.sum_w2 == doctest::Approx(784.0644).epsilon(1e-6));
  CHECK(p.q == doctest::Approx(5.83473).epsilon(1e-5));
  CHECK(p.adjustment == AdjustmentKind::AdjustedMeanWeight);
  CHECK(p.adjustment_value == doctest::Approx(8.77309).epsilon(1e-5));
  CHECK(p.i2_a == doctest::Approx(0.17935).epsilon(1e-3));
  CHECK(p.i2_anova == doctest::Approx(0.19176).epsilon(1e-3));
  CHECK(p.msw == 1.0);
}

TEST_CASE("adjusted mean weight times sigma_tilde2 is one") {
  const auto d = make_smd_dataset(avery2022_studies());
  CHECK(adjusted_mean_weight(d) * sigma_tilde2(d) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Hedges' g shrinks Cohen's d") {
  for (const auto& s : avery2022_studies()) {
    const auto g = smd_effect(s, SmdMethod::HedgesG);
    const auto d = smd_effect(s, SmdMethod::CohensD);
    CHECK(std::abs(g.y) <= std::abs(d.y));
    CHECK(g.y * d.y >= 0.0);
    CHECK(g.var_y <= d.var_y);
    CHECK(g.n_eff == d.n_eff);
  }
  // J^2-scaled variance is available for comparison and is smaller still.
  CHECK(hedges_variance_j2_scaled(kJackson) < smd_effect(kJackson).var_y);
}

TEST_CASE("SMD is invariant to rescaling both arms") {
  TwoArmStudy scaled = kJackson;
  for (double c : {0.01, 3.0, 250.0}) {
    scaled.y_t = kJackson.y_t * c;
    scaled.y_c = kJackson.y_c * c;
    scaled.se_t = kJackson.se_t * c;
    scaled.se_c = kJackson.se_c * c;
    CHECK(smd_effect(scaled).y == doctest::Approx(smd_effect(kJackson).y).epsilon(1e-13));
    CHECK(smd_effect(scaled).var_y == doctest::Approx(smd_effect(kJackson).var_y).epsilon(1e-13));
  }
}

TEST_CASE("MD follows shifts and scales of the outcome") {
  TwoArmStudy moved = kZheng2019;
  moved.y_t = 5 + 2 * kZheng2019.y_t;
  moved.y_c = 5 + 2 * kZheng2019.y_c;
  moved.se_t = 2 * kZheng2019.se_t;
  moved.se_c = 2 * kZheng2019.se_c;
  CHECK(md_effect(moved).y == doctest::Approx(2 * md_effect(kZheng2019).y));
  CHECK(md_effect(moved).var_y == doctest::Approx(4 * md_effect(kZheng2019).var_y));
}

TEST_CASE("two-arm validation") {
  TwoArmStudy s = kJackson;
  s.se_t = 0.0;
  CHECK_THROWS_AS(md_effect(s), Error);
  s = kJackson;
  s.n_c = 1;
  try {
    md_effect(s);
    FAIL("expected InsufficientDegreesOfFreedom");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientDegreesOfFreedom);
  }
  s = kJackson;
  s.y_t = INFINITY;
  try {
    smd_effect(s);
    FAIL("expected InvalidStudy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidStudy);
  }
  CHECK_THROWS_AS(hedges_correction(1, 5), Error);
}

TEST_CASE("SMD method spellings") {
  CHECK(parse_smd_method("hedges") == SmdMethod::HedgesG);
  CHECK(parse_smd_method("cohen") == SmdMethod::CohensD);
  CHECK(to_string(SmdMethod::CohensD) == "cohen");
  CHECK_THROWS_AS(parse_smd_method("glass"), Error);
}
