// SPDX-License-Identifier: Apache-2.0
#include "metahet/examples.hpp"

#include <cmath>
#include <sstream>

#include "metahet/csv.hpp"
#include "metahet/effect_sizes.hpp"
#include "metahet/error.hpp"

namespace metahet {

namespace {

constexpr std::string_view kJeong =
    "study,y,n,var_y\n"
    "Wang (2013),-3.10,8,1.81\n"
    "Prasad (2012),-6.30,11,3.16\n"
    "Moniche (2012),-9.40,10,0.53\n"
    "Friedrich (2012),-14.20,20,3.04\n"
    "Honmou (2011),-7.00,12,1.40\n"
    "Savitz (2011),-9.00,10,1.60\n"
    "Battistella (2011),-3.40,6,2.41\n"
    "Suarez (2009),-2.20,5,1.15\n"
    "Savitz (2005),-1.40,5,0.97\n"
    "Bang (2005),-2.00,5,1.06\n";

constexpr std::string_view kAvery =
    "study,y_t,n_t,se_t,y_c,n_c,se_c\n"
    "Jackson (2021),-34,9,10.43,-66,6,12.78\n"
    "Zheng (2019),-13.6,48,3.23,-8.8,60,3.14\n"
    "Zheng (2008),-25.7,17,7.59,-10.9,18,2.80\n";

GoldenRow row(std::string name, double reported, double computed, bool headline = false,
              double tolerance = 0.01) {
  return GoldenRow{std::move(name), reported, computed, tolerance, headline};
}

ExampleRun jeong_mean() {
  const auto data = jeong2014_dataset();
  const auto p = full_panel(data);
  return {"jeong-mean",
          {row("sum_w", 7.68, p.sum_w), row("sum_wy", -43.39, p.sum_wy), row("Q", 106.26, p.q, true),
           row("I2", 0.92, p.i2, true), row("n_tilde", 8.97, p.n_tilde), row("I2_A", 0.55, p.i2_a, true),
           row("y_bar", -7.55, p.size_weighted_mean), row("MSB", 189.83, p.msb), row("MSW", 25.81, p.msw),
           row("I2_ANOVA", 0.41, p.i2_anova, true)}};
}

ExampleRun avery_md() {
  const auto studies = avery2022_studies();
  const auto data = make_md_dataset(studies);
  const auto p = full_panel(data);
  const auto& s = data.studies();
  // The published sum of w*y (0.35) has the wrong sign, so it is not a golden value.
  return {"avery-md",
          {row("y[1]", 32.0, s[0].y), row("y[2]", -4.8, s[1].y), row("y[3]", -14.8, s[2].y),
           row("var_y[1]", 272.14, s[0].var_y), row("var_y[2]", 20.29, s[1].var_y),
           row("var_y[3]", 65.48, s[2].var_y), row("n_eff[1]", 3.60, s[0].n), row("n_eff[2]", 26.67, s[1].n),
           row("n_eff[3]", 8.74, s[2].n), row("sum_w", 0.07, p.sum_w), row("Q", 6.50, p.q, true),
           row("I2", 0.69, p.i2, true), row("n_tilde", 9.24, p.n_tilde), row("I2_A", 0.20, p.i2_a, true),
           row("y_bar", -3.65, p.size_weighted_mean), row("MSB", 2848.76, p.msb), row("MSW", 586.93, p.msw),
           row("I2_ANOVA", 0.29, p.i2_anova, true)}};
}

ExampleRun avery_smd() {
  const auto studies = avery2022_studies();
  const auto data = make_smd_dataset(studies, SmdMethod::HedgesG);
  const auto p = full_panel(data);
  const auto& s = data.studies();
  return {"avery-smd",
          {row("g[1]", 0.96, s[0].y), row("g[2]", -0.20, s[1].y), row("g[3]", -0.62, s[2].y),
           row("var_y[1]", 0.31, s[0].var_y), row("var_y[2]", 0.04, s[1].var_y), row("var_y[3]", 0.12, s[2].var_y),
           row("sum_w", 38.12, p.sum_w, false, 0.05), row("sum_wy", -7.43, p.sum_wy),
           row("sum_w2", 784.06, p.sum_w2), row("Q", 5.83, p.q, true), row("w_tilde", 8.78, p.adjustment_value),
           row("I2", 0.66, p.i2, true), row("I2_A", 0.18, p.i2_a, true), row("I2_ANOVA", 0.19, p.i2_anova, true)}};
}

ExampleRun motivating() {
  // Three populations N(-0.05, 1), N(0, 1), N(0.05, 1): tau2 = 0.0025.
  // n = 400 gives sigma_y2 = 0.0025, n = 4000 gives 0.00025.
  const double tau2 = 0.0025;
  return {"motivating",
          {row("ICC_HT (n=400)", 0.50, icc_ht(tau2, 0.0025), true),
           row("ICC_HT (n=4000)", 0.909, icc_ht(tau2, 0.00025), true),
           row("ICC_MA", 0.0025, icc_ma(tau2, 1.0), true)}};
}

}  // namespace

std::string_view jeong2014_csv() { return kJeong; }
std::string_view avery2022_csv() { return kAvery; }

MetaDataset jeong2014_dataset() {
  std::istringstream in{std::string(kJeong)};
  return parse_one_arm_csv(in);
}

std::vector<TwoArmStudy> avery2022_studies() {
  std::istringstream in{std::string(kAvery)};
  return parse_two_arm_csv(in);
}

bool GoldenRow::passes() const noexcept { return std::abs(computed - reported) <= tolerance; }

bool ExampleRun::headline_passes() const noexcept {
  for (const auto& r : rows) {
    if (r.headline && !r.passes()) return false;
  }
  return true;
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"jeong-mean", "avery-md", "avery-smd", "motivating"};
  return names;
}

ExampleRun run_example(std::string_view name) {
  if (name == "jeong-mean") return jeong_mean();
  if (name == "avery-md") return avery_md();
  if (name == "avery-smd") return avery_smd();
  if (name == "motivating") return motivating();
  throw Error(ErrorCode::UsageError, "unknown example '" + std::string(name) +
                                         "'; expected jeong-mean, avery-md, avery-smd or motivating");
}

}  // namespace metahet
