// SPDX-License-Identifier: Apache-2.0
#include "metahet/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "metahet/error.hpp"

namespace metahet {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

struct ArmSummary {
  double mean = 0.0;
  double sample_var = 0.0;
};

// Draws n observations location + sd * z and returns mean and the unbiased
// sample variance (Welford).
template <typename Normal>
ArmSummary draw_arm(int n, double location, double sd, SimRng& rng, Normal& normal) {
  double mean = 0.0;
  double m2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double x = location + sd * normal(rng);
    const double d = x - mean;
    mean += d / j;
    m2 += d * (x - mean);
  }
  return {mean, m2 / (n - 1)};
}

void require_sample(std::span<const int> sizes) {
  for (int n : sizes) {
    if (n < 2) {
      throw Error(ErrorCode::InsufficientSample,
                  "every simulated arm needs at least 2 observations, got " + std::to_string(n));
    }
  }
}

// Two-arm data with error variance sigma2. Arm deviations come from
// N(0, tau2 / 2) each so that var(delta_T - delta_C) = tau2.
std::vector<TwoArmStudy> draw_two_arm(const SimConfig& c, double sigma2, std::span<const int> sizes,
                                      SimRng& rng) {
  require_sample(sizes);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double delta_sd = std::sqrt(c.tau2 / 2.0);
  const double sd = std::sqrt(sigma2);
  std::vector<TwoArmStudy> arms;
  arms.reserve(sizes.size());
  for (int n : sizes) {
    const double delta_t = delta_sd * normal(rng);
    const double delta_c = delta_sd * normal(rng);
    const ArmSummary t = draw_arm(n, c.mu_t + delta_t, sd, rng, normal);
    const ArmSummary ctl = draw_arm(n, c.mu_c + delta_c, sd, rng, normal);
    TwoArmStudy s;
    s.y_t = t.mean;
    s.se_t = std::sqrt(t.sample_var / n);
    s.n_t = n;
    s.y_c = ctl.mean;
    s.se_c = std::sqrt(ctl.sample_var / n);
    s.n_c = n;
    arms.push_back(s);
  }
  return arms;
}

std::vector<double> effective_sizes(const SimConfig& c, std::span<const int> sizes) {
  std::vector<double> n;
  n.reserve(sizes.size());
  for (int s : sizes) {
    n.push_back(c.kind == EffectSizeKind::Mean ? static_cast<double>(s) : effective_sample_size(s, s));
  }
  return n;
}

void parallel_for(int count, unsigned workers, const auto& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(SizeSchedule schedule) noexcept {
  return schedule == SizeSchedule::Proportional ? "proportional" : "balanced";
}

std::string_view to_string(VarianceModel model) noexcept {
  return model == VarianceModel::CommonPop ? "common" : "gamma";
}

void validate(const SimConfig& c) {
  if (c.k < 2) bad_field("k", "must be at least 2");
  if (c.reps < 1) bad_field("reps", "must be at least 1");
  if (!(c.tau2 >= 0.0) || !std::isfinite(c.tau2)) bad_field("tau2", "must be finite and non-negative");
  if (!(c.sigma2 > 0.0) || !std::isfinite(c.sigma2)) bad_field("sigma2", "must be finite and positive");
  if (!std::isfinite(c.mu) || !std::isfinite(c.mu_t) || !std::isfinite(c.mu_c)) {
    bad_field("mu", "means must be finite");
  }
  if (c.n_grid.empty()) bad_field("n_grid", "must list at least one base sample size");
  for (int n : c.n_grid) {
    if (n < 2) bad_field("n_grid", "base sample sizes must be at least 2");
  }
  if (c.variance_model == VarianceModel::GammaPop) {
    if (c.kind != EffectSizeKind::Mean) bad_field("variance_model", "gamma variances are only defined for the mean kind");
    if (!(c.gamma_shape > 0.0) || !(c.gamma_scale > 0.0)) {
      bad_field("gamma_shape/gamma_scale", "must be positive");
    }
  }
  if (c.kind == EffectSizeKind::StandardizedMeanDifference) {
    if (!(c.scale_lo > 0.0) || !(c.scale_hi >= c.scale_lo) || !std::isfinite(c.scale_hi)) {
      bad_field("scale_lo/scale_hi", "need 0 < scale_lo <= scale_hi");
    }
  }
}

std::vector<int> study_sizes(const SimConfig& config, int n_base) {
  std::vector<int> sizes;
  sizes.reserve(static_cast<std::size_t>(config.k));
  for (int i = 1; i <= config.k; ++i) {
    sizes.push_back(config.schedule == SizeSchedule::Proportional ? i * n_base : n_base);
  }
  return sizes;
}

double reference_sigma2_pop(const SimConfig& config) {
  if (config.kind == EffectSizeKind::StandardizedMeanDifference) return 1.0;
  if (config.variance_model == VarianceModel::GammaPop) return config.gamma_shape * config.gamma_scale;
  return config.sigma2;
}

double true_icc_ma(const SimConfig& config) { return icc_ma(config.tau2, reference_sigma2_pop(config)); }

MetaDataset gen_one_arm(const SimConfig& c, std::span<const int> sizes, SimRng& rng) {
  if (c.kind != EffectSizeKind::Mean) {
    throw Error(ErrorCode::InvalidConfig, "kind: gen_one_arm needs the mean kind");
  }
  require_sample(sizes);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> gamma(c.gamma_shape, c.gamma_scale);
  const double tau = std::sqrt(c.tau2);
  std::vector<StudyEffect> studies;
  studies.reserve(sizes.size());
  for (int n : sizes) {
    const double delta = tau * normal(rng);
    const double sigma2 = c.variance_model == VarianceModel::GammaPop ? gamma(rng) : c.sigma2;
    const ArmSummary s = draw_arm(n, c.mu + delta, std::sqrt(sigma2), rng, normal);
    studies.push_back({s.mean, s.sample_var / n, static_cast<double>(n)});
  }
  return MetaDataset(EffectSizeKind::Mean, std::move(studies));
}

MetaDataset gen_two_arm_md(const SimConfig& c, std::span<const int> sizes, SimRng& rng) {
  if (c.kind != EffectSizeKind::MeanDifference) {
    throw Error(ErrorCode::InvalidConfig, "kind: gen_two_arm_md needs the md kind");
  }
  const auto arms = draw_two_arm(c, c.sigma2, sizes, rng);
  return make_md_dataset(arms);
}

MetaDataset gen_two_arm_smd(const SimConfig& c, std::span<const int> sizes, SimRng& rng) {
  if (c.kind != EffectSizeKind::StandardizedMeanDifference) {
    throw Error(ErrorCode::InvalidConfig, "kind: gen_two_arm_smd needs the smd kind");
  }
  auto arms = draw_two_arm(c, 1.0, sizes, rng);
  std::uniform_real_distribution<double> scale(c.scale_lo, c.scale_hi);
  // Scaling every observation by sigma_i scales the arm means and SEs alike.
  for (auto& a : arms) {
    const double s = scale(rng);
    a.y_t *= s;
    a.se_t *= s;
    a.y_c *= s;
    a.se_c *= s;
  }
  return make_smd_dataset(arms, c.smd_method);
}

MetaDataset generate(const SimConfig& config, std::span<const int> sizes, SimRng& rng) {
  switch (config.kind) {
    case EffectSizeKind::Mean: return gen_one_arm(config, sizes, rng);
    case EffectSizeKind::MeanDifference: return gen_two_arm_md(config, sizes, rng);
    case EffectSizeKind::StandardizedMeanDifference: return gen_two_arm_smd(config, sizes, rng);
  }
  throw Error(ErrorCode::InvalidConfig, "kind: unknown");
}

SimRng replication_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t rep) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(rep), hi(rep)};
  return SimRng(seq);
}

StatisticSummary summarize(std::span<const double> draws) {
  if (draws.empty()) throw Error(ErrorCode::InvalidArgument, "cannot summarize zero draws");
  StatisticSummary s;
  double total = 0.0;
  for (double d : draws) total += d;
  s.mean = total / static_cast<double>(draws.size());

  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  s.q1 = quantile_sorted(sorted, 0.25);
  s.median = quantile_sorted(sorted, 0.5);
  s.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr;
  const double hi_fence = s.q3 + 1.5 * iqr;
  s.lo_whisker = *std::lower_bound(sorted.begin(), sorted.end(), lo_fence);
  s.hi_whisker = *std::prev(std::upper_bound(sorted.begin(), sorted.end(), hi_fence));
  return s;
}

GridPointResult run_grid_point(const SimConfig& config, int n_base) {
  validate(config);
  GridPointResult r;
  r.n_base = n_base;
  r.sizes = study_sizes(config, n_base);
  r.n_tilde = adjusted_mean_n(effective_sizes(config, r.sizes));
  r.icc_ma_true = true_icc_ma(config);

  const auto reps = static_cast<std::size_t>(config.reps);
  r.i2.assign(reps, 0.0);
  r.i2_a.assign(reps, 0.0);
  r.i2_anova.assign(reps, 0.0);
  parallel_for(config.reps, config.workers, [&](int rep) {
    SimRng rng = replication_rng(config.seed, static_cast<std::uint64_t>(n_base), static_cast<std::uint64_t>(rep));
    const MetaDataset data = generate(config, r.sizes, rng);
    const HeterogeneityPanel p = full_panel(data);
    r.i2[static_cast<std::size_t>(rep)] = p.i2;
    r.i2_a[static_cast<std::size_t>(rep)] = p.i2_a;
    r.i2_anova[static_cast<std::size_t>(rep)] = p.i2_anova;
  });
  r.i2_summary = summarize(r.i2);
  r.i2_a_summary = summarize(r.i2_a);
  r.i2_anova_summary = summarize(r.i2_anova);
  return r;
}

SimResult run_monte_carlo(const SimConfig& config) {
  validate(config);
  SimResult result;
  result.config = config;
  for (int n_base : config.n_grid) result.points.push_back(run_grid_point(config, n_base));
  return result;
}

Lemma1Report lemma1_check(const SimConfig& config, int n_base, int reps) {
  SimConfig c = config;
  c.reps = reps;
  validate(c);
  if (c.kind != EffectSizeKind::Mean || c.variance_model != VarianceModel::CommonPop) {
    throw Error(ErrorCode::InvalidConfig, "kind: the mean-square check needs the mean kind with a common variance");
  }
  const auto sizes = study_sizes(c, n_base);
  std::vector<double> msb(static_cast<std::size_t>(reps));
  std::vector<double> msw(static_cast<std::size_t>(reps));
  constexpr std::uint64_t kLemmaStream = std::uint64_t{1} << 40;
  parallel_for(reps, c.workers, [&](int rep) {
    SimRng rng = replication_rng(c.seed, kLemmaStream + static_cast<std::uint64_t>(n_base),
                                 static_cast<std::uint64_t>(rep));
    const MetaDataset data = gen_one_arm(c, sizes, rng);
    msb[static_cast<std::size_t>(rep)] = msb_ma(data);
    msw[static_cast<std::size_t>(rep)] = msw_ma(data);
  });

  Lemma1Report r;
  r.reps = reps;
  r.n_tilde = adjusted_mean_n(effective_sizes(c, sizes));
  for (std::size_t i = 0; i < msb.size(); ++i) {
    r.mean_msb += msb[i];
    r.mean_msw += msw[i];
  }
  r.mean_msb /= reps;
  r.mean_msw /= reps;
  r.expected_msb = r.n_tilde * c.tau2 + c.sigma2;
  r.expected_msw = c.sigma2;
  r.rel_dev_msb = std::abs(r.mean_msb - r.expected_msb) / r.expected_msb;
  r.rel_dev_msw = std::abs(r.mean_msw - r.expected_msw) / r.expected_msw;
  r.mean_difference = r.mean_msb - r.mean_msw;
  r.expected_difference = r.n_tilde * c.tau2;
  r.rel_dev_difference = c.tau2 > 0.0
                             ? std::abs(r.mean_difference - r.expected_difference) / r.expected_difference
                             : std::numeric_limits<double>::quiet_NaN();
  return r;
}

}  // namespace metahet
