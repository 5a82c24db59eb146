// SPDX-License-Identifier: Apache-2.0
#include "metahet/sim_io.hpp"

#include <ostream>
#include <set>
#include <string>

#include "metahet/csv.hpp"
#include "metahet/error.hpp"
#include "metahet/report.hpp"

namespace metahet {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw InputError(ErrorCode::InvalidConfig, 0, field + ": " + why);
}

double number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

int integer(const json& doc, const char* key, int fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<int>();
}

std::string text(const json& doc, const char* key, const std::string& fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

void write_row(std::ostream& out, int n_base, const char* name, const StatisticSummary& s, double icc) {
  out << n_base << ',' << name << ',' << format_double(s.mean) << ',' << format_double(s.q1) << ','
      << format_double(s.median) << ',' << format_double(s.q3) << ',' << format_double(s.lo_whisker) << ','
      << format_double(s.hi_whisker) << ',' << format_double(icc) << '\n';
}

}  // namespace

SimConfig sim_config_from_json(const json& doc) {
  if (!doc.is_object()) bad("config", "expected a JSON object");
  static const std::set<std::string> known{
      "kind",   "k",          "schedule",      "n_grid",      "mu",       "mu_t",     "mu_c",
      "tau2",   "sigma2",     "variance_model", "gamma_shape", "gamma_scale", "scale_lo", "scale_hi",
      "smd_method", "reps",   "seed",          "workers"};
  for (const auto& item : doc.items()) {
    if (!known.contains(item.key())) bad(item.key(), "unknown field");
  }
  if (!doc.contains("kind")) bad("kind", "required");
  if (!doc.contains("tau2")) bad("tau2", "required");

  SimConfig c;
  try {
    c.kind = parse_effect_size_kind(text(doc, "kind", ""));
  } catch (const Error& e) {
    bad("kind", e.what());
  }
  c.k = integer(doc, "k", c.k);

  const std::string schedule = text(doc, "schedule", "proportional");
  if (schedule == "proportional") {
    c.schedule = SizeSchedule::Proportional;
  } else if (schedule == "balanced") {
    c.schedule = SizeSchedule::Balanced;
  } else {
    bad("schedule", "expected proportional or balanced");
  }

  if (doc.contains("n_grid")) {
    const auto& grid = doc.at("n_grid");
    if (!grid.is_array()) bad("n_grid", "expected an array of integers");
    c.n_grid.clear();
    for (const auto& v : grid) {
      if (!v.is_number_integer()) bad("n_grid", "expected an array of integers");
      c.n_grid.push_back(v.get<int>());
    }
  }

  c.mu = number(doc, "mu", 0.0);
  c.mu_t = number(doc, "mu_t", 0.0);
  c.mu_c = number(doc, "mu_c", 0.0);
  c.tau2 = number(doc, "tau2", 0.0);
  c.sigma2 = number(doc, "sigma2", c.kind == EffectSizeKind::Mean ? 100.0 : 1.0);

  const std::string model = text(doc, "variance_model", "common");
  if (model == "common") {
    c.variance_model = VarianceModel::CommonPop;
  } else if (model == "gamma") {
    c.variance_model = VarianceModel::GammaPop;
  } else {
    bad("variance_model", "expected common or gamma");
  }
  c.gamma_shape = number(doc, "gamma_shape", c.gamma_shape);
  c.gamma_scale = number(doc, "gamma_scale", c.gamma_scale);
  c.scale_lo = number(doc, "scale_lo", c.scale_lo);
  c.scale_hi = number(doc, "scale_hi", c.scale_hi);
  try {
    c.smd_method = parse_smd_method(text(doc, "smd_method", "hedges"));
  } catch (const Error& e) {
    bad("smd_method", e.what());
  }
  c.reps = integer(doc, "reps", c.reps);
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned()) bad("seed", "expected an unsigned 64-bit integer");
    c.seed = v.get<std::uint64_t>();
  }
  const int workers = integer(doc, "workers", 0);
  if (workers < 0) bad("workers", "must be non-negative");
  c.workers = static_cast<unsigned>(workers);

  try {
    validate(c);
  } catch (const Error& e) {
    throw InputError(ErrorCode::InvalidConfig, 0, e.what());
  }
  return c;
}

SimConfig parse_sim_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(ErrorCode::ParseError, 0, std::string("config is not valid JSON: ") + e.what());
  }
  return sim_config_from_json(doc);
}

SimConfig load_sim_config(const std::filesystem::path& path) { return parse_sim_config(read_file(path)); }

nlohmann::json to_json(const SimConfig& c) {
  return json{{"kind", to_string(c.kind)},
              {"k", c.k},
              {"schedule", to_string(c.schedule)},
              {"n_grid", c.n_grid},
              {"mu", c.mu},
              {"mu_t", c.mu_t},
              {"mu_c", c.mu_c},
              {"tau2", c.tau2},
              {"sigma2", c.sigma2},
              {"variance_model", to_string(c.variance_model)},
              {"gamma_shape", c.gamma_shape},
              {"gamma_scale", c.gamma_scale},
              {"scale_lo", c.scale_lo},
              {"scale_hi", c.scale_hi},
              {"smd_method", to_string(c.smd_method)},
              {"reps", c.reps},
              {"seed", c.seed},
              {"workers", c.workers}};
}

void write_summary_csv(std::ostream& out, const SimResult& result) {
  out << "n_base,statistic,mean,q1,median,q3,lo_whisker,hi_whisker,icc_ma_true\n";
  for (const auto& p : result.points) {
    write_row(out, p.n_base, "I2", p.i2_summary, p.icc_ma_true);
    write_row(out, p.n_base, "I2_A", p.i2_a_summary, p.icc_ma_true);
    write_row(out, p.n_base, "I2_ANOVA", p.i2_anova_summary, p.icc_ma_true);
  }
}

}  // namespace metahet
