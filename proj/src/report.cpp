// SPDX-License-Identifier: Apache-2.0
#include "metahet/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "metahet/error.hpp"

namespace metahet {

namespace {

using nlohmann::json;

double finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string("report field '") + field + "' is not finite");
  }
  return v;
}

json optional_number(const std::optional<double>& v, const char* field) {
  if (!v) return nullptr;
  return finite(*v, field);
}

std::optional<double> read_optional(const json& j, const char* field) {
  const auto& v = j.at(field);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

// (name, value) pairs shared by the table and CSV writers.
std::vector<std::pair<std::string, double>> panel_rows(const HeterogeneityPanel& p) {
  std::vector<std::pair<std::string, double>> rows{
      {"k", p.k},
      {"sum_w", p.sum_w},
      {"sum_w2", p.sum_w2},
      {"sum_wy", p.sum_wy},
      {"weighted_mean", p.weighted_mean},
      {"q", p.q},
      {"q_excess", p.q_excess},
      {"tau2_dl", p.tau2_dl},
      {"tau2_dl_raw", p.tau2_dl_raw},
      {"sigma_tilde2", p.sigma_tilde2},
      {"n_tilde", p.n_tilde},
      {"i2_a_adjustment (" + std::string(to_string(p.adjustment)) + ")", p.adjustment_value},
      {"i2", p.i2},
  };
  if (p.i2_raw) rows.emplace_back("i2_raw", *p.i2_raw);
  rows.emplace_back("i2_a", p.i2_a);
  if (p.i2_a_raw) rows.emplace_back("i2_a_raw", *p.i2_a_raw);
  rows.emplace_back("size_weighted_mean", p.size_weighted_mean);
  rows.emplace_back("msb", p.msb);
  rows.emplace_back("msw", p.msw);
  rows.emplace_back("i2_anova", p.i2_anova);
  rows.emplace_back("i2_anova_raw", p.i2_anova_raw);
  return rows;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::map<std::string, std::string> provenance_labels(EffectSizeKind kind) {
  const bool smd = kind == EffectSizeKind::StandardizedMeanDifference;
  std::map<std::string, std::string> labels{
      {"q", "Q = sum_i w_i (y_i - sum_j w_j y_j / sum_j w_j)^2, w_i = 1 / var_y_i"},
      {"tau2_dl", "tau2 = max{(Q - (k-1)) / (sum w - sum w^2 / sum w), 0} (DerSimonian-Laird)"},
      {"sigma_tilde2", "sigma_tilde2 = (k-1) / (sum w - sum w^2 / sum w)"},
      {"n_tilde", "n_tilde = (sum n - sum n^2 / sum n) / (k-1)"},
      {"i2", "I2 = max{(Q - (k-1)) / Q, 0}"},
      {"msb", "MSB = sum_i n_i (y_i - sum n y / sum n)^2 / (k-1)"},
      {"i2_anova", "I2_ANOVA = max{(MSB - MSW) / (MSB + (n_tilde - 1) MSW), 0}"},
  };
  if (smd) {
    labels["i2_a"] = "I2_A = max{(Q - (k-1)) / (Q + (k-1)(w_tilde - 1)), 0}, w_tilde = (sum w - sum w^2 / sum w) / (k-1)";
    labels["msw"] = "MSW = 1 (effects are standardized)";
  } else {
    labels["i2_a"] = "I2_A = max{(Q - (k-1)) / (Q + (k-1)(n_tilde - 1)), 0}";
    labels["msw"] = kind == EffectSizeKind::Mean
                        ? "MSW = sum_i n_i (n_i - 1) var_y_i / sum_i (n_i - 1)"
                        : "MSW = sum_i {n_t (n_t - 1) se_t^2 + n_c (n_c - 1) se_c^2} / (sum_i (n_t + n_c) - 2k)";
  }
  return labels;
}

ReportDocument make_report(const MetaDataset& dataset, const HeterogeneityPanel& panel,
                           std::string input_checksum, std::optional<SmdMethod> smd_method) {
  ReportDocument r;
  r.input_checksum = std::move(input_checksum);
  r.kind = dataset.kind();
  if (dataset.kind() == EffectSizeKind::StandardizedMeanDifference) r.smd_method = smd_method.value_or(SmdMethod::HedgesG);
  r.panel = panel;
  r.provenance = provenance_labels(dataset.kind());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& s = dataset.studies()[i];
    StudyRow row;
    row.label = dataset.labels().empty() ? "study " + std::to_string(i + 1) : dataset.labels()[i];
    row.y = s.y;
    row.var_y = s.var_y;
    row.n = s.n;
    row.weight = 1.0 / s.var_y;
    if (dataset.has_arm_detail()) row.arms = dataset.arms()[i];
    r.studies.push_back(std::move(row));
  }
  return r;
}

nlohmann::json to_json(const ReportDocument& r) {
  json studies = json::array();
  for (const auto& s : r.studies) {
    json row{{"label", s.label},
             {"y", finite(s.y, "y")},
             {"var_y", finite(s.var_y, "var_y")},
             {"n", finite(s.n, "n")},
             {"weight", finite(s.weight, "weight")}};
    if (s.arms) {
      row["arms"] = {{"y_t", s.arms->y_t}, {"n_t", s.arms->n_t}, {"se_t", s.arms->se_t},
                     {"y_c", s.arms->y_c}, {"n_c", s.arms->n_c}, {"se_c", s.arms->se_c}};
    }
    studies.push_back(std::move(row));
  }
  const auto& p = r.panel;
  json panel{
      {"k", p.k},
      {"sum_w", finite(p.sum_w, "sum_w")},
      {"sum_w2", finite(p.sum_w2, "sum_w2")},
      {"sum_wy", finite(p.sum_wy, "sum_wy")},
      {"weighted_mean", finite(p.weighted_mean, "weighted_mean")},
      {"q", finite(p.q, "q")},
      {"q_excess", finite(p.q_excess, "q_excess")},
      {"tau2_dl", finite(p.tau2_dl, "tau2_dl")},
      {"tau2_dl_raw", finite(p.tau2_dl_raw, "tau2_dl_raw")},
      {"sigma_tilde2", finite(p.sigma_tilde2, "sigma_tilde2")},
      {"n_tilde", finite(p.n_tilde, "n_tilde")},
      {"adjustment", {{"name", to_string(p.adjustment)}, {"value", finite(p.adjustment_value, "adjustment")}}},
      {"i2", finite(p.i2, "i2")},
      {"i2_raw", optional_number(p.i2_raw, "i2_raw")},
      {"i2_a", finite(p.i2_a, "i2_a")},
      {"i2_a_raw", optional_number(p.i2_a_raw, "i2_a_raw")},
      {"i2_anova", finite(p.i2_anova, "i2_anova")},
      {"i2_anova_raw", finite(p.i2_anova_raw, "i2_anova_raw")},
      {"size_weighted_mean", finite(p.size_weighted_mean, "size_weighted_mean")},
      {"msb", finite(p.msb, "msb")},
      {"msw", finite(p.msw, "msw")},
  };
  json doc{{"tool", r.tool},
           {"version", r.version},
           {"input_checksum", r.input_checksum},
           {"kind", to_string(r.kind)},
           {"smd_method", r.smd_method ? json(to_string(*r.smd_method)) : json(nullptr)},
           {"studies", std::move(studies)},
           {"panel", std::move(panel)},
           {"provenance", r.provenance}};
  return doc;
}

ReportDocument report_from_json(const nlohmann::json& doc) {
  try {
    ReportDocument r;
    r.tool = doc.at("tool").get<std::string>();
    r.version = doc.at("version").get<std::string>();
    r.input_checksum = doc.at("input_checksum").get<std::string>();
    r.kind = parse_effect_size_kind(doc.at("kind").get<std::string>());
    if (!doc.at("smd_method").is_null()) r.smd_method = parse_smd_method(doc.at("smd_method").get<std::string>());
    for (const auto& s : doc.at("studies")) {
      StudyRow row;
      row.label = s.at("label").get<std::string>();
      row.y = s.at("y").get<double>();
      row.var_y = s.at("var_y").get<double>();
      row.n = s.at("n").get<double>();
      row.weight = s.at("weight").get<double>();
      if (s.contains("arms")) {
        const auto& a = s.at("arms");
        TwoArmStudy arms;
        arms.label = row.label;
        arms.y_t = a.at("y_t").get<double>();
        arms.n_t = a.at("n_t").get<int>();
        arms.se_t = a.at("se_t").get<double>();
        arms.y_c = a.at("y_c").get<double>();
        arms.n_c = a.at("n_c").get<int>();
        arms.se_c = a.at("se_c").get<double>();
        row.arms = arms;
      }
      r.studies.push_back(std::move(row));
    }
    const auto& p = doc.at("panel");
    auto& out = r.panel;
    out.kind = r.kind;
    out.k = p.at("k").get<int>();
    out.sum_w = p.at("sum_w").get<double>();
    out.sum_w2 = p.at("sum_w2").get<double>();
    out.sum_wy = p.at("sum_wy").get<double>();
    out.weighted_mean = p.at("weighted_mean").get<double>();
    out.q = p.at("q").get<double>();
    out.q_excess = p.at("q_excess").get<double>();
    out.tau2_dl = p.at("tau2_dl").get<double>();
    out.tau2_dl_raw = p.at("tau2_dl_raw").get<double>();
    out.sigma_tilde2 = p.at("sigma_tilde2").get<double>();
    out.n_tilde = p.at("n_tilde").get<double>();
    const auto& adj = p.at("adjustment");
    out.adjustment = adj.at("name").get<std::string>() == "w_tilde" ? AdjustmentKind::AdjustedMeanWeight
                                                                    : AdjustmentKind::AdjustedMeanSize;
    out.adjustment_value = adj.at("value").get<double>();
    out.i2 = p.at("i2").get<double>();
    out.i2_raw = read_optional(p, "i2_raw");
    out.i2_a = p.at("i2_a").get<double>();
    out.i2_a_raw = read_optional(p, "i2_a_raw");
    out.i2_anova = p.at("i2_anova").get<double>();
    out.i2_anova_raw = p.at("i2_anova_raw").get<double>();
    out.size_weighted_mean = p.at("size_weighted_mean").get<double>();
    out.msb = p.at("msb").get<double>();
    out.msw = p.at("msw").get<double>();
    r.provenance = doc.at("provenance").get<std::map<std::string, std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(ErrorCode::SchemaMismatch, 0, std::string("malformed report document: ") + e.what());
  }
}

void write_table(std::ostream& out, const ReportDocument& r) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4);
  s << r.tool << ' ' << r.version << "  kind=" << to_string(r.kind);
  if (r.smd_method) s << " (" << to_string(*r.smd_method) << ")";
  s << "  k=" << r.panel.k << "  input=" << r.input_checksum << "\n\n";

  s << std::left << std::setw(22) << "study" << std::right << std::setw(12) << "y" << std::setw(12) << "var_y"
    << std::setw(10) << "n" << std::setw(12) << "weight" << '\n';
  for (const auto& row : r.studies) {
    s << std::left << std::setw(22) << row.label << std::right << std::setw(12) << row.y << std::setw(12)
      << row.var_y << std::setw(10) << row.n << std::setw(12) << row.weight << '\n';
  }
  s << '\n';
  for (const auto& [name, value] : panel_rows(r.panel)) {
    s << std::left << std::setw(32) << name << std::right << std::setw(14) << value << '\n';
  }
  s << '\n';
  for (const auto& [name, formula] : r.provenance) {
    s << std::left << std::setw(14) << name << formula << '\n';
  }
  out << s.str();
}

void write_csv(std::ostream& out, const ReportDocument& r) {
  out << "field,value\n";
  out << "kind," << to_string(r.kind) << '\n';
  if (r.smd_method) out << "smd_method," << to_string(*r.smd_method) << '\n';
  out << "i2_a_adjustment_kind," << to_string(r.panel.adjustment) << '\n';
  out << "input_checksum," << r.input_checksum << '\n';
  for (std::size_t i = 0; i < r.studies.size(); ++i) {
    const auto& row = r.studies[i];
    const std::string prefix = "study." + std::to_string(i + 1) + '.';
    out << prefix << "y," << format_double(row.y) << '\n';
    out << prefix << "var_y," << format_double(row.var_y) << '\n';
    out << prefix << "n," << format_double(row.n) << '\n';
    out << prefix << "weight," << format_double(row.weight) << '\n';
  }
  for (const auto& [name, value] : panel_rows(r.panel)) {
    const auto cut = name.find(' ');
    out << (cut == std::string::npos ? name : name.substr(0, cut)) << ',' << format_double(value) << '\n';
  }
}

}  // namespace metahet
