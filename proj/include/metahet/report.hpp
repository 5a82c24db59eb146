// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "metahet/effect_sizes.hpp"
#include "metahet/model.hpp"

namespace metahet {

inline constexpr const char* kToolName = "metahet";
inline constexpr const char* kToolVersion = "0.1.0";

struct StudyRow {
  std::string label;
  double y = 0.0;
  double var_y = 0.0;
  double n = 0.0;  // raw n for Mean, effective n for MD/SMD
  double weight = 0.0;
  std::optional<TwoArmStudy> arms;
};

struct ReportDocument {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string input_checksum;
  EffectSizeKind kind = EffectSizeKind::Mean;
  std::optional<SmdMethod> smd_method;
  std::vector<StudyRow> studies;
  HeterogeneityPanel panel;
  /// Formula each headline statistic was computed with, keyed by field name.
  std::map<std::string, std::string> provenance;
};

std::map<std::string, std::string> provenance_labels(EffectSizeKind kind);

ReportDocument make_report(const MetaDataset& dataset, const HeterogeneityPanel& panel,
                           std::string input_checksum, std::optional<SmdMethod> smd_method = std::nullopt);

nlohmann::json to_json(const ReportDocument& report);
/// Inverse of to_json; doubles come back bit-identical.
ReportDocument report_from_json(const nlohmann::json& doc);

/// Human-readable table, numbers rounded to 4 decimals.
void write_table(std::ostream& out, const ReportDocument& report);
/// field,value rows at full precision.
void write_csv(std::ostream& out, const ReportDocument& report);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace metahet
