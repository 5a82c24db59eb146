// SPDX-License-Identifier: Apache-2.0
//
// Study tables in CSV form.
//
//   one-arm:  study,y,var_y,n
//   two-arm:  study,y_t,n_t,se_t,y_c,n_c,se_c
//
// Columns are matched by header name, so their order is free, but every
// column must be present and no others are allowed. Numbers use a dot
// decimal separator regardless of the process locale. Failures raise
// InputError carrying the 1-based line number.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "metahet/model.hpp"

namespace metahet {

std::vector<OneArmStudy> read_one_arm_studies(std::istream& in);
std::vector<TwoArmStudy> read_two_arm_studies(std::istream& in);

MetaDataset parse_one_arm_csv(std::istream& in);
MetaDataset parse_one_arm_csv(const std::filesystem::path& path);
std::vector<TwoArmStudy> parse_two_arm_csv(std::istream& in);
std::vector<TwoArmStudy> parse_two_arm_csv(const std::filesystem::path& path);

/// Splits one CSV record. Double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(std::string_view line);

std::string read_file(const std::filesystem::path& path);

/// "fnv1a64:" followed by 16 hex digits of the 64-bit FNV-1a hash.
std::string content_checksum(std::string_view bytes);

}  // namespace metahet
