// SPDX-License-Identifier: Apache-2.0
//
// Built-in datasets and the published numbers they are checked against.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metahet/model.hpp"

namespace metahet {

/// CSV text of the bundled tables; identical to data/jeong2014.csv and
/// data/avery2022.csv in the source tree.
std::string_view jeong2014_csv();
std::string_view avery2022_csv();

MetaDataset jeong2014_dataset();
std::vector<TwoArmStudy> avery2022_studies();

struct GoldenRow {
  std::string name;
  double reported = 0.0;
  double computed = 0.0;
  double tolerance = 0.01;
  /// Headline rows decide the exit status of the example command; the
  /// others are printed for audit.
  bool headline = false;

  bool passes() const noexcept;
};

struct ExampleRun {
  std::string name;
  std::vector<GoldenRow> rows;

  bool headline_passes() const noexcept;
};

/// Names accepted by run_example, in display order.
const std::vector<std::string>& example_names();

/// Throws Error(UsageError) for unknown names.
ExampleRun run_example(std::string_view name);

}  // namespace metahet
