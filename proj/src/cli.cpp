// SPDX-License-Identifier: Apache-2.0
#include "metahet/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "metahet/csv.hpp"
#include "metahet/error.hpp"
#include "metahet/examples.hpp"
#include "metahet/report.hpp"
#include "metahet/sim_io.hpp"

namespace metahet {

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const InputError*>(&e) != nullptr) return kExitInputError;
  switch (e.code()) {
    case ErrorCode::UsageError:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InvalidConfig:
      return kExitInputError;
    default:
      return kExitComputeError;
  }
}

int report_error(const Error& e, std::ostream& err) {
  err << kToolName << ": error [" << e.qualified_code() << "]: " << e.what() << '\n';
  return exit_code_for(e);
}

// Runs `body`, turning library exceptions into a diagnostic and exit status.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    err << kToolName << ": error: " << e.what() << '\n';
    return kExitComputeError;
  }
}

// Writes through a buffer so a failed command never leaves a partial file.
void emit(const std::optional<std::filesystem::path>& path, const std::string& text, std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::UsageError, "cannot write '" + path->string() + "'");
  file << text;
  if (!file.flush()) throw Error(ErrorCode::UsageError, "cannot write '" + path->string() + "'");
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string bytes = read_file(options.input);
    std::istringstream in(bytes);

    std::optional<MetaDataset> dataset;
    std::optional<SmdMethod> method;
    switch (options.kind) {
      case EffectSizeKind::Mean:
        dataset.emplace(parse_one_arm_csv(in));
        break;
      case EffectSizeKind::MeanDifference: {
        const auto studies = parse_two_arm_csv(in);
        dataset.emplace(make_md_dataset(studies));
        break;
      }
      case EffectSizeKind::StandardizedMeanDifference: {
        const auto studies = parse_two_arm_csv(in);
        dataset.emplace(make_smd_dataset(studies, options.smd_method));
        method = options.smd_method;
        break;
      }
    }

    const auto panel = full_panel(*dataset);
    const auto report = make_report(*dataset, panel, content_checksum(bytes), method);

    std::ostringstream text;
    switch (options.format) {
      case OutputFormat::Table:
        write_table(text, report);
        break;
      case OutputFormat::Json:
        text << to_json(report).dump(2) << '\n';
        break;
      case OutputFormat::Csv:
        write_csv(text, report);
        break;
    }
    emit(options.out, text.str(), out);
    return kExitOk;
  });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SimConfig config = load_sim_config(options.config);
    if (options.seed) config.seed = *options.seed;
    if (options.workers) config.workers = *options.workers;
    if (options.reps) config.reps = *options.reps;
    try {
      validate(config);
    } catch (const Error& e) {
      throw InputError(ErrorCode::InvalidConfig, 0, e.what());
    }

    const auto result = run_monte_carlo(config);
    std::ostringstream text;
    write_summary_csv(text, result);
    emit(options.out, text.str(), out);
    return kExitOk;
  });
}

int cmd_example(const std::string& name, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto run = run_example(name);
    std::size_t width = 9;
    for (const auto& r : run.rows) width = std::max(width, r.name.size());

    std::ostringstream text;
    text << "example " << run.name << '\n';
    text << std::left << std::setw(static_cast<int>(width) + 2) << "statistic" << std::right << std::setw(12)
         << "reported" << std::setw(14) << "computed" << std::setw(10) << "abs diff" << std::setw(8) << "tol"
         << "  result\n";
    text << std::fixed;
    for (const auto& r : run.rows) {
      const double diff = std::abs(r.computed - r.reported);
      const int digits = r.reported != 0.0 && std::abs(r.reported) < 0.01 ? 6 : 4;
      text << std::left << std::setw(static_cast<int>(width) + 2) << r.name << std::right << std::setprecision(digits)
           << std::setw(12) << r.reported << std::setw(14) << r.computed << std::setw(10) << diff
           << std::setprecision(2) << std::setw(8) << r.tolerance << "  " << (r.passes() ? "PASS" : "FAIL")
           << (r.headline ? "" : " (audit)") << '\n';
    }
    const bool ok = run.headline_passes();
    text << (ok ? "headline statistics agree with the published values\n"
                : "headline statistics disagree with the published values\n");
    out << text.str();
    return ok ? kExitOk : kExitComputeError;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heterogeneity statistics for meta-analysis of means, mean differences and SMDs", kToolName};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  std::string analyze_out;
  std::string kind = "mean";
  std::string smd_method = "hedges";
  std::string format = "table";
  auto* a = app.add_subcommand("analyze", "Compute the heterogeneity panel for a study table");
  a->add_option("input", analyze.input, "CSV file (study,y,var_y,n or study,y_t,n_t,se_t,y_c,n_c,se_c)")
      ->required();
  a->add_option("--kind", kind, "Effect size: mean, md or smd")->check(CLI::IsMember({"mean", "md", "smd"}));
  a->add_option("--smd-method", smd_method, "SMD estimator: hedges or cohen")
      ->check(CLI::IsMember({"hedges", "cohen"}));
  a->add_option("--format", format, "Output format: table, json or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  a->add_option("--out", analyze_out, "Write the report here instead of standard output");

  SimulateOptions simulate;
  std::string simulate_out;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  int reps = 0;
  auto* s = app.add_subcommand("simulate", "Run a Monte Carlo scenario and write per-grid-point summaries");
  s->add_option("config", simulate.config, "JSON scenario file")->required();
  s->add_option("--out", simulate_out, "Write the summary CSV here instead of standard output");
  auto* seed_opt = s->add_option("--seed", seed, "Override the root seed (unsigned 64-bit)");
  auto* workers_opt = s->add_option("--workers", workers, "Worker threads, 0 = all cores");
  auto* reps_opt = s->add_option("--reps", reps, "Override the replications per grid point");

  std::string example_name;
  auto* e = app.add_subcommand("example", "Recompute a published example and compare with the reported values");
  e->add_option("name", example_name, "jeong-mean, avery-md, avery-smd or motivating")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << ' ' << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    return report_error(Error(ErrorCode::UsageError, ex.what()), err);
  }

  if (a->parsed()) {
    if (!analyze_out.empty()) analyze.out = analyze_out;
    analyze.kind = parse_effect_size_kind(kind);
    analyze.smd_method = parse_smd_method(smd_method);
    analyze.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Table;
    return cmd_analyze(analyze, out, err);
  }
  if (s->parsed()) {
    if (!simulate_out.empty()) simulate.out = simulate_out;
    if (seed_opt->count() > 0) simulate.seed = seed;
    if (workers_opt->count() > 0) simulate.workers = workers;
    if (reps_opt->count() > 0) simulate.reps = reps;
    return cmd_simulate(simulate, out, err);
  }
  return cmd_example(example_name, out, err);
}

}  // namespace metahet
