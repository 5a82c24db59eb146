// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "metahet/cli.hpp"
#include "metahet/csv.hpp"
#include "metahet/error.hpp"
#include "metahet/examples.hpp"
#include "metahet/report.hpp"
#include "metahet/sim_io.hpp"

using namespace metahet;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(METAHET_SOURCE_DIR) / "data";

struct Caught {
  ErrorCode code;
  std::size_t row;
};

Caught parse_one(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_one_arm_csv(in);
  } catch (const InputError& e) {
    return {e.code(), e.row()};
  }
  FAIL("expected InputError");
  return {ErrorCode::UsageError, 0};
}

Caught parse_two(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_two_arm_csv(in);
  } catch (const InputError& e) {
    return {e.code(), e.row()};
  }
  FAIL("expected InputError");
  return {ErrorCode::UsageError, 0};
}

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "metahet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto path = fs::temp_directory_path() / ("metahet_test_" + name);
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

}  // namespace

TEST_CASE("bundled CSV files match the embedded tables") {
  CHECK(read_file(kData / "jeong2014.csv") == jeong2014_csv());
  CHECK(read_file(kData / "avery2022.csv") == avery2022_csv());
  const auto d = parse_one_arm_csv(kData / "jeong2014.csv");
  CHECK(d.size() == 10);
  CHECK(d.labels().front() == "Wang (2013)");
  CHECK(d.studies()[3].n == 20.0);
  CHECK(parse_two_arm_csv(kData / "avery2022.csv").size() == 3);
}

TEST_CASE("one-arm CSV errors carry the line number") {
  auto c = parse_one("study,y,var_y,n\na,1,1,5\n");
  CHECK(c.code == ErrorCode::InsufficientStudies);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,2,0,5\n");
  CHECK(c.code == ErrorCode::InvalidVariance);
  CHECK(c.row == 3);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,2,1,0\n");
  CHECK(c.code == ErrorCode::InvalidArgument);
  CHECK(c.row == 3);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,2x,1,4\n");
  CHECK(c.code == ErrorCode::ParseError);
  CHECK(c.row == 3);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,\"2,5\",1,4\n");
  CHECK(c.code == ErrorCode::ParseError);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,nan,1,4\n");
  CHECK(c.code == ErrorCode::ParseError);
  c = parse_one("study,y,n\na,1,5\nb,2,4\n");
  CHECK(c.code == ErrorCode::SchemaMismatch);
  CHECK(c.row == 1);
  c = parse_one("study,y,var_y,n,extra\n");
  CHECK(c.code == ErrorCode::SchemaMismatch);
  c = parse_one("study,y,y,var_y,n\n");
  CHECK(c.code == ErrorCode::SchemaMismatch);
  c = parse_one("");
  CHECK(c.code == ErrorCode::SchemaMismatch);
  c = parse_one("study,y,var_y,n\na,1,1,5\nb,2,1\n");
  CHECK(c.code == ErrorCode::ParseError);
  c = parse_one("study,y,var_y,n\na,1,1,5.5\nb,2,1,3\n");
  CHECK(c.code == ErrorCode::ParseError);
}

TEST_CASE("two-arm CSV errors") {
  auto c = parse_two("study,y_t,n_t,se_t,y_c,n_c,se_c\n");
  CHECK(c.code == ErrorCode::InsufficientStudies);
  c = parse_two("study,y_t,n_t,se_t,y_c,n_c,se_c\na,1,1,1,1,5,1\nb,1,5,1,1,5,1\n");
  CHECK(c.code == ErrorCode::InsufficientDegreesOfFreedom);
  CHECK(c.row == 2);
  c = parse_two("study,y_t,n_t,se_t,y_c,n_c,se_c\na,1,5,1,1,5,-1\nb,1,5,1,1,5,1\n");
  CHECK(c.code == ErrorCode::InvalidVariance);
  c = parse_two("study,y,var_y,n\na,1,1,5\nb,2,1,5\n");
  CHECK(c.code == ErrorCode::SchemaMismatch);
}

TEST_CASE("CSV columns may come in any order, blank lines and CRLF are tolerated") {
  std::istringstream in("n,var_y,study,y\r\n\r\n5,1,\"Smith, 2001\",1.5\r\n7,2,b,2\r\n\n");
  const auto d = parse_one_arm_csv(in);
  CHECK(d.size() == 2);
  CHECK(d.labels()[0] == "Smith, 2001");
  CHECK(d.studies()[0].y == 1.5);
  CHECK(d.studies()[1].n == 7.0);
}

TEST_CASE("number parsing ignores the process locale") {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  // de_DE may not be installed; the check below holds either way.
  std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  std::istringstream in("study,y,var_y,n\na,1.25,0.5,5\nb,2.5,1,5\n");
  const auto d = parse_one_arm_csv(in);
  CHECK(d.studies()[0].y == 1.25);
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST_CASE("record splitting") {
  CHECK(split_csv_record("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_record(" a , b ") == std::vector<std::string>{"a", "b"});
  CHECK(split_csv_record("\"x,y\",\"say \"\"hi\"\"\"") == std::vector<std::string>{"x,y", "say \"hi\""});
  CHECK(split_csv_record("") == std::vector<std::string>{""});
}

TEST_CASE("checksum") {
  CHECK(content_checksum("") == "fnv1a64:cbf29ce484222325");
  CHECK(content_checksum("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(content_checksum("a") != content_checksum("b"));
}

TEST_CASE("JSON report round-trips bit for bit") {
  for (int kind = 0; kind < 3; ++kind) {
    const auto studies = avery2022_studies();
    const MetaDataset d = kind == 0   ? jeong2014_dataset()
                          : kind == 1 ? make_md_dataset(studies)
                                      : make_smd_dataset(studies, SmdMethod::CohensD);
    const auto panel = full_panel(d);
    std::optional<SmdMethod> m;
    if (kind == 2) m = SmdMethod::CohensD;
    const auto report = make_report(d, panel, "fnv1a64:0000000000000000", m);
    const auto text = to_json(report).dump();
    const auto back = report_from_json(nlohmann::json::parse(text));
    CHECK(back.kind == report.kind);
    CHECK(back.smd_method == report.smd_method);
    CHECK(back.input_checksum == report.input_checksum);
    REQUIRE(back.studies.size() == report.studies.size());
    for (std::size_t i = 0; i < back.studies.size(); ++i) {
      CHECK(back.studies[i].y == report.studies[i].y);
      CHECK(back.studies[i].var_y == report.studies[i].var_y);
      CHECK(back.studies[i].n == report.studies[i].n);
      CHECK(back.studies[i].weight == report.studies[i].weight);
      CHECK(back.studies[i].label == report.studies[i].label);
      CHECK(back.studies[i].arms.has_value() == report.studies[i].arms.has_value());
    }
    const auto& a = back.panel;
    const auto& b = report.panel;
    CHECK(a.q == b.q);
    CHECK(a.sum_w == b.sum_w);
    CHECK(a.sum_w2 == b.sum_w2);
    CHECK(a.sum_wy == b.sum_wy);
    CHECK(a.tau2_dl == b.tau2_dl);
    CHECK(a.tau2_dl_raw == b.tau2_dl_raw);
    CHECK(a.sigma_tilde2 == b.sigma_tilde2);
    CHECK(a.n_tilde == b.n_tilde);
    CHECK(a.adjustment == b.adjustment);
    CHECK(a.adjustment_value == b.adjustment_value);
    CHECK(a.i2 == b.i2);
    CHECK(a.i2_a == b.i2_a);
    CHECK(a.i2_anova == b.i2_anova);
    CHECK(a.i2_raw == b.i2_raw);
    CHECK(a.i2_a_raw == b.i2_a_raw);
    CHECK(a.i2_anova_raw == b.i2_anova_raw);
    CHECK(a.msb == b.msb);
    CHECK(a.msw == b.msw);
    CHECK(a.size_weighted_mean == b.size_weighted_mean);
    CHECK(back.provenance == report.provenance);
  }
}

TEST_CASE("report carries provenance for the headline statistics") {
  for (auto kind : {EffectSizeKind::Mean, EffectSizeKind::MeanDifference, EffectSizeKind::StandardizedMeanDifference}) {
    const auto labels = provenance_labels(kind);
    for (const char* key : {"q", "i2", "i2_a", "i2_anova"}) CHECK(labels.count(key) == 1);
  }
  CHECK(provenance_labels(EffectSizeKind::StandardizedMeanDifference).at("i2_a").find("w_tilde") != std::string::npos);
}

TEST_CASE("malformed report documents are schema errors") {
  try {
    report_from_json(nlohmann::json{{"tool", "metahet"}});
    FAIL("expected SchemaMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaMismatch);
  }
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-43.392) == "-43.392");
  const double x = 1.0 / 3.0;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("simulation config parsing") {
  const auto c = parse_sim_config(R"({"kind": "md", "tau2": 0.9, "n_grid": [10, 50], "seed": 18446744073709551615})");
  CHECK(c.kind == EffectSizeKind::MeanDifference);
  CHECK(c.sigma2 == 1.0);
  CHECK(c.n_grid == std::vector<int>{10, 50});
  CHECK(c.seed == 18446744073709551615ull);
  CHECK(c.k == 10);
  CHECK(c.reps == 10000);
  CHECK(parse_sim_config(R"({"kind": "mean", "tau2": 9})").sigma2 == 100.0);

  const auto back = sim_config_from_json(to_json(c));
  CHECK(back.seed == c.seed);
  CHECK(back.n_grid == c.n_grid);
  CHECK(back.tau2 == c.tau2);

  auto code = [](const char* text) {
    try {
      parse_sim_config(text);
    } catch (const Error& e) {
      return std::pair{e.code(), std::string(e.what())};
    }
    return std::pair{ErrorCode::UsageError, std::string("no error")};
  };
  CHECK(code(R"({"kind": "mean", "tau2": 9, "colour": 1})").first == ErrorCode::InvalidConfig);
  CHECK(code(R"({"kind": "mean", "tau2": 9, "colour": 1})").second.find("colour") != std::string::npos);
  CHECK(code(R"({"kind": "mean"})").first == ErrorCode::InvalidConfig);
  CHECK(code(R"({"kind": "mean", "tau2": -1})").second.find("tau2") != std::string::npos);
  CHECK(code(R"({"kind": "mean", "tau2": 9, "k": 2.5})").second.find("k:") != std::string::npos);
  CHECK(code(R"({"kind": "md", "tau2": 9, "variance_model": "gamma"})").first == ErrorCode::InvalidConfig);
  CHECK(code(R"({"kind": "mean", "tau2": 9, "seed": -4})").second.find("seed") != std::string::npos);
  CHECK(code("{not json").first == ErrorCode::ParseError);
}

TEST_CASE("summary CSV layout") {
  SimConfig c;
  c.kind = EffectSizeKind::Mean;
  c.k = 3;
  c.n_grid = {10, 20};
  c.reps = 20;
  const auto r = run_monte_carlo(c);
  std::ostringstream out;
  write_summary_csv(out, r);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "n_base,statistic,mean,q1,median,q3,lo_whisker,hi_whisker,icc_ma_true");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(split_csv_record(line).size() == 9);
  }
  CHECK(rows == 6);
}

TEST_CASE("cli: analyze the bundled tables") {
  const auto jeong = (kData / "jeong2014.csv").string();
  const auto avery = (kData / "avery2022.csv").string();
  auto r = cli({"analyze", "--kind", "mean", jeong});
  CHECK(r.status == kExitOk);
  CHECK(r.out.find("i2_anova") != std::string::npos);

  r = cli({"analyze", "--kind", "smd", "--format", "json", avery});
  REQUIRE(r.status == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  const auto report = report_from_json(doc);
  CHECK(std::abs(report.panel.i2 - 0.66) <= 0.01);
  CHECK(std::abs(report.panel.i2_a - 0.18) <= 0.01);
  CHECK(std::abs(report.panel.i2_anova - 0.19) <= 0.01);
  CHECK(report.input_checksum == content_checksum(avery2022_csv()));

  r = cli({"analyze", "--kind", "md", "--format", "csv", avery});
  CHECK(r.status == kExitOk);
  CHECK(r.out.rfind("field,value\n", 0) == 0);
}

TEST_CASE("cli: error exits") {
  const auto jeong = (kData / "jeong2014.csv").string();
  auto r = cli({"analyze", "--kind", "md", jeong});
  CHECK(r.status == kExitInputError);
  CHECK(r.err.find("cli-io/SchemaMismatch") != std::string::npos);

  r = cli({"analyze", "--kind", "median", jeong});
  CHECK(r.status == kExitInputError);
  r = cli({"analyze", "/nonexistent/file.csv"});
  CHECK(r.status == kExitInputError);
  r = cli({"frobnicate"});
  CHECK(r.status == kExitInputError);
  r = cli({"example", "nope"});
  CHECK(r.status == kExitInputError);
  CHECK(r.err.find("cli-io/UsageError") != std::string::npos);

  // Valid CSV whose weights overflow: a computational failure.
  const auto path = temp_file("overflow.csv", "study,y,var_y,n\na,1,1e-320,5\nb,2,1e-320,5\n");
  r = cli({"analyze", path.string()});
  CHECK(r.status == kExitComputeError);
  CHECK(r.err.find("model-core/DegenerateWeights") != std::string::npos);
  fs::remove(path);
}

TEST_CASE("cli: examples") {
  for (const auto& name : example_names()) {
    const auto r = cli({"example", name});
    CHECK(r.status == kExitOk);
    CHECK(r.out.find("example " + name) != std::string::npos);
  }
  // Audit rows can fail without failing the command.
  const auto md = cli({"example", "avery-md"});
  CHECK(md.out.find("FAIL (audit)") != std::string::npos);
}

TEST_CASE("cli: simulate writes the same bytes for any worker count") {
  const auto config = temp_file("sim.json", R"({"kind": "mean", "k": 4, "tau2": 9, "n_grid": [10, 20], "reps": 50})");
  const auto out1 = fs::temp_directory_path() / "metahet_test_sim1.csv";
  const auto out2 = fs::temp_directory_path() / "metahet_test_sim2.csv";
  auto r = cli({"simulate", config.string(), "--out", out1.string(), "--workers", "1", "--seed", "7"});
  REQUIRE(r.status == kExitOk);
  r = cli({"simulate", config.string(), "--out", out2.string(), "--workers", "3", "--seed", "7"});
  REQUIRE(r.status == kExitOk);
  CHECK(read_file(out1) == read_file(out2));

  r = cli({"simulate", config.string(), "--reps", "0"});
  CHECK(r.status == kExitInputError);
  CHECK(r.err.find("reps") != std::string::npos);
  fs::remove(config);
  fs::remove(out1);
  fs::remove(out2);
}
