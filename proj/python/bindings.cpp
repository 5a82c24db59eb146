// SPDX-License-Identifier: Apache-2.0
//
// Python extension: thin wrappers that take plain lists and return dicts.
// Library errors surface as metahet.MetahetError (a ValueError) carrying
// the qualified code; input errors also carry the offending row.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "metahet/effect_sizes.hpp"
#include "metahet/error.hpp"
#include "metahet/examples.hpp"
#include "metahet/model.hpp"
#include "metahet/report.hpp"
#include "metahet/sim_io.hpp"
#include "metahet/simulation.hpp"

namespace py = pybind11;
using namespace metahet;

namespace {

py::dict panel_dict(const HeterogeneityPanel& p) {
  py::dict d;
  d["kind"] = std::string(to_string(p.kind));
  d["k"] = p.k;
  d["sum_w"] = p.sum_w;
  d["sum_w2"] = p.sum_w2;
  d["sum_wy"] = p.sum_wy;
  d["weighted_mean"] = p.weighted_mean;
  d["q"] = p.q;
  d["q_excess"] = p.q_excess;
  d["tau2_dl"] = p.tau2_dl;
  d["tau2_dl_raw"] = p.tau2_dl_raw;
  d["sigma_tilde2"] = p.sigma_tilde2;
  d["n_tilde"] = p.n_tilde;
  d["adjustment"] = std::string(to_string(p.adjustment));
  d["adjustment_value"] = p.adjustment_value;
  d["i2"] = p.i2;
  d["i2_a"] = p.i2_a;
  d["i2_anova"] = p.i2_anova;
  d["i2_raw"] = p.i2_raw;
  d["i2_a_raw"] = p.i2_a_raw;
  d["i2_anova_raw"] = p.i2_anova_raw;
  d["size_weighted_mean"] = p.size_weighted_mean;
  d["msb"] = p.msb;
  d["msw"] = p.msw;
  return d;
}

py::dict effect_dict(const DerivedEffect& e) {
  py::dict d;
  d["y"] = e.y;
  d["var_y"] = e.var_y;
  d["n_eff"] = e.n_eff;
  return d;
}

py::dict summary_dict(const StatisticSummary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["q1"] = s.q1;
  d["median"] = s.median;
  d["q3"] = s.q3;
  d["lo_whisker"] = s.lo_whisker;
  d["hi_whisker"] = s.hi_whisker;
  return d;
}

template <class T>
void require_same_length(const std::vector<T>& v, std::size_t k, const char* name) {
  if (v.size() != k) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(k));
  }
}

std::vector<TwoArmStudy> two_arm(const std::vector<double>& y_t, const std::vector<double>& se_t,
                                 const std::vector<int>& n_t, const std::vector<double>& y_c,
                                 const std::vector<double>& se_c, const std::vector<int>& n_c) {
  const std::size_t k = y_t.size();
  require_same_length(se_t, k, "se_t");
  require_same_length(n_t, k, "n_t");
  require_same_length(y_c, k, "y_c");
  require_same_length(se_c, k, "se_c");
  require_same_length(n_c, k, "n_c");
  std::vector<TwoArmStudy> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = TwoArmStudy{y_t[i], se_t[i], n_t[i], y_c[i], se_c[i], n_c[i], {}};
  }
  return out;
}

MetaDataset two_arm_dataset(const std::vector<TwoArmStudy>& studies, const std::string& kind,
                            const std::string& smd_method) {
  switch (parse_effect_size_kind(kind)) {
    case EffectSizeKind::MeanDifference:
      return make_md_dataset(studies);
    case EffectSizeKind::StandardizedMeanDifference:
      return make_smd_dataset(studies, parse_smd_method(smd_method));
    case EffectSizeKind::Mean:
      break;
  }
  throw Error(ErrorCode::InvalidArgument, "two-arm data needs kind 'md' or 'smd'");
}

// Reports go through the JSON writer so Python sees the same document the
// CLI emits; returned as text and decoded on the Python side.
std::string report_text(const MetaDataset& ds, std::optional<SmdMethod> method) {
  return to_json(make_report(ds, full_panel(ds), "", method)).dump();
}

}  // namespace

PYBIND11_MODULE(_metahet, m) {
  m.doc() = "Heterogeneity statistics for meta-analysis (compiled core)";
  m.attr("__version__") = kToolVersion;

  // Exception classes live for the whole interpreter; the references are
  // deliberately never released.
  static PyObject* base = PyErr_NewException("metahet.MetahetError", PyExc_ValueError, nullptr);
  static PyObject* input = PyErr_NewException("metahet.MetahetInputError", base, nullptr);
  m.add_object("MetahetError", py::handle(base));
  m.add_object("MetahetInputError", py::handle(input));
  py::register_exception_translator([](std::exception_ptr p) {
    if (!p) return;
    try {
      std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::object err = py::handle(input)(e.what());
      err.attr("code") = e.qualified_code();
      err.attr("row") = e.row();
      PyErr_SetObject(input, err.ptr());
    } catch (const Error& e) {
      py::object err = py::handle(base)(e.what());
      err.attr("code") = e.qualified_code();
      PyErr_SetObject(base, err.ptr());
    }
  });

  m.def(
      "panel",
      [](const std::vector<double>& y, const std::vector<double>& var_y, const std::vector<double>& n,
         const std::string& kind) {
        const std::size_t k = y.size();
        require_same_length(var_y, k, "var_y");
        require_same_length(n, k, "n");
        std::vector<StudyEffect> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = StudyEffect{y[i], var_y[i], n[i]};
        return panel_dict(full_panel(MetaDataset(parse_effect_size_kind(kind), std::move(s))));
      },
      py::arg("y"), py::arg("var_y"), py::arg("n"), py::arg("kind") = "mean",
      "Full statistic panel from (y, var_y, n) triples. MD needs arm detail for MSW, use panel_two_arm.");

  m.def(
      "panel_two_arm",
      [](const std::vector<double>& y_t, const std::vector<double>& se_t, const std::vector<int>& n_t,
         const std::vector<double>& y_c, const std::vector<double>& se_c, const std::vector<int>& n_c,
         const std::string& kind, const std::string& smd_method) {
        const auto studies = two_arm(y_t, se_t, n_t, y_c, se_c, n_c);
        return panel_dict(full_panel(two_arm_dataset(studies, kind, smd_method)));
      },
      py::arg("y_t"), py::arg("se_t"), py::arg("n_t"), py::arg("y_c"), py::arg("se_c"),
      py::arg("n_c"), py::arg("kind") = "md", py::arg("smd_method") = "hedges");

  m.def(
      "report_one_arm",
      [](const std::vector<double>& y, const std::vector<int>& n, const std::vector<double>& var_y) {
        const std::size_t k = y.size();
        require_same_length(n, k, "n");
        require_same_length(var_y, k, "var_y");
        std::vector<OneArmStudy> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = OneArmStudy{y[i], var_y[i], n[i], {}};
        return report_text(MetaDataset::from_one_arm(s), std::nullopt);
      },
      py::arg("y"), py::arg("n"), py::arg("var_y"));

  m.def(
      "report_two_arm",
      [](const std::vector<double>& y_t, const std::vector<double>& se_t, const std::vector<int>& n_t,
         const std::vector<double>& y_c, const std::vector<double>& se_c, const std::vector<int>& n_c,
         const std::string& kind, const std::string& smd_method) {
        const auto studies = two_arm(y_t, se_t, n_t, y_c, se_c, n_c);
        const auto ds = two_arm_dataset(studies, kind, smd_method);
        std::optional<SmdMethod> method;
        if (ds.kind() == EffectSizeKind::StandardizedMeanDifference) method = parse_smd_method(smd_method);
        return report_text(ds, method);
      },
      py::arg("y_t"), py::arg("se_t"), py::arg("n_t"), py::arg("y_c"), py::arg("se_c"),
      py::arg("n_c"), py::arg("kind") = "md", py::arg("smd_method") = "hedges");

  m.def("effective_sample_size", &effective_sample_size, py::arg("n_t"), py::arg("n_c"));
  m.def("hedges_correction", &hedges_correction, py::arg("n_t"), py::arg("n_c"));
  m.def(
      "md_effect",
      [](double y_t, double se_t, int n_t, double y_c, double se_c, int n_c) {
        return effect_dict(md_effect(TwoArmStudy{y_t, se_t, n_t, y_c, se_c, n_c, {}}));
      },
      py::arg("y_t"), py::arg("se_t"), py::arg("n_t"), py::arg("y_c"), py::arg("se_c"), py::arg("n_c"));
  m.def(
      "smd_effect",
      [](double y_t, double se_t, int n_t, double y_c, double se_c, int n_c, const std::string& method) {
        return effect_dict(
            smd_effect(TwoArmStudy{y_t, se_t, n_t, y_c, se_c, n_c, {}}, parse_smd_method(method)));
      },
      py::arg("y_t"), py::arg("se_t"), py::arg("n_t"), py::arg("y_c"), py::arg("se_c"), py::arg("n_c"),
      py::arg("method") = "hedges");

  m.def("icc_ht", &icc_ht, py::arg("tau2"), py::arg("sigma_y2"));
  m.def("icc_ma", py::overload_cast<double, double>(&icc_ma), py::arg("tau2"), py::arg("sigma2_pop"));

  m.def(
      "simulate",
      [](const std::string& config_json, bool draws) {
        const SimConfig cfg = parse_sim_config(config_json);
        SimResult result;
        {
          py::gil_scoped_release release;
          result = run_monte_carlo(cfg);
        }
        py::list points;
        for (const auto& g : result.points) {
          py::dict d;
          d["n_base"] = g.n_base;
          d["sizes"] = g.sizes;
          d["n_tilde"] = g.n_tilde;
          d["icc_ma_true"] = g.icc_ma_true;
          d["I2"] = summary_dict(g.i2_summary);
          d["I2_A"] = summary_dict(g.i2_a_summary);
          d["I2_ANOVA"] = summary_dict(g.i2_anova_summary);
          if (draws) {
            py::dict raw;
            raw["I2"] = g.i2;
            raw["I2_A"] = g.i2_a;
            raw["I2_ANOVA"] = g.i2_anova;
            d["draws"] = raw;
          }
          points.append(d);
        }
        py::dict out;
        out["config"] = to_json(result.config).dump();
        out["points"] = points;
        return out;
      },
      py::arg("config_json"), py::arg("draws") = false,
      "Monte Carlo study from a JSON config (same schema as the CLI).");

  m.def(
      "simulate_summary_csv",
      [](const std::string& config_json) {
        const SimConfig cfg = parse_sim_config(config_json);
        std::ostringstream os;
        {
          py::gil_scoped_release release;
          write_summary_csv(os, run_monte_carlo(cfg));
        }
        return os.str();
      },
      py::arg("config_json"));

  m.def("example_names", &example_names);
  m.def(
      "run_example",
      [](const std::string& name) {
        const ExampleRun run = run_example(name);
        py::list rows;
        for (const auto& r : run.rows) {
          py::dict d;
          d["name"] = r.name;
          d["reported"] = r.reported;
          d["computed"] = r.computed;
          d["tolerance"] = r.tolerance;
          d["headline"] = r.headline;
          d["passes"] = r.passes();
          rows.append(d);
        }
        py::dict out;
        out["name"] = run.name;
        out["rows"] = rows;
        out["headline_passes"] = run.headline_passes();
        return out;
      },
      py::arg("name"));
}
