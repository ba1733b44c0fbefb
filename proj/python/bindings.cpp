#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dicausal/disentangle.hpp"
#include "dicausal/errors.hpp"
#include "dicausal/experiment.hpp"
#include "dicausal/intervention.hpp"
#include "dicausal/metrics.hpp"

namespace py = pybind11;
using namespace dicausal;

namespace {

using Rows = std::vector<std::vector<double>>;

Tensor to_tensor(const Rows& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> values;
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("ragged rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(values));
}

Rows to_rows(const Tensor& t) {
  Rows out(t.dim(0), std::vector<double>(t.dim(1)));
  for (std::size_t i = 0; i < t.dim(0); ++i)
    for (std::size_t j = 0; j < t.dim(1); ++j) out[i][j] = t.at(i, j);
  return out;
}

py::dict report_dict(const MetricReport& r) {
  py::dict d;
  d["num_domains"] = r.num_domains;
  d["acc"] = r.acc;
  d["af"] = r.af;
  d["rf"] = r.rf;
  d["prf"] = r.prf;
  d["final_accuracy"] = r.final_accuracy;
  d["warnings"] = r.warnings;
  return d;
}

// Runs a subcommand and returns (exit code, stdout, stderr).
template <typename Fn>
py::tuple capture(Fn&& fn) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = fn(out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_dicausal, m) {
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "DicausalError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("metrics", [](const Rows& rows) { return report_dict(metric_report(AccuracyMatrix(rows))); },
        py::arg("matrix"));
  m.def("absolute_forgetting", [](const Rows& rows) { return absolute_forgetting(AccuracyMatrix(rows)); });
  m.def("relative_forgetting", [](const Rows& rows) { return relative_forgetting(AccuracyMatrix(rows)); });
  m.def("performance_aware_relative_forgetting",
        [](const Rows& rows) { return performance_aware_relative_forgetting(AccuracyMatrix(rows)); });
  m.def("average_accuracy", [](const Rows& rows) { return average_accuracy(AccuracyMatrix(rows)); });

  m.def("diagonal_gaussian_kl", &diagonal_gaussian_kl, py::arg("mean_p"), py::arg("var_p"), py::arg("mean_q"),
        py::arg("var_q"));
  m.def("kl_difference_matrix", &kl_difference_matrix, py::arg("representations"));

  m.def(
      "plan_perturbations",
      [](const std::vector<int>& labels, std::uint64_t seed) {
        Rng rng(seed);
        const auto plan = plan_perturbations(labels, rng);
        return py::make_tuple(plan.intra_partner, plan.inter_partner);
      },
      py::arg("labels"), py::arg("seed") = 0);

  m.def(
      "disentangle",
      [](const Rows& weight, const std::vector<double>& bias, const Rows& z) {
        const auto p = disentangle(to_tensor(weight), Tensor({bias.size()}, bias), to_tensor(z));
        py::dict d;
        d["causal_mask"] = to_rows(p.causal_mask);
        d["spurious_mask"] = to_rows(p.spurious_mask);
        d["causal"] = to_rows(p.causal);
        d["spurious"] = to_rows(p.spurious);
        return d;
      },
      py::arg("weight"), py::arg("bias"), py::arg("z"));

  m.def(
      "gen",
      [](std::filesystem::path config, std::filesystem::path out, std::optional<std::uint64_t> seed) {
        return capture([&](std::ostream& o, std::ostream& e) { return cmd_gen({config, out, seed}, o, e); });
      },
      py::arg("config"), py::arg("out"), py::arg("seed") = py::none());
  m.def(
      "run",
      [](std::filesystem::path config, std::filesystem::path out, std::optional<std::filesystem::path> data,
         std::optional<std::uint64_t> seed, bool export_repr) {
        return capture(
            [&](std::ostream& o, std::ostream& e) { return cmd_run({config, data, out, seed, export_repr}, o, e); });
      },
      py::arg("config"), py::arg("out"), py::arg("data") = py::none(), py::arg("seed") = py::none(),
      py::arg("export_repr") = false);
}
