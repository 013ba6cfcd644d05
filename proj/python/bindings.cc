#include <memory>
#include <random>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pcnrm/dp.h"
#include "pcnrm/error.h"
#include "pcnrm/generators.h"
#include "pcnrm/io.h"
#include "pcnrm/pcp.h"
#include "pcnrm/simulator.h"

namespace py = pybind11;
using namespace pcnrm;

namespace {

ApproxKind ApproxOrThrow(const std::string& name) {
  if (auto k = ParseApproxKind(name)) return *k;
  throw InputError("unknown approximation: " + name);
}

PolicyKind PolicyOrThrow(const std::string& name) {
  if (auto k = ParsePolicyKind(name)) return *k;
  throw InputError("unknown policy: " + name);
}

Instance FromTuples(const std::vector<std::pair<std::string, int>>& resources,
                    const std::vector<std::tuple<std::string, double, std::vector<std::string>>>& products,
                    const std::vector<std::tuple<std::string, double, std::vector<std::string>,
                                                 std::vector<double>>>& segments,
                    double horizon) {
  InstanceSpec spec;
  for (const auto& [id, cap] : resources) spec.resources.push_back({id, cap});
  for (const auto& [id, fare, res] : products) spec.products.push_back({id, fare, res});
  for (const auto& [id, rate, choices, transitions] : segments) {
    spec.segments.push_back({id, rate, choices, transitions});
  }
  spec.horizon = horizon;
  return ValidateOrThrow(spec);
}

py::dict SolutionDict(const Instance& inst, const ApproxSolution& sol) {
  py::dict d;
  d["approximation"] = ToString(sol.kind);
  d["objective"] = sol.objective;
  d["sales"] = sol.sales;
  d["duals"] = sol.duals;
  d["iterations"] = sol.iterations;
  d["nodes"] = sol.nodes;
  d["gap"] = sol.gap;
  d["seconds"] = sol.solve_seconds;
  if (sol.closings) d["closings"] = sol.closings->times;
  py::list durations;
  for (const auto& [offer, t] : sol.durations) {
    py::list ids;
    for (int j : offer.products()) ids.append(inst.product_id(j));
    durations.append(py::make_tuple(ids, t));
  }
  d["durations"] = durations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_pcnrm, m) {
  m.doc() = "Network revenue management under ranking-based choice";

  // Solver and cap failures; input errors map to ValueError.
  static PyObject* error =
      PyErr_NewException("pcnrm._pcnrm.PcnrmError", PyExc_RuntimeError, nullptr);
  m.attr("PcnrmError") = py::handle(error);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInput) {
        PyErr_SetString(PyExc_ValueError, e.what());
      } else {
        PyErr_SetString(error, e.what());
      }
    }
  });

  py::class_<Instance>(m, "Instance")
      .def_property_readonly("num_resources", &Instance::num_resources)
      .def_property_readonly("num_products", &Instance::num_products)
      .def_property_readonly("num_segments", &Instance::num_segments)
      .def_property_readonly("capacities", &Instance::capacities)
      .def_property_readonly("fares", &Instance::fares)
      .def_property_readonly("horizon", &Instance::horizon)
      .def_property_readonly("load_factor", &Instance::load_factor)
      .def_property_readonly("product_ids",
                             [](const Instance& inst) {
                               std::vector<std::string> ids;
                               for (int j = 0; j < inst.num_products(); ++j) {
                                 ids.push_back(inst.product_id(j));
                               }
                               return ids;
                             })
      .def_property_readonly("resource_ids",
                             [](const Instance& inst) {
                               std::vector<std::string> ids;
                               for (int i = 0; i < inst.num_resources(); ++i) {
                                 ids.push_back(inst.resource_id(i));
                               }
                               return ids;
                             })
      .def("with_capacities", &Instance::WithCapacities, py::arg("capacities"))
      .def("with_load_factor", &Instance::WithLoadFactor, py::arg("load_factor"))
      .def("__repr__", [](const Instance& inst) {
        return "<Instance resources=" + std::to_string(inst.num_resources()) +
               " products=" + std::to_string(inst.num_products()) +
               " segments=" + std::to_string(inst.num_segments()) + ">";
      });

  m.def("make_instance", &FromTuples, py::arg("resources"), py::arg("products"),
        py::arg("segments"), py::arg("horizon"),
        "resources: [(id, capacity)], products: [(id, fare, [resource ids])], "
        "segments: [(id, rate, [product ids], [transition probabilities])]");
  m.def("running_example", [] { return ValidateOrThrow(RunningExampleSpec()); });
  m.def("load_instance",
        [](const std::filesystem::path& dir) { return ValidateOrThrow(ReadInstanceDir(dir)); },
        py::arg("directory"));
  m.def(
      "bus_line",
      [](std::uint64_t seed, double load_factor) {
        std::mt19937_64 rng(seed);
        BusLineShape shape;
        shape.load_factor = load_factor;
        return ValidateOrThrow(BusLineInstance(rng, shape));
      },
      py::arg("seed") = 2024, py::arg("load_factor") = 1.2);
  m.def(
      "random_instance",
      [](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return ValidateOrThrow(RandomInstance(rng));
      },
      py::arg("seed"));

  m.def(
      "solve",
      [](const Instance& inst, const std::string& approx, double gap, bool duals) {
        PcpOptions pcp;
        pcp.gap = gap;
        pcp.compute_duals = duals;
        ApproxSolution sol;
        {
          py::gil_scoped_release release;
          sol = SolveApprox(inst, ApproxOrThrow(approx), pcp);
        }
        return SolutionDict(inst, sol);
      },
      py::arg("instance"), py::arg("approx") = "cdlp", py::arg("gap") = 1e-3,
      py::arg("duals") = false);

  m.def(
      "pcp_revenue",
      [](const Instance& inst, const std::vector<double>& closings) {
        if (static_cast<int>(closings.size()) != inst.num_products()) {
          throw InputError("one closing time per product expected");
        }
        return PcpRevenue(inst, ClosingTimes{closings});
      },
      py::arg("instance"), py::arg("closings"));

  m.def(
      "simulate",
      [](const Instance& inst, const std::string& approx, const std::string& policy,
         int evaluations, std::uint64_t seed, int checkpoints, bool allow_reopening) {
        const PolicyKind pk = PolicyOrThrow(policy);
        SimConfig sim;
        sim.evaluations = evaluations;
        sim.seed = seed;
        sim.allow_reopening = allow_reopening;
        for (int k = 1; k <= checkpoints; ++k) {
          sim.checkpoints.push_back(inst.horizon() * k / (checkpoints + 1));
        }
        SimResult res;
        {
          py::gil_scoped_release release;
          if (pk == PolicyKind::kDp) {
            const Policy p = BuildPolicy(inst, {}, pk);
            res = Simulate(inst, p, sim);
          } else {
            const ApproxKind kind = ApproxOrThrow(approx);
            PcpOptions pcp;
            pcp.compute_duals = pk == PolicyKind::kOd;
            const ApproxSolution sol = SolveApprox(inst, kind, pcp);
            const Policy p = BuildPolicy(inst, sol, pk);
            res = sim.checkpoints.empty()
                      ? Simulate(inst, p, sim)
                      : SimulateReoptimizing(inst, p, MakeReoptimizer(kind, pk, pcp, {}), sim);
          }
        }
        py::dict d;
        d["expected_revenue"] = res.mean_revenue;
        d["sd_revenue"] = res.sd_revenue;
        d["half_width"] = res.half_width;
        d["ci_valid"] = res.ci_valid;
        d["cf_consumed"] = res.cf_consumed;
        d["cf_remaining"] = res.cf_remaining;
        d["mean_sales"] = res.mean_sales;
        d["revenues"] = res.revenues;
        return d;
      },
      py::arg("instance"), py::arg("approx") = "pcmp", py::arg("policy") = "pc",
      py::arg("evaluations") = 1000, py::arg("seed") = 1, py::arg("checkpoints") = 0,
      py::arg("allow_reopening") = false);

  m.def(
      "dp_value",
      [](const Instance& inst, std::optional<double> dt) {
        DpOptions opts;
        if (dt) opts.dt = *dt;
        py::gil_scoped_release release;
        return SolveExactDp(inst, opts).Value(0, inst.capacities());
      },
      py::arg("instance"), py::arg("dt") = py::none());

  m.def("od_policy_size", py::overload_cast<const Instance&>(&OdPolicySize),
        py::arg("instance"));
}
