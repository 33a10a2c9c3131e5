#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <string>
#include <vector>

#include "hypertree/capacity.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/evaluation.hpp"
#include "hypertree/geometry.hpp"
#include "hypertree/graph.hpp"
#include "hypertree/io.hpp"
#include "hypertree/training.hpp"

namespace py = pybind11;
using namespace hypertree;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

EmbeddingTable to_table(const Array& a) {
  if (a.ndim() != 2) {
    throw InputError("embedding must be a 2-d array of shape (nodes, dim)");
  }
  EmbeddingTable t(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), t.data().begin());
  return t;
}

Array to_array(const EmbeddingTable& t) {
  Array out({t.size(), t.dim()});
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

py::dict trace_row(const EpochRecord& r) {
  py::dict d;
  d["epoch"] = r.epoch;
  d["loss"] = r.mean_loss;
  d["dilation_applied"] = r.dilation_applied;
  d["offenders"] = r.offenders;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hypertree, m) {
  m.doc() = "Hyperbolic tree embeddings in the Poincare ball";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

  m.def("poincare_distance", [](std::vector<double> u, std::vector<double> v) { return poincare_distance(u, v); },
        py::arg("u"), py::arg("v"));
  m.def("hyperbolic_norm", [](std::vector<double> u) { return hyperbolic_norm(u); }, py::arg("u"));
  m.def("dilate", [](std::vector<double> u, double k, double eps) { return dilate(u, k, eps); }, py::arg("u"),
        py::arg("k"), py::arg("eps") = kDefaultEps);
  m.def(
      "distance_gradient",
      [](std::vector<double> u, std::vector<double> v) {
        auto g = distance_gradient(u, v);
        return py::make_tuple(g.du, g.dv);
      },
      py::arg("u"), py::arg("v"));

  m.def("packing_angle", &packing_angle, py::arg("r"));
  m.def("capacity_lower_bound", &capacity_lower_bound, py::arg("d"), py::arg("r"));
  m.def("capacity_upper_bound", &capacity_upper_bound, py::arg("d"), py::arg("r"));

  py::class_<HierarchyGraph>(m, "Graph")
      .def(py::init<>())
      .def_static("load", &load_edge_list, py::arg("path"))
      .def_static("balanced_tree", &generate_balanced_tree, py::arg("branching"), py::arg("levels"))
      .def("add_node", [](HierarchyGraph& g, const std::string& label) { return g.add_node(label); })
      .def("add_edge", &HierarchyGraph::add_edge, py::arg("child"), py::arg("parent"))
      .def_property_readonly("num_nodes", &HierarchyGraph::num_nodes)
      .def_property_readonly("labels", &HierarchyGraph::labels)
      .def_property_readonly("edges",
                             [](const HierarchyGraph& g) {
                               std::vector<std::pair<NodeId, NodeId>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.child, e.parent);
                               return out;
                             })
      .def("validate_tree", &HierarchyGraph::validate_tree)
      .def_property_readonly("is_tree", &HierarchyGraph::is_tree)
      .def("parent", &HierarchyGraph::parent)
      .def("depth", &HierarchyGraph::depth)
      .def("transitive_closure", [](const HierarchyGraph& g) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (const Edge& e : g.transitive_closure()) out.emplace_back(e.child, e.parent);
        return out;
      });

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("negatives", &TrainConfig::negatives)
      .def_readwrite("symmetric", &TrainConfig::symmetric)
      .def_readwrite("eta_tc", &TrainConfig::eta_tc)
      .def_readwrite("n_tc", &TrainConfig::n_tc)
      .def_readwrite("burn_in_epochs", &TrainConfig::burn_in_epochs)
      .def_readwrite("burn_in_lr_divisor", &TrainConfig::burn_in_lr_divisor)
      .def_readwrite("dilation", &TrainConfig::dilation_enabled)
      .def_readwrite("dilation_k", &TrainConfig::dilation_k)
      .def_readwrite("dilation_start_epoch", &TrainConfig::dilation_start_epoch)
      .def_readwrite("dilation_cooldown", &TrainConfig::dilation_cooldown)
      .def_readwrite("init_radius", &TrainConfig::init_radius)
      .def_readwrite("eps", &TrainConfig::eps)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("workers", &TrainConfig::workers)
      .def("validate", &TrainConfig::validate)
      .def("__repr__", [](const TrainConfig& c) { return "TrainConfig(" + config_to_json(c).dump() + ")"; });

  m.def(
      "train",
      [](const HierarchyGraph& g, const TrainConfig& cfg) {
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(g, cfg);
        }
        py::list trace;
        for (const auto& r : res.trace) trace.append(trace_row(r));
        return py::make_tuple(to_array(res.table), trace);
      },
      py::arg("graph"), py::arg("config") = TrainConfig{},
      "Train an embedding; returns (array of shape (nodes, dim), per-epoch trace).");

  m.def(
      "evaluate",
      [](const HierarchyGraph& g, const Array& embedding) {
        const auto r = evaluate_reconstruction(to_table(embedding), g);
        py::dict d;
        d["map"] = r.map;
        d["mr_paper"] = r.mr_paper;
        d["mr_conventional"] = r.mr_conventional;
        return d;
      },
      py::arg("graph"), py::arg("embedding"));

  m.def(
      "classify_illness",
      [](const HierarchyGraph& g, const Array& embedding) {
        const auto r = classify_illness(to_table(embedding), g);
        py::list cases;
        for (const auto& c : r.cases)
          cases.append(py::make_tuple(g.label(c.source), g.label(c.target), g.label(c.inferred),
                                      std::string(to_string(c.category))));
        py::dict d;
        d["capacity"] = r.capacity;
        d["intra"] = r.intra;
        d["inter"] = r.inter;
        d["total"] = r.total();
        d["cases"] = cases;
        return d;
      },
      py::arg("graph"), py::arg("embedding"));
}
