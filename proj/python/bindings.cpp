// Python bindings for the relpose core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relpose/bench.hpp"
#include "relpose/geometry.hpp"
#include "relpose/io.hpp"
#include "relpose/solver.hpp"
#include "relpose/spectral.hpp"
#include "relpose/synth.hpp"
#include "relpose/tuner.hpp"

namespace py = pybind11;
using namespace relpose;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexPairs = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 2, Eigen::RowMajor>;

KeypointSet make_set(const RowMatrix& positions, const RowMatrix& normals,
                     const RowMatrix& descriptors, const std::string& id) {
  const Eigen::Index n = positions.rows();
  if (positions.cols() != 3 || normals.cols() != 3 || normals.rows() != n ||
      descriptors.rows() != n) {
    throw py::value_error("expected positions (n, 3), normals (n, 3), descriptors (n, k)");
  }
  std::vector<Keypoint> points(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Keypoint& kp = points[static_cast<std::size_t>(i)];
    kp.position = positions.row(i).transpose();
    kp.normal = normals.row(i).transpose();
    kp.descriptor = descriptors.row(i).transpose();
  }
  return {id, std::move(points), static_cast<std::size_t>(descriptors.cols())};
}

RowMatrix column_block(const KeypointSet& s, int which) {
  const auto n = static_cast<Eigen::Index>(s.size());
  const auto cols = which == 2 ? static_cast<Eigen::Index>(s.descriptor_length()) : 3;
  RowMatrix m(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Keypoint& kp = s[static_cast<std::size_t>(i)];
    if (which == 0) m.row(i) = kp.position.transpose();
    if (which == 1) m.row(i) = kp.normal.transpose();
    if (which == 2) m.row(i) = kp.descriptor.transpose();
  }
  return m;
}

IndexPairs pairs_array(const std::vector<Candidate>& cands) {
  IndexPairs m(static_cast<Eigen::Index>(cands.size()), 2);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = static_cast<std::int64_t>(cands[i].source_index);
    m(static_cast<Eigen::Index>(i), 1) = static_cast<std::int64_t>(cands[i].target_index);
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust relative pose estimation between keypoint sets";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<KeypointSet>(m, "KeypointSet")
      .def(py::init(&make_set), py::arg("positions"), py::arg("normals"), py::arg("descriptors"),
           py::arg("id") = "")
      .def_property_readonly("id", &KeypointSet::id)
      .def_property_readonly("positions", [](const KeypointSet& s) { return column_block(s, 0); })
      .def_property_readonly("normals", [](const KeypointSet& s) { return column_block(s, 1); })
      .def_property_readonly("descriptors", [](const KeypointSet& s) { return column_block(s, 2); })
      .def("__len__", &KeypointSet::size)
      .def("to_json", [](const KeypointSet& s) { return to_json(s).dump(); });

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def(py::init<const Mat3&, const Vec3&>(), py::arg("rotation"), py::arg("translation"))
      .def_property_readonly("rotation", &RigidTransform::rotation)
      .def_property_readonly("translation", &RigidTransform::translation)
      .def("matrix", &RigidTransform::matrix)
      .def("apply", [](const RigidTransform& t, const Vec3& p) { return t(p); })
      .def("inverse", &invert)
      .def("__matmul__", &compose);

  py::class_<ConsistencyParams>(m, "ConsistencyParams")
      .def(py::init<>())
      .def(py::init([](double g1, double g2, double g3, double g4, double g5) {
             ConsistencyParams g{g1, g2, g3, g4, g5};
             g.validate();
             return g;
           }),
           py::arg("gamma1"), py::arg("gamma2"), py::arg("gamma3"), py::arg("gamma4"),
           py::arg("gamma5"))
      .def_readwrite("gamma1", &ConsistencyParams::gamma1)
      .def_readwrite("gamma2", &ConsistencyParams::gamma2)
      .def_readwrite("gamma3", &ConsistencyParams::gamma3)
      .def_readwrite("gamma4", &ConsistencyParams::gamma4)
      .def_readwrite("gamma5", &ConsistencyParams::gamma5)
      .def("as_list", [](const ConsistencyParams& g) {
        const auto a = g.as_array();
        return std::vector<double>(a.begin(), a.end());
      })
      .def("__eq__", [](const ConsistencyParams& a, const ConsistencyParams& b) { return a == b; });

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("delta", &SolverConfig::delta)
      .def_readwrite("alpha", &SolverConfig::alpha)
      .def_readwrite("epsilon", &SolverConfig::epsilon)
      .def_readwrite("outer_iters", &SolverConfig::outer_iters)
      .def_readwrite("irls_iters", &SolverConfig::irls_iters)
      .def_readwrite("power_iters", &SolverConfig::power_iters)
      .def_readwrite("power_tol", &SolverConfig::power_tol)
      .def_readwrite("prune_threshold", &SolverConfig::prune_threshold)
      .def_readwrite("max_candidates", &SolverConfig::max_candidates)
      .def_readwrite("report_fraction", &SolverConfig::report_fraction)
      .def_readwrite("per_iter_gammas", &SolverConfig::per_iter_gammas)
      .def_property(
          "mode", [](const SolverConfig& c) { return to_string(c.mode); },
          [](SolverConfig& c, const std::string& name) { c.mode = mode_from_string(name); });

  py::class_<MatchResult>(m, "MatchResult")
      .def_property_readonly("status", [](const MatchResult& r) { return to_string(r.status); })
      .def_readonly("message", &MatchResult::message)
      .def_readonly("transform", &MatchResult::transform)
      .def_property_readonly("candidates", [](const MatchResult& r) { return pairs_array(r.candidates); })
      .def_readonly("indicator", &MatchResult::indicator)
      .def_property_readonly("selected", [](const MatchResult& r) { return pairs_array(r.selected); })
      .def_readonly("objective_trace", &MatchResult::objective_trace)
      .def_readonly("low_confidence", &MatchResult::low_confidence)
      .def_property_readonly("ok", &MatchResult::ok)
      .def("to_json", [](const MatchResult& r) { return to_json(r).dump(); });

  py::class_<GenSpec>(m, "GenSpec")
      .def(py::init<>())
      .def_readwrite("source_points", &GenSpec::source_points)
      .def_readwrite("target_points", &GenSpec::target_points)
      .def_readwrite("scene_points", &GenSpec::scene_points)
      .def_readwrite("room_size", &GenSpec::room_size)
      .def_readwrite("clutter_boxes", &GenSpec::clutter_boxes)
      .def_readwrite("symmetric_room", &GenSpec::symmetric_room)
      .def_readwrite("min_spacing", &GenSpec::min_spacing)
      .def_readwrite("descriptor_length", &GenSpec::descriptor_length)
      .def_readwrite("descriptor_noise", &GenSpec::descriptor_noise)
      .def_readwrite("position_noise", &GenSpec::position_noise)
      .def_readwrite("normal_noise", &GenSpec::normal_noise)
      .def_readwrite("outlier_rate", &GenSpec::outlier_rate)
      .def_readwrite("decoy_descriptors", &GenSpec::decoy_descriptors)
      .def_readwrite("overlap_target", &GenSpec::overlap_target)
      .def_readwrite("overlap_radius", &GenSpec::overlap_radius)
      .def_property(
          "rotation",
          [](const GenSpec& s) { return s.rotation == RotationSampling::full ? "full" : "yaw"; },
          [](GenSpec& s, const std::string& name) {
            if (name == "full") {
              s.rotation = RotationSampling::full;
            } else if (name == "yaw") {
              s.rotation = RotationSampling::yaw;
            } else {
              throw py::value_error("rotation must be 'full' or 'yaw'");
            }
          })
      .def_readwrite("yaw_max_deg", &GenSpec::yaw_max_deg)
      .def_readwrite("t_max", &GenSpec::t_max);

  py::class_<ScenarioPair>(m, "ScenarioPair")
      .def_readonly("source", &ScenarioPair::source)
      .def_readonly("target", &ScenarioPair::target)
      .def_readonly("ground_truth", &ScenarioPair::ground_truth)
      .def_property_readonly("inlier_map", [](const ScenarioPair& p) { return pairs_array(p.inlier_map); })
      .def_readonly("overlap_ratio", &ScenarioPair::overlap_ratio)
      .def_readonly("seed", &ScenarioPair::seed);

  m.def("solve", &solve, py::arg("source"), py::arg("target"),
        py::arg("gamma") = ConsistencyParams{}, py::arg("config") = SolverConfig{},
        py::call_guard<py::gil_scoped_release>(),
        "Estimate the rigid transform mapping source keypoints onto target keypoints.");
  m.def("generate", &generate, py::arg("spec"), py::arg("seed"),
        "Deterministic synthetic scan pair.");
  m.def("load_scenario", [](const std::string& path) { return load_scenario(path); });
  m.def("rotation_error", &rotation_error, py::arg("estimate"), py::arg("truth"),
        "Geodesic angle between two rotations, in degrees.");
  m.def("translation_error", &translation_error, py::arg("estimate"), py::arg("truth"),
        py::arg("source_barycenter"));
  m.def("random_rotation", py::overload_cast<std::uint64_t>(&random_rotation), py::arg("seed"));
  m.def(
      "max_eigenvector",
      [](const Eigen::MatrixXd& a, int max_iters, double tol) {
        const EigenPair p = max_eigenvector(a, max_iters, tol);
        return py::make_tuple(p.vector, p.eigenvalue);
      },
      py::arg("matrix"), py::arg("max_iters") = 100, py::arg("tol") = 1e-9,
      "Leading eigenvector and eigenvalue of a non-negative symmetric matrix.");
  m.def(
      "evaluate",
      [](const std::vector<ScenarioPair>& pairs, const ConsistencyParams& gamma,
         const SolverConfig& config) { return to_json(evaluate(pairs, gamma, config)).dump(); },
      py::arg("pairs"), py::arg("gamma") = ConsistencyParams{}, py::arg("config") = SolverConfig{},
      "Benchmark report as a JSON string.");
  m.def(
      "tune",
      [](const std::vector<ScenarioPair>& pairs, const ConsistencyParams& gamma,
         const SolverConfig& config, double fd_step, int max_iters) {
        const TuneResult r = tune(pairs, gamma, config, fd_step, max_iters);
        return py::make_tuple(r.gamma, r.report.initial_loss, r.report.final_loss,
                              r.report.iterations);
      },
      py::arg("pairs"), py::arg("gamma") = ConsistencyParams{}, py::arg("config") = SolverConfig{},
      py::arg("fd_step") = 1e-2, py::arg("max_iters") = 30,
      "Returns (gamma, initial_loss, final_loss, iterations).");
}
