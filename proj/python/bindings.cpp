#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "brwlab/analytics.hpp"
#include "brwlab/harness.hpp"
#include "brwlab/manytoone.hpp"
#include "brwlab/poisson.hpp"
#include "brwlab/simulator.hpp"
#include "brwlab/spine.hpp"

namespace py = pybind11;
using namespace brwlab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "branching random walk laboratory core";

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<double, double, double>(), py::arg("lam"), py::arg("beta"),
           py::arg("p"))
      .def_readonly("lam", &ModelParams::lambda)
      .def_readonly("beta", &ModelParams::beta)
      .def_readonly("p", &ModelParams::p);

  py::enum_<Regime>(m, "Regime")
      .value("P_ZERO", Regime::kPZero)
      .value("P_IN_0_1", Regime::kPIn01)
      .value("P_ONE", Regime::kPOne)
      .value("EXPLOSIVE", Regime::kExplosive);

  py::class_<AsymptoticPrediction>(m, "AsymptoticPrediction")
      .def_readonly("regime", &AsymptoticPrediction::regime)
      .def_readonly("theta_hat", &AsymptoticPrediction::theta_hat)
      .def_readonly("b_hat", &AsymptoticPrediction::b_hat)
      .def_readonly("c_hat", &AsymptoticPrediction::c_hat)
      .def_readonly("exp_rate", &AsymptoticPrediction::exp_rate);

  m.def("g", &g, py::arg("theta"));
  m.def("solve_theta_hat", &solve_theta_hat);
  m.def("rate_function", &rate_function, py::arg("x"), py::arg("lam"));
  m.def("rate_function_inverse", &rate_function_inverse, py::arg("y"),
        py::arg("lam"));
  m.def("classify", &classify);
  m.def("rightmost_speed", &rightmost_speed);
  m.def("predict_rightmost", &predict_rightmost);
  m.def("normalize_rightmost", &normalize_rightmost);
  m.def("normalized_limit", &normalized_limit);
  m.def(
      "optimal_path",
      [](const ModelParams& params, const std::vector<double>& grid, double f0) {
        return optimal_path(params, grid, f0);
      },
      py::arg("params"), py::arg("t_grid"), py::arg("f0") = 1.0);

  py::enum_<Termination>(m, "Termination")
      .value("HORIZON", Termination::kHorizon)
      .value("POPULATION_CAP", Termination::kPopulationCap)
      .value("EVENT_CAP", Termination::kEventCap);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<ModelParams>())
      .def_readwrite("params", &SimConfig::params)
      .def_readwrite("t_max", &SimConfig::t_max)
      .def_readwrite("population_cap", &SimConfig::population_cap)
      .def_readwrite("event_cap", &SimConfig::event_cap)
      .def_readwrite("sample_grid", &SimConfig::sample_grid)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("start_position", &SimConfig::start_position)
      .def_readwrite("cull_leftmost", &SimConfig::cull_leftmost);

  py::class_<PopulationTrajectory>(m, "PopulationTrajectory")
      .def_readonly("sample_times", &PopulationTrajectory::sample_times)
      .def_readonly("population", &PopulationTrajectory::population)
      .def_readonly("rightmost", &PopulationTrajectory::rightmost)
      .def_readonly("leftmost", &PopulationTrajectory::leftmost)
      .def_readonly("cap_hit_time", &PopulationTrajectory::cap_hit_time)
      .def_readonly("event_count", &PopulationTrajectory::event_count)
      .def_readonly("branch_count", &PopulationTrajectory::branch_count)
      .def_readonly("terminated_reason", &PopulationTrajectory::terminated_reason);

  m.def("simulate", &simulate);

  py::class_<CapHitRow>(m, "CapHitRow")
      .def_readonly("cap", &CapHitRow::cap)
      .def_readonly("median", &CapHitRow::median)
      .def_readonly("q1", &CapHitRow::q1)
      .def_readonly("q3", &CapHitRow::q3)
      .def_readonly("completed", &CapHitRow::completed)
      .def_readonly("event_capped", &CapHitRow::event_capped);

  m.def(
      "cap_hit_scan",
      [](const ModelParams& params, const std::vector<std::int64_t>& caps,
         int replicas, std::uint64_t seed, double t_max,
         std::int64_t event_cap) {
        return cap_hit_scan(params, caps, replicas, seed, t_max, event_cap);
      },
      py::arg("params"), py::arg("caps"), py::arg("replicas"), py::arg("seed"),
      py::arg("t_max") = 1e6, py::arg("event_cap") = 100'000'000);

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("t", &ScanRow::t)
      .def_readonly("statistic", &ScanRow::statistic)
      .def_readonly("mc_error", &ScanRow::mc_error)
      .def_readonly("predicted", &ScanRow::predicted)
      .def_readonly("ratio", &ScanRow::ratio);

  m.def(
      "rightmost_scan",
      [](const ModelParams& params, const std::vector<double>& t_grid,
         int replicas, std::uint64_t seed, std::int64_t population_cap) {
        return rightmost_scan(params, t_grid, replicas, seed, population_cap);
      },
      py::arg("params"), py::arg("t_grid"), py::arg("replicas"),
      py::arg("seed"), py::arg("population_cap") = 20'000);

  py::class_<WeightedPathEstimate>(m, "WeightedPathEstimate")
      .def_readonly("mean", &WeightedPathEstimate::mean)
      .def_readonly("standard_error", &WeightedPathEstimate::standard_error)
      .def_readonly("replicas", &WeightedPathEstimate::replicas)
      .def_readonly("max_weight", &WeightedPathEstimate::max_weight)
      .def_readonly("hits", &WeightedPathEstimate::hits);

  m.def("expected_population", &expected_population, py::arg("params"),
        py::arg("t"), py::arg("replicas"), py::arg("seed"));
  m.def("corridor_expectation", &corridor_expectation, py::arg("params"),
        py::arg("f"), py::arg("delta"), py::arg("t"), py::arg("replicas"),
        py::arg("seed"));

  py::class_<Tree>(m, "Tree")
      .def_readonly("start_time", &Tree::start_time)
      .def_readonly("end_time", &Tree::end_time)
      .def_readonly("terminated_reason", &Tree::terminated_reason)
      .def_readonly("event_count", &Tree::event_count)
      .def("population_at", &Tree::population_at)
      .def("rightmost_at", &Tree::rightmost_at);

  m.def("simulate_tree", &simulate_tree, py::arg("params"),
        py::arg("start_time"), py::arg("t_max"), py::arg("start_position"),
        py::arg("population_cap"), py::arg("event_cap"), py::arg("seed"));

  py::class_<ThetaSchedule>(m, "ThetaSchedule")
      .def_static("identity", &ThetaSchedule::identity)
      .def_static("case_a", &ThetaSchedule::case_a)
      .def_static("case_b", &ThetaSchedule::case_b)
      .def_static("case_c", &ThetaSchedule::case_c)
      .def_static("explosion", &ThetaSchedule::explosion)
      .def_static("case_b_upper", &ThetaSchedule::case_b_upper)
      .def_static("case_c_upper", &ThetaSchedule::case_c_upper);

  py::class_<SpineRecord>(m, "SpineRecord")
      .def_readonly("birth_times", &SpineRecord::birth_times)
      .def_readonly("start_position", &SpineRecord::start_position)
      .def_readonly("horizon", &SpineRecord::horizon)
      .def("position_at", &SpineRecord::position_at)
      .def("births_at", &SpineRecord::births_at);

  m.def("sample_spine", &sample_spine, py::arg("params"), py::arg("theta"),
        py::arg("t_max"), py::arg("seed"), py::arg("start_position") = 0);

  py::class_<SpineBirthCount>(m, "SpineBirthCount")
      .def_readonly("intensity", &SpineBirthCount::intensity)
      .def_readonly("count", &SpineBirthCount::count);
  m.def("spine_birth_count", &spine_birth_count, py::arg("params"),
        py::arg("theta"), py::arg("t"), py::arg("seed"),
        py::arg("start_position") = 0);

  py::class_<TiltedTree>(m, "TiltedTree")
      .def_readonly("spine", &TiltedTree::spine)
      .def_readonly("end_time", &TiltedTree::end_time)
      .def_readonly("terminated_reason", &TiltedTree::terminated_reason)
      .def("population_at", &TiltedTree::population_at)
      .def("rightmost_at", &TiltedTree::rightmost_at);

  m.def("simulate_tilted", &simulate_tilted, py::arg("params"),
        py::arg("theta"), py::arg("t_max"), py::arg("population_cap"),
        py::arg("event_cap"), py::arg("seed"));
  m.def("resample_subtrees", &resample_subtrees, py::arg("tree"),
        py::arg("params"), py::arg("population_cap"), py::arg("event_cap"),
        py::arg("seed"));
  m.def("additive_martingale",
        py::overload_cast<const TiltedTree&, const ThetaSchedule&,
                          const ModelParams&, double>(&additive_martingale),
        py::arg("tree"), py::arg("theta"), py::arg("params"), py::arg("t"));
  m.def("additive_martingale",
        py::overload_cast<const Tree&, const ThetaSchedule&,
                          const ModelParams&, double>(&additive_martingale),
        py::arg("tree"), py::arg("theta"), py::arg("params"), py::arg("t"));

  py::class_<SpineDecomposition>(m, "SpineDecomposition")
      .def_readonly("spine_term", &SpineDecomposition::spine_term)
      .def_readonly("sum_term", &SpineDecomposition::sum_term);
  m.def("spine_decomposition", &spine_decomposition, py::arg("spine"),
        py::arg("theta"), py::arg("params"), py::arg("t"));
}
