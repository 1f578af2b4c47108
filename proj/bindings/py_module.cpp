#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stochfrac/experiment.hpp"
#include "stochfrac/report_io.hpp"

namespace py = pybind11;
using namespace stochfrac;

namespace {

std::vector<double> lattice_values(const LatticeFunction& u) {
    return {u.values().begin(), u.values().end()};
}

std::vector<double> lattice_centers(const LatticeFunction& u) {
    std::vector<double> xs;
    xs.reserve(static_cast<size_t>(u.size()));
    for (int i = -u.k(); i <= u.k(); ++i) xs.push_back(u.grid().center(i));
    return xs;
}

RunConfig make_config(double lambda, int n_paths, std::uint64_t seed, bool noise_on,
                      const std::string& problem, int threads) {
    RunConfig cfg = RunConfig::desk(lambda);
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.noise_on = noise_on;
    cfg.problem_name = problem;
    cfg.threads = threads;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite volume solver for 1-D degenerate fractional stochastic conservation laws";
    m.attr("__version__") = std::string(kVersion);

    py::class_<Grid1D>(m, "Grid1D")
        .def(py::init<double, int>(), py::arg("dx"), py::arg("k_cells"))
        .def_readonly("dx", &Grid1D::dx)
        .def_readonly("k_cells", &Grid1D::k_cells)
        .def_property_readonly("cell_count", &Grid1D::cell_count)
        .def("center", &Grid1D::center, py::arg("i"));

    py::class_<LatticeFunction>(m, "LatticeFunction")
        .def(py::init<const Grid1D&>())
        .def(py::init<const Grid1D&, std::vector<double>>())
        .def_property_readonly("grid", &LatticeFunction::grid)
        .def_property_readonly("values", &lattice_values)
        .def_property_readonly("centers", &lattice_centers)
        .def("mass", &LatticeFunction::mass)
        .def("l1_norm", &LatticeFunction::l1_norm)
        .def("__getitem__", [](const LatticeFunction& u, int i) {
            if (i < -u.k() || i > u.k()) throw py::index_error();
            return u[i];
        })
        .def("__len__", &LatticeFunction::size);

    m.def("project_initial",
          [](const std::function<double(double)>& u0, const Grid1D& grid, int quad_order,
             std::vector<double> breakpoints) {
              return project_initial(u0, grid, quad_order, breakpoints);
          },
          py::arg("u0"), py::arg("grid"), py::arg("quad_order") = 5,
          py::arg("breakpoints") = std::vector<double>{});
    m.def("coarsen", &coarsen, py::arg("fine"), py::arg("ratio"));
    m.def("l1_distance", &l1_distance);
    m.def("bv_seminorm", &bv_seminorm);

    m.def("d_lambda", &d_lambda, py::arg("lam"));
    m.def("fractional_weight", &fractional_weight, py::arg("lam"), py::arg("dx"), py::arg("i"));
    m.def("weight_quadrature",
          [](double lam, double dx, long long i, double tol) {
              return weight_quadrature(lam, dx, i, tol);
          },
          py::arg("lam"), py::arg("dx"), py::arg("i"), py::arg("tol") = 1e-10);
    m.def("weight_tail_sum", &weight_tail_sum, py::arg("lam"), py::arg("dx"), py::arg("n"));
    m.def("weight_table", [](double lam, double dx, int i_max) {
        const WeightKernel k = WeightKernel::build(lam, dx, i_max);
        return std::vector<double>(k.weights().begin(), k.weights().end());
    }, py::arg("lam"), py::arg("dx"), py::arg("i_max"));

    m.def("clipped_burgers_flux", &clipped_burgers_flux);
    m.def("clipped_sigma", &clipped_sigma);
    m.def("godunov_flux", [](double a, double b, bool clipped) {
        const FluxSpec spec = clipped ? FluxSpec::clipped_burgers() : FluxSpec::burgers();
        return numerical_flux(spec, a, b);
    }, py::arg("a"), py::arg("b"), py::arg("clipped") = true);

    m.def("brownian_increments",
          [](std::uint64_t seed, std::uint64_t path_id, int n_fine, double dt_fine, int modes) {
              return generate_path(seed, path_id, n_fine, dt_fine, modes).increments;
          },
          py::arg("seed"), py::arg("path_id"), py::arg("n_fine"), py::arg("dt_fine"),
          py::arg("modes") = 1);

    // One realization of the experiment problem; returns {t: LatticeFunction}.
    m.def("solve",
          [](double lambda, double dx, double dt, double t_end, int k_cells,
             std::vector<double> snapshots, bool noise_on, std::uint64_t seed) {
              const Grid1D grid(dx, k_cells);
              const ProblemSpec problem =
                  ProblemSpec::experiment(lambda, FluxScheme::godunov, noise_on);
              const WeightKernel kernel = WeightKernel::build(lambda, dx, 2 * k_cells);
              Evolver ev(problem, grid, &kernel);
              BrownianPath path;
              const BrownianPath* path_ptr = nullptr;
              if (noise_on) {
                  const int n_fine = static_cast<int>(std::llround(t_end / dt));
                  path = generate_path(seed, 0, n_fine, dt, 1);
                  path_ptr = &path;
              }
              const auto snaps = ev.evolve(dt, t_end, snapshots, path_ptr);
              std::map<double, LatticeFunction> out;
              for (const auto& [t, u] : snaps) out.emplace(t, u);
              return out;
          },
          py::arg("lam"), py::arg("dx"), py::arg("dt"), py::arg("t_end"), py::arg("k_cells"),
          py::arg("snapshots"), py::arg("noise_on") = true, py::arg("seed") = 0);

    py::class_<RateRow>(m, "RateRow")
        .def_readonly("dt", &RateRow::dt)
        .def_readonly("dx", &RateRow::dx)
        .def_readonly("error", &RateRow::error)
        .def_readonly("se", &RateRow::se)
        .def_property_readonly("rate", [](const RateRow& r) -> py::object {
            if (r.rate) return py::float_(*r.rate);
            return py::none();
        });

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("lam", &RateReport::lambda)
        .def_readonly("seed", &RateReport::seed)
        .def_readonly("n_paths", &RateReport::n_paths)
        .def_readonly("n_aborted", &RateReport::n_aborted)
        .def_readonly("rows", &RateReport::rows)
        .def("csv", [](const RateReport& r) {
            std::ostringstream out;
            write_rate_report_csv(out, r);
            return out.str();
        })
        .def("table", &rate_report_table);

    m.def("run_error_study",
          [](double lambda, int n_paths, std::uint64_t seed, bool noise_on,
             const std::string& problem, int threads, py::object levels, py::object dt_ref,
             py::object dx_ref, py::object half_width, py::object t_end) {
              RunConfig cfg = make_config(lambda, n_paths, seed, noise_on, problem, threads);
              if (!levels.is_none()) {
                  cfg.levels.clear();
                  for (auto item : levels.cast<py::list>()) {
                      auto pair = item.cast<std::pair<double, double>>();
                      cfg.levels.push_back({pair.first, pair.second});
                  }
              }
              if (!dt_ref.is_none()) cfg.dt_ref = dt_ref.cast<double>();
              if (!dx_ref.is_none()) cfg.dx_ref = dx_ref.cast<double>();
              if (!half_width.is_none()) cfg.half_width = half_width.cast<double>();
              if (!t_end.is_none()) {
                  cfg.t_end = t_end.cast<double>();
                  std::vector<double> snaps;
                  for (double ts : cfg.snapshot_times)
                      if (ts <= cfg.t_end) snaps.push_back(ts);
                  if (snaps.empty() || snaps.back() != cfg.t_end) snaps.push_back(cfg.t_end);
                  cfg.snapshot_times = snaps;
              }
              py::gil_scoped_release release;
              return run_error_study(cfg);
          },
          py::arg("lam"), py::arg("n_paths") = 200, py::arg("seed") = 0,
          py::arg("noise_on") = true, py::arg("problem") = "experiment", py::arg("threads") = 0,
          py::arg("levels") = py::none(), py::arg("dt_ref") = py::none(),
          py::arg("dx_ref") = py::none(), py::arg("half_width") = py::none(),
          py::arg("t_end") = py::none());

    m.def("estimate_rate",
          [](std::vector<double> errors, std::vector<double> dxs) {
              return estimate_rate(errors, dxs);
          },
          py::arg("errors"), py::arg("dxs"));
}
