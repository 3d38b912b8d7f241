#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tow/config.hpp"
#include "tow/kernel.hpp"

namespace py = pybind11;
using namespace tow;

namespace {

RunConfig configure(const std::string& text, const std::map<std::string, std::string>& overrides) {
  RunConfig c = parse_config(text);
  for (const auto& [k, v] : overrides) c.set(k, v);
  return c;
}

py::dict field_arrays(const GridField& field) {
  const auto n = static_cast<py::ssize_t>(field.size());
  const int dim = field.dim();
  py::array_t<double> coords({n, static_cast<py::ssize_t>(dim)});
  py::array_t<double> values(n);
  py::array_t<std::uint8_t> classes(n);
  auto c = coords.mutable_unchecked<2>();
  auto v = values.mutable_unchecked<1>();
  auto k = classes.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < n; ++i) {
    const Vec x = field.coords(static_cast<std::size_t>(i));
    for (int d = 0; d < dim; ++d) c(i, d) = x[d];
    v(i) = field.value(static_cast<std::size_t>(i));
    k(i) = static_cast<std::uint8_t>(field.node_class(static_cast<std::size_t>(i)));
  }
  py::dict out;
  out["coords"] = coords;
  out["values"] = values;
  out["classes"] = classes;
  out["dx"] = field.dx();
  return out;
}

py::dict solve_dict(const SolveReport& r) {
  py::dict out = field_arrays(r.solution);
  out["iterations"] = r.iterations;
  out["final_residual"] = r.final_residual;
  out["tol"] = r.tol;
  out["converged"] = r.converged;
  out["monotone"] = r.monotone_ok;
  out["apriori_bound_ok"] = r.apriori_bound_ok;
  out["residual_history"] = r.residual_history;
  out["seconds"] = r.seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_tow, m) {
  m.doc() = "Tug-of-war dynamic programming solver";

  static py::exception<Error> tow_error(m, "TowError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(tow_error.ptr())(e.what());
      exc.attr("kind") = to_string(e.kind());
      exc.attr("exit_code") = exit_code(e.kind());
      PyErr_SetObject(tow_error.ptr(), exc.ptr());
    }
  });

  m.def("gamma_constant", py::overload_cast<int, double>(&gamma_constant), py::arg("dim"), py::arg("p"));
  m.def(
      "moment_table",
      [](int dim, double p) {
        const MomentTable t = moment_table(KernelParams(dim, p, 1.0));
        py::dict d;
        d["gamma"] = gamma_constant(dim, p);
        d["first_moment_ratio"] = t.first_moment_ratio;
        d["axial_p"] = t.axial_p_moment;
        d["cross"] = t.cross_moment;
        d["radial"] = t.radial_moment;
        d["shell_fraction"] = t.shell_fraction;
        return d;
      },
      py::arg("dim"), py::arg("p"));
  m.def(
      "mc_moment",
      [](int dim, double p, const std::string& kind, std::int64_t samples, std::uint64_t seed) {
        const McEstimate e = mc_moment_oracle(dim, p, moment_kind_from_string(kind), samples, seed);
        return py::make_tuple(e.estimate, e.std_error);
      },
      py::arg("dim"), py::arg("p"), py::arg("kind"), py::arg("samples"), py::arg("seed") = 1);

  m.def(
      "normalize_config", [](const std::string& text) { return emit_config(parse_config(text)); }, py::arg("text"));
  m.def(
      "solve",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        const DppProblem prob = problem_from_config(configure(text, overrides));
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = solve(prob);
        }
        return solve_dict(r);
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{});
  m.def(
      "simulate",
      [](const std::string& text, const std::map<std::string, std::string>& overrides) {
        const GameConfig cfg = game_from_config(configure(text, overrides));
        const bool needs_solver = cfg.player_one.kind == StrategyKind::Optimal ||
                                  cfg.player_one.kind == StrategyKind::OptimalRecompute ||
                                  cfg.player_two.kind == StrategyKind::Optimal ||
                                  cfg.player_two.kind == StrategyKind::OptimalRecompute;
        py::dict out;
        GameStats st;
        {
          py::gil_scoped_release release;
          if (needs_solver) {
            const SolveReport rep = solve(cfg.problem);
            st = play(cfg, &rep);
            const Discrepancy d = value_vs_solver(cfg, st, rep);
            py::gil_scoped_acquire hold;
            out["solver_value"] = d.solver_value;
            out["agree"] = d.agree;
          } else {
            st = play(cfg);
          }
        }
        out["paths"] = st.paths;
        out["mean_payoff"] = st.mean_payoff;
        out["std_error"] = st.std_error;
        out["mean_exit_steps"] = st.mean_exit_steps;
        out["truncated_paths"] = st.truncated_paths;
        return out;
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{});
}
