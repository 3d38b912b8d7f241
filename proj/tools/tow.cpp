// Command-line front end: one subcommand per experiment, all settings from a
// flat config file plus a few global flags.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tow/config.hpp"
#include "tow/dpp_solver.hpp"
#include "tow/extremal.hpp"
#include "tow/game.hpp"
#include "tow/harness.hpp"
#include "tow/kernel.hpp"
#include "tow/report.hpp"

using namespace tow;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<long long> seed;
  std::optional<int> threads;
  std::string format;
};

RunConfig load(const Globals& g) {
  RunConfig cfg = g.config.empty() ? parse_config("") : load_config(g.config);
  if (g.seed) cfg.set("seed", std::to_string(*g.seed));
  if (g.threads) cfg.set("threads", std::to_string(*g.threads));
  return cfg;
}

Format pick_format(const Globals& g, Format fallback) {
  return g.format.empty() ? fallback : format_from_string(g.format);
}

void echo_config(Report& r, const RunConfig& cfg) {
  for (const auto& [k, v] : cfg.values()) r.add("config." + k, v);
}

std::string summary_line(const Report& r) {
  std::string line;
  for (const auto& [k, v] : r.fields) {
    if (k.rfind("config.", 0) == 0) continue;
    Report one;
    one.add(k, v);
    std::string text = render_report(one, Format::Text);
    text.pop_back();
    line += (line.empty() ? "" : " ") + text;
  }
  return line;
}

// Writes the report: csv puts the table in PREFIX+suffix (stdout without a
// prefix) and a summary line beside it; other formats write everything.
void finish(const Report& r, Format format, const Globals& g, const std::string& suffix) {
  const std::string path = g.out.empty() ? "-" : g.out + suffix;
  if (format == Format::Csv && !r.columns.empty()) {
    Report table;
    table.columns = r.columns;
    table.rows = r.rows;
    const std::string summary = summary_line(r);
    emit_report(table, Format::Csv, path);
    (g.out.empty() ? std::cerr : std::cout) << summary << "\n";
    return;
  }
  emit_report(r, format, path);
}

void write_config(const RunConfig& cfg, const Globals& g) {
  if (!g.out.empty()) write_text(g.out + ".config", emit_config(cfg));
}

void add_solve_fields(Report& r, const SolveReport& s) {
  r.add("converged", s.converged)
      .add("iterations", s.iterations)
      .add("final_residual", s.final_residual)
      .add("tol", s.tol)
      .add("apriori_bound_ok", s.apriori_bound_ok)
      .add("monotone_ok", s.monotone_ok)
      .add("worst_monotone_step", s.worst_monotone_step)
      .add("solution_sup", s.solution_sup)
      .add("linear_solves", s.linear_solves)
      .add("linear_iterations", s.linear_iterations)
      .add("moment_defect", s.moment_defect)
      .add("scheme", std::string(to_string(s.scheme)))
      .add("init", std::string(to_string(s.init)))
      .add("nodes", static_cast<std::int64_t>(s.solution.size()));
  if (std::isfinite(s.apriori_bound)) r.add("apriori_bound", s.apriori_bound);
  else r.add("apriori_bound", std::string("overflow"));
  r.add_series("residual_history", s.residual_history);
}

void write_solution(const SolveReport& s, const Globals& g) {
  if (g.out.empty()) return;
  std::ostringstream csv;
  s.solution.write_csv(csv);
  write_text(g.out + ".solution.csv", csv.str());
}

int run_constants(const Globals& g, int dim, double p, std::int64_t mc) {
  const KernelParams params(dim, p, 1.0);
  Report r;
  r.title = "kernel constants";
  r.add("dim", static_cast<std::int64_t>(dim)).add("p", p).add("gamma", params.gamma());
  if (mc > 0) {
    const auto seed = static_cast<std::uint64_t>(g.seed.value_or(1));
    r.add("seed", static_cast<std::int64_t>(seed)).add("mc_samples", mc);
    r.columns = {"kind", "closed_form", "mc_estimate", "std_error"};
    for (MomentKind k : {MomentKind::Gamma, MomentKind::FirstMomentRatio, MomentKind::AxialP, MomentKind::Cross,
                         MomentKind::Radial, MomentKind::ShellFraction}) {
      const McEstimate e = mc_moment_oracle(dim, p, k, mc, seed);
      r.rows.push_back({std::string(to_string(k)), closed_form(dim, p, k), e.estimate, e.std_error});
    }
  } else {
    r.add("seed", std::string("ignored (no randomness without --mc-check)"));
    r.columns = {"kind", "closed_form"};
    for (MomentKind k : {MomentKind::Gamma, MomentKind::FirstMomentRatio, MomentKind::AxialP, MomentKind::Cross,
                         MomentKind::Radial, MomentKind::ShellFraction})
      r.rows.push_back({std::string(to_string(k)), closed_form(dim, p, k)});
  }
  finish(r, pick_format(g, Format::Text), g, ".constants");
  return 0;
}

int run_solve(const Globals& g) {
  const RunConfig cfg = load(g);
  const DppProblem prob = problem_from_config(cfg);
  write_config(cfg, g);
  Report r;
  r.title = "solve";
  r.add("seed", std::string("ignored (the solver is deterministic)"));
  try {
    const SolveReport s = solve(prob);
    add_solve_fields(r, s);
    echo_config(r, cfg);
    write_solution(s, g);
    emit_report(r, pick_format(g, Format::Json), g.out.empty() ? "-" : g.out + ".report");
  } catch (const NotConvergedError& e) {
    add_solve_fields(r, e.partial());
    echo_config(r, cfg);
    write_solution(e.partial(), g);
    emit_report(r, pick_format(g, Format::Json), g.out.empty() ? "-" : g.out + ".report");
    throw;
  }
  return 0;
}

bool needs_solver(const GameConfig& gc) {
  for (const Strategy* s : {&gc.player_one, &gc.player_two})
    if (s->kind == StrategyKind::Optimal || s->kind == StrategyKind::OptimalRecompute) return true;
  return false;
}

int run_simulate(const Globals& g, std::optional<std::int64_t> paths, const std::string& start, bool record) {
  RunConfig cfg = load(g);
  if (paths) cfg.set("game.paths", std::to_string(*paths));
  if (!start.empty()) cfg.set("game.start", start);
  if (record) cfg.set("game.record_paths", "true");
  const GameConfig gc = game_from_config(cfg);
  write_config(cfg, g);
  std::optional<SolveReport> sol;
  if (needs_solver(gc)) sol = solve(gc.problem);
  const GameStats st = play(gc, sol ? &*sol : nullptr);

  Report r;
  r.title = "simulate";
  r.add("seed", static_cast<std::int64_t>(gc.seed))
      .add("paths", st.paths)
      .add("mean_payoff", st.mean_payoff)
      .add("std_error", st.std_error)
      .add("mean_exit_steps", st.mean_exit_steps)
      .add("truncated_paths", st.truncated_paths);
  if (sol) {
    const Discrepancy d = value_vs_solver(gc, st, *sol);
    r.add("solver_value", d.solver_value).add("difference", d.difference).add("ratio_to_se", d.ratio).add("agree",
                                                                                                           d.agree);
  }
  echo_config(r, cfg);
  emit_report(r, pick_format(g, Format::Text), g.out.empty() ? "-" : g.out + ".stats");
  if (gc.record_paths) {
    Report paths_table;
    paths_table.columns = {"path_id", "payoff", "steps"};
    for (const auto& rec : st.records) paths_table.rows.push_back({rec.path, rec.payoff, rec.steps});
    emit_report(paths_table, Format::Csv, g.out.empty() ? "-" : g.out + ".paths.csv");
  }
  return 0;
}

int run_extremal(const Globals& g, std::optional<int> nodes) {
  RunConfig cfg = load(g);
  if (nodes) cfg.set("extremal.nodes", std::to_string(*nodes));
  const DppProblem prob = problem_from_config(cfg);
  const ExtremalParams ep = extremal_from_config(cfg);
  write_config(cfg, g);
  const SolveReport s = solve(prob);
  const auto pts = sample_interior_nodes(s.solution, static_cast<int>(cfg.integer("extremal.nodes")),
                                         static_cast<std::uint64_t>(cfg.integer("seed")));
  const ExtremalReport rep = verify_extremal_inequalities(s.solution, prob, pts, cfg.real("extremal.slack"), ep.samples);

  const int dim = prob.params.dim();
  Report r;
  r.title = "extremal";
  r.add("seed", cfg.integer("seed"))
      .add("nodes", static_cast<std::int64_t>(rep.nodes.size()))
      .add("alpha", rep.params.alpha)
      .add("beta", rep.params.beta)
      .add("slack", rep.slack)
      .add("worst_margin_plus", rep.worst_plus)
      .add("worst_margin_minus", rep.worst_minus)
      .add("ok", rep.ok);
  for (int d = 0; d < dim; ++d) r.columns.push_back("x" + std::to_string(d + 1));
  for (const char* c : {"Lplus", "Lminus", "f", "margin_plus", "margin_minus"}) r.columns.emplace_back(c);
  for (const auto& n : rep.nodes) {
    std::vector<Cell> row;
    for (int d = 0; d < dim; ++d) row.emplace_back(n.x[d]);
    for (double v : {n.lplus, n.lminus, n.f, n.margin_plus, n.margin_minus}) row.emplace_back(v);
    r.rows.push_back(std::move(row));
  }
  finish(r, pick_format(g, Format::Csv), g, ".extremal.csv");
  return rep.ok ? 0 : 3;
}

SmoothFunction test_function(const std::string& name, int dim) {
  if (name == "quadratic") {
    Mat3 a{};
    for (int d = 0; d < dim; ++d) a[d][d] = 1.0;
    return smooth_quadratic(a, Vec{}, 0.0);
  }
  if (name == "linear") return smooth_linear(Vec{1.0, 0.5, 0.25});
  if (name == "cos_x1") return smooth_cos_x1();
  if (name == "radial") return smooth_radial_power(-1.0, dim);
  throw Error(ErrorKind::InvalidArgument, "unknown test function '" + name + "'");
}

Vec parse_point(const std::string& text, int dim, const std::string& what) {
  RunConfig scratch = parse_config("");
  scratch.set("game.start", text);  // reuses the list parser
  const auto l = scratch.list("game.start");
  if (static_cast<int>(l.size()) != dim) throw Error(ErrorKind::RangeError, what + " needs " + std::to_string(dim) + " components");
  return scratch.vec("game.start", dim);
}

int run_expansion(const Globals& g, int dim, double p, std::vector<double> ladder, const std::string& fn,
                  const std::string& mode, const std::string& xs, const std::string& zs) {
  if (ladder.empty()) ladder = {0.2, 0.1, 0.05, 0.025};
  const SmoothFunction u = test_function(fn, dim);
  const Vec x = xs.empty() ? Vec{} : parse_point(xs, dim, "--x");
  Vec z{1.0, 0.0, 0.0};
  if (!zs.empty()) z = normalized(parse_point(zs, dim, "--z"), dim);
  ExpansionReport rep;
  if (mode == "expansion") rep = check_expansion(u, x, z, dim, p, ladder);
  else if (mode == "limit") rep = check_normalized_limit(u, x, dim, p, ladder);
  else if (mode == "midpoint") rep = check_midpoint_expansion(u, x, dim, p, ladder);
  else throw Error(ErrorKind::InvalidArgument, "unknown mode '" + mode + "'");

  Report r;
  r.title = "expansion-check";
  r.add("function", u.name).add("mode", mode).add("dim", static_cast<std::int64_t>(dim)).add("p", p);
  if (std::isfinite(rep.fitted_order)) r.add("fitted_order", rep.fitted_order);
  else r.add("fitted_order", std::string("exact"));
  r.add("seed", std::string("ignored (no randomness)"));
  r.columns = {"eps", "remainder"};
  if (mode == "midpoint") r.columns.push_back("alignment_angle");
  for (std::size_t i = 0; i < rep.eps_ladder.size(); ++i) {
    std::vector<Cell> row{rep.eps_ladder[i], rep.measured_remainders[i]};
    if (mode == "midpoint") row.emplace_back(rep.alignment_angles[i]);
    r.rows.push_back(std::move(row));
  }
  finish(r, pick_format(g, Format::Csv), g, ".expansion.csv");
  return 0;
}

int run_holder(const Globals& g, std::optional<double> gamma_flag) {
  const RunConfig cfg = load(g);
  const DppProblem prob = problem_from_config(cfg);
  write_config(cfg, g);
  std::optional<double> gamma = gamma_flag;
  if (!gamma && cfg.real("holder.gamma") > 0.0) gamma = cfg.real("holder.gamma");
  const double radius = cfg.real("holder.radius") > 0.0 ? cfg.real("holder.radius") : prob.domain.radius;
  const auto ladder = cfg.list("holder.eps_list");
  const HolderLadder h = holder_ladder(prob, ladder, radius, gamma, cfg.real("holder.dx_ratio"),
                                       static_cast<std::uint64_t>(cfg.integer("seed")));
  Report r;
  r.title = "holder";
  r.add("seed", cfg.integer("seed"))
      .add("radius", radius)
      .add("gamma", h.gamma)
      .add("gamma_fitted", h.fitted)
      .add("spread", h.spread)
      .add("bounded", h.bounded);
  r.columns = {"eps", "dx", "gamma", "quotient_sup", "pair_count", "seconds"};
  for (const auto& row : h.rows)
    r.rows.push_back({row.eps, row.dx, row.holder.gamma, row.holder.quotient_sup, row.holder.pair_count, row.seconds});
  echo_config(r, cfg);
  finish(r, pick_format(g, Format::Csv), g, ".holder.csv");
  return 0;
}

int run_convergence(const Globals& g) {
  const RunConfig cfg = load(g);
  const DppProblem prob = problem_from_config(cfg);
  write_config(cfg, g);
  const ConvergenceTable t = convergence_study(prob, cfg.list("convergence.eps_list"), prob.g,
                                               cfg.real("convergence.dx_ratio"));
  Report r;
  r.title = "convergence";
  r.add("seed", std::string("ignored (no randomness)")).add("nonincreasing", t.nonincreasing);
  r.columns = {"eps", "dx", "interior_nodes", "probe_nodes", "sup_error", "iterations", "final_residual", "seconds"};
  for (const auto& row : t.rows)
    r.rows.push_back({row.eps, row.dx, static_cast<std::int64_t>(row.interior_nodes),
                      static_cast<std::int64_t>(row.probe_nodes), row.sup_error, row.iterations, row.final_residual,
                      row.seconds});
  echo_config(r, cfg);
  finish(r, pick_format(g, Format::Csv), g, ".convergence.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tug-of-war with noise: DPP solver, game simulation and analysis checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  long long seed = 1;
  int threads = 1;
  app.add_option("--config", g.config, "flat key = value configuration file");
  app.add_option("--out", g.out, "output prefix (stdout when omitted)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the seed key");
  auto* threads_opt = app.add_option("--threads", threads, "overrides the threads key")->check(CLI::Range(1, 256));
  app.add_option("--format", g.format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));

  auto* constants = app.add_subcommand("constants", "gamma_{N,p} and the kernel moment table");
  int c_dim = 2;
  double c_p = 2.0;
  std::int64_t mc = 0;
  constants->add_option("--dim", c_dim)->check(CLI::Range(1, 8));
  constants->add_option("--p", c_p)->required();
  constants->add_option("--mc-check", mc, "Monte Carlo samples per quantity; columns kind,closed_form,mc_estimate,std_error");

  auto* solve_cmd = app.add_subcommand("solve", "solve the DPP; writes PREFIX.solution.csv and PREFIX.report");

  auto* sim = app.add_subcommand("simulate", "play the game; writes PREFIX.stats and optionally PREFIX.paths.csv (path_id,payoff,steps)");
  std::int64_t s_paths = 0;
  std::string s_start;
  bool s_record = false;
  auto* paths_opt = sim->add_option("--paths", s_paths)->check(CLI::PositiveNumber);
  sim->add_option("--start", s_start, "start point \"x1,...,xN\"");
  sim->add_flag("--record-paths", s_record);

  auto* ext = app.add_subcommand("extremal", "check the extremal inequalities; CSV columns x1..xN,Lplus,Lminus,f,margin_plus,margin_minus");
  int e_nodes = 0;
  auto* nodes_opt = ext->add_option("--nodes", e_nodes)->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("expansion-check", "asymptotic expansion remainders; CSV columns eps,remainder[,alignment_angle]");
  int x_dim = 2;
  double x_p = 1.5;
  std::vector<double> x_ladder;
  std::string x_fn = "cos_x1", x_mode = "expansion", x_point, x_dir;
  exp->add_option("--dim", x_dim)->check(CLI::Range(2, 3));
  exp->add_option("--p", x_p);
  exp->add_option("--eps-list", x_ladder)->delimiter(',');
  exp->add_option("--function", x_fn, "quadratic, linear, cos_x1 or radial")->check(CLI::IsMember({"quadratic", "linear", "cos_x1", "radial"}));
  exp->add_option("--mode", x_mode, "expansion, limit or midpoint")->check(CLI::IsMember({"expansion", "limit", "midpoint"}));
  exp->add_option("--x", x_point, "evaluation point");
  exp->add_option("--z", x_dir, "direction (expansion mode)");

  auto* hold = app.add_subcommand("holder", "Holder quotient across holder.eps_list; CSV columns eps,dx,gamma,quotient_sup,pair_count,seconds");
  double h_gamma = 0.0;
  auto* gamma_opt = hold->add_option("--gamma", h_gamma)->check(CLI::Range(0.0, 1.0));

  auto* conv = app.add_subcommand("convergence", "sup error against the exact solution g over convergence.eps_list; CSV columns eps,dx,interior_nodes,probe_nodes,sup_error,iterations,final_residual,seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*seed_opt) g.seed = seed;
  if (*threads_opt) g.threads = threads;

  try {
    if (*constants) return run_constants(g, c_dim, c_p, mc);
    if (*solve_cmd) return run_solve(g);
    if (*sim) return run_simulate(g, *paths_opt ? std::optional<std::int64_t>(s_paths) : std::nullopt, s_start, s_record);
    if (*ext) return run_extremal(g, *nodes_opt ? std::optional<int>(e_nodes) : std::nullopt);
    if (*exp) return run_expansion(g, x_dim, x_p, x_ladder, x_fn, x_mode, x_point, x_dir);
    if (*hold) return run_holder(g, *gamma_opt ? std::optional<double>(h_gamma) : std::nullopt);
    if (*conv) return run_convergence(g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
