// junctionflow <subcommand> --config <path> [--out <dir>]
//
// Exit codes: 0 success, 2 config error, 3 CFL gate failure, 4 audit
// violation, 5 internal invariant breach.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "junctionflow/config.hpp"
#include "junctionflow/correspondence.hpp"
#include "junctionflow/csv.hpp"
#include "junctionflow/diagnostics.hpp"
#include "junctionflow/errors.hpp"
#include "junctionflow/hj_scheme.hpp"
#include "junctionflow/multibranch.hpp"
#include "junctionflow/scl_scheme.hpp"

#ifndef JF_TOOL_VERSION
#define JF_TOOL_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCfl = 3;
constexpr int kExitAudit = 4;
constexpr int kExitInvariant = 5;

json cfl_json(const jf::CflReport& r) {
  return {{"L_H", r.L_H},         {"dx_over_dt", r.ratio},   {"gamma", r.gamma},
          {"monotone_ok", r.monotone_ok}, {"compact_ok", r.compact_ok}, {"pass", r.pass},
          {"dt_max", r.dt_max},   {"message", r.message}};
}

class Run {
 public:
  Run(std::string name, jf::ExperimentConfig cfg, fs::path out)
      : name_(std::move(name)), cfg_(std::move(cfg)), out_(std::move(out)) {
    fs::create_directories(out_);
    manifest_["subcommand"] = name_;
    manifest_["tool_version"] = JF_TOOL_VERSION;
    manifest_["config"] = cfg_.to_json();
    manifest_["seed"] = cfg_.seed;
  }

  const jf::ExperimentConfig& cfg() const { return cfg_; }
  json& manifest() { return manifest_; }

  std::ofstream open(const std::string& file) {
    std::ofstream os(out_ / file);
    if (!os) throw jf::Error("cannot write " + (out_ / file).string());
    manifest_["outputs"].push_back(file);
    return os;
  }

  void write_manifest() {
    std::ofstream os(out_ / "manifest.json");
    os << manifest_.dump(2) << "\n";
  }

 private:
  std::string name_;
  jf::ExperimentConfig cfg_;
  fs::path out_;
  json manifest_;
};

jf::SCLProblem scl_problem(const jf::ExperimentConfig& c) {
  return {c.coupling(), c.initial.density(), c.grid_spec.half_width};
}

jf::HJProblem hj_problem(const jf::ExperimentConfig& c) {
  return {c.coupling(), c.initial.potential(), c.grid_spec.half_width};
}

jf::RefinementSpec refinement(const jf::ExperimentConfig& c) {
  jf::RefinementSpec s;
  s.dx0 = c.converge.dx0.value_or(c.grid_spec.dx);
  s.dt_over_dx = c.converge.dt_over_dx.value_or(c.dt / c.grid_spec.dx);
  s.half_width = c.grid_spec.half_width;
  s.levels = c.converge.levels;
  return s;
}

void require_riemann(const jf::ExperimentConfig& c, const std::string& who) {
  if (c.initial.type == "piecewise-affine")
    throw jf::ConfigError(who + ": needs two-state initial data (initial.type 'riemann' or 'affine-germ')");
}

int cmd_solve_hj(Run& run) {
  const auto& c = run.cfg();
  const jf::Grid1D g = c.grid();
  const jf::HJProblem hp = hj_problem(c);
  const jf::CflReport cfl = jf::check_cfl_hj(g, hp);
  run.manifest()["cfl"] = cfl_json(cfl);
  run.write_manifest();
  const jf::HJTrajectory traj = jf::hj_solve(hp, g, c.stride);
  auto os = run.open("hj.csv");
  jf::write_hj_csv(os, traj);
  run.write_manifest();
  std::cout << "steps=" << g.n_steps << " u(T,0)=" << jf::format_real(traj.junction_values.back()) << "\n";
  return kExitOk;
}

int cmd_solve_scl(Run& run) {
  const auto& c = run.cfg();
  const jf::Grid1D g = c.grid();
  const jf::SCLProblem sp = scl_problem(c);
  const jf::CflReport cfl = jf::check_cfl_scl(g, sp);
  run.manifest()["cfl"] = cfl_json(cfl);
  run.write_manifest();
  const jf::SCLTrajectory traj = jf::scl_solve(sp, g, c.stride);
  {
    auto os = run.open("scl.csv");
    jf::write_scl_csv(os, traj);
  }
  {
    auto os = run.open("traces.csv");
    jf::write_trace_log(os, traj, jf::flux_limiter(sp.coupling));
  }
  run.manifest()["mass_residual"] = traj.mass_residual;
  run.write_manifest();
  std::cout << "steps=" << g.n_steps << " mass_residual=" << jf::format_real(traj.mass_residual) << "\n";
  return kExitOk;
}

int cmd_pair(Run& run) {
  const auto& c = run.cfg();
  const jf::Grid1D g = c.grid();
  const jf::CouplingCondition F = c.coupling();
  const jf::SCLProblem sp{F, {}, c.grid_spec.half_width};
  run.manifest()["cfl"] = cfl_json(jf::check_cfl_scl(g, sp));
  run.write_manifest();
  const jf::PairReport r = jf::run_pair(c.initial.potential(), F, g);
  {
    auto os = run.open("pair.csv");
    jf::CsvWriter w(os, {"max_identity_gap", "relative_identity_gap", "gammaL", "gammaR", "germ_distance",
                         "limiter", "steps", "mass_residual"});
    w.row({r.max_identity_gap, r.relative_identity_gap, r.traces.kL, r.traces.kR, r.germ_distance, r.limiter,
           r.steps, r.mass_residual});
  }
  run.write_manifest();
  std::cout << "max_identity_gap=" << jf::format_real(r.max_identity_gap)
            << " relative_identity_gap=" << jf::format_real(r.relative_identity_gap) << "\n";
  return kExitOk;
}

int cmd_converge(Run& run) {
  const auto& c = run.cfg();
  require_riemann(c, "converge");
  const jf::RefinementSpec spec = refinement(c);
  run.write_manifest();
  const jf::ConvergenceTable t = jf::convergence_study(c.coupling(), c.initial.kL, c.initial.kR, c.T, spec);
  {
    auto os = run.open("convergence.csv");
    jf::write_convergence_csv(os, t);
  }
  run.manifest()["probe_window"] = {t.window_inner, t.window_outer};
  run.manifest()["limiter"] = t.limiter;
  run.write_manifest();
  jf::write_convergence_csv(std::cout, t);
  return kExitOk;
}

int cmd_limiter(Run& run) {
  const auto& c = run.cfg();
  require_riemann(c, "limiter");
  const jf::RefinementSpec spec = refinement(c);
  run.write_manifest();
  const jf::LimiterReport r =
      jf::effective_limiter_experiment(c.coupling(), c.initial.kL, c.initial.kR, c.T, spec);
  {
    auto os = run.open("limiter.csv");
    jf::write_limiter_csv(os, r);
  }
  run.manifest()["A_F0"] = r.A_F0;
  run.manifest()["A_control"] = r.A_control;
  run.write_manifest();
  std::cout << "A_F0=" << jf::format_real(r.A_F0) << " A_control=" << jf::format_real(r.A_control) << "\n";
  jf::write_limiter_csv(std::cout, r);
  return kExitOk;
}

jf::GermPoint parse_query(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw jf::ConfigError("--query expects 'kL,kR', got '" + s + "'");
  try {
    std::size_t n1 = 0, n2 = 0;
    const double a = std::stod(s.substr(0, comma), &n1);
    const double b = std::stod(s.substr(comma + 1), &n2);
    if (n1 != comma || n2 != s.size() - comma - 1) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw jf::ConfigError("--query expects 'kL,kR', got '" + s + "'");
  }
}

int cmd_germ(Run& run, const std::vector<std::string>& cli_queries) {
  const auto& c = run.cfg();
  const jf::CouplingCondition F = c.coupling();
  const jf::Box& box = F.box();
  const double AF0 = jf::flux_limiter(F);
  run.manifest()["A_F0"] = AF0;
  std::vector<jf::GermPoint> qs = c.germ_queries;
  for (const auto& s : cli_queries) qs.push_back(parse_query(s));
  run.manifest()["cli_queries"] = cli_queries;
  run.write_manifest();
  std::ostringstream buf;
  jf::CsvWriter w(buf, {"kL", "kR", "member", "lambda"});
  for (const auto& k : qs) {
    const bool inside = box.contains(k.kL, k.kR, 0.0);
    const bool member = inside && jf::germ_contains(AF0, k, box);
    const bool rh = inside && std::abs(box.left()(k.kL) - box.right()(k.kR)) <= jf::kGermTol;
    w.row({k.kL, k.kR, member, rh ? jf::CsvCell(box.left()(k.kL)) : jf::CsvCell::empty()});
  }
  auto os = run.open("germ.csv");
  os << buf.str();
  run.write_manifest();
  std::cout << "A_F0=" << jf::format_real(AF0) << "\n" << buf.str();
  return kExitOk;
}

int cmd_counterexample(Run& run) {
  const auto& c = run.cfg();
  if (!c.multibranch) throw jf::ConfigError("counterexample: config needs a 'multibranch' section");
  const jf::MultiBranchSpec& mb = *c.multibranch;
  const jf::MultiBranchJunction J = mb.build();
  const double lambda = mb.lambda.value_or(0.5 * mb.A);
  run.write_manifest();
  const jf::Counterexample ce = jf::dissipation_counterexample(J, mb.A, lambda, mb.alpha0);
  std::ostringstream buf;
  jf::CsvWriter w(buf, {"alpha", "role", "theta", "p_prime", "p", "gap"});
  for (std::size_t a = 0; a < J.size(); ++a)
    w.row({a, J.is_incoming(a) ? "incoming" : "outgoing", J.branch(a).theta, ce.pPrime[a], ce.p[a], ce.gap});
  auto os = run.open("counterexample.csv");
  os << buf.str();
  run.manifest()["alpha0_used"] = ce.alpha0;
  run.manifest()["gap"] = ce.gap;
  run.write_manifest();
  std::cout << "gap=" << jf::format_real(ce.gap) << "\n" << buf.str();
  return kExitOk;
}

int cmd_audit(Run& run) {
  const auto& c = run.cfg();
  const jf::Grid1D g = c.grid();
  const jf::SCLProblem sp = scl_problem(c);
  const jf::CflReport cfl = jf::check_cfl_scl(g, sp);
  run.manifest()["cfl"] = cfl_json(cfl);
  run.write_manifest();
  const jf::SCLTrajectory traj = jf::scl_solve(sp, g, 1);
  const jf::Box& box = sp.box();

  struct Row {
    std::string check, side;
    double value, tol;
    bool pass;
  };
  std::vector<Row> rows;

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> UL(box.left().a(), box.left().c());
  std::uniform_real_distribution<double> UR(box.right().a(), box.right().c());
  double worst_entropy = 0.0;
  for (int i = 0; i < c.audit.entropy_samples; ++i) {
    const jf::GermPoint k{UL(rng), UR(rng)};
    worst_entropy = std::max(worst_entropy, jf::entropy_residual(traj, k, c.audit.entropy_tol).worst_violation);
  }
  rows.push_back({"entropy", "both", worst_entropy, c.audit.entropy_tol, worst_entropy <= c.audit.entropy_tol});

  for (const auto side : {jf::BranchSide::left, jf::BranchSide::right}) {
    const std::string sname = side == jf::BranchSide::left ? "left" : "right";
    const int count = side == jf::BranchSide::right ? g.j_max : -g.j_min;
    const int J1 = 2, J2 = count - 1;
    if (J2 <= J1) continue;
    const double ole = jf::oleinik_check(traj, J1, J2, side);
    rows.push_back({"oleinik", sname, ole, c.audit.diagnostic_tol, ole <= c.audit.diagnostic_tol});
    const double ode = jf::discrete_gradient_ode_check(traj, side);
    rows.push_back({"gradient_ode", sname, ode, c.audit.diagnostic_tol, ode <= c.audit.diagnostic_tol});
    bool tv_ok = true;
    double tv_ratio = 0.0;
    for (std::size_t idx = 0; idx + 1 < traj.states.size(); idx += std::max<std::size_t>(1, traj.states.size() / 8)) {
      const double B = std::max(0.0, jf::max_discrete_gradient(traj.states[idx], g, J1, J2, side));
      const jf::TvReport tv = jf::tv_check(traj, idx, J1, J2, B, side);
      tv_ok = tv_ok && tv.pass;
      tv_ratio = std::max(tv_ratio, tv.tv / tv.tv_bound);
      if (tv.has_next && tv.time_bound > 0.0) tv_ratio = std::max(tv_ratio, tv.time_variation / tv.time_bound);
    }
    rows.push_back({"total_variation", sname, tv_ratio, 1.0, tv_ok});
  }

  std::ostringstream buf;
  jf::CsvWriter w(buf, {"check", "side", "value", "tolerance", "pass"});
  bool all = true;
  for (const auto& r : rows) {
    w.row({r.check, r.side, r.value, r.tol, r.pass});
    all = all && r.pass;
  }
  auto os = run.open("audit.csv");
  os << buf.str();
  run.manifest()["audit_pass"] = all;
  run.write_manifest();
  std::cout << buf.str();
  if (!all) {
    std::cerr << "audit violation: a discrete entropy inequality, one-sided Lipschitz (Oleinik) estimate, "
                 "gradient ODE bound or total variation bound exceeded its tolerance\n";
    return kExitAudit;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume and Hamilton-Jacobi solvers for flux-limited junction conditions"};
  app.set_version_flag("--version", JF_TOOL_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> queries;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"solve-hj", "run the Hamilton-Jacobi scheme (hj.csv)"},
      {"solve-scl", "run the conservation-law scheme (scl.csv, traces.csv)"},
      {"pair", "run both schemes and report the discrete identity gap (pair.csv)"},
      {"converge", "L1 refinement study against the Riemann oracle (convergence.csv)"},
      {"limiter", "effective flux limiter of a general coupling (limiter.csv)"},
      {"germ", "germ membership of the configured and --query points (germ.csv)"},
      {"counterexample", "multi-branch dissipation counterexample (counterexample.csv)"},
      {"audit", "entropy, Oleinik, gradient-ODE and TV audits (audit.csv)"}};
  for (const auto& [n, help] : names) {
    CLI::App* sub = app.add_subcommand(n, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    if (n == "germ") sub->add_option("--query", queries, "germ membership query 'kL,kR' (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    Run run(name, jf::parse_config(config_path), out_dir);
    if (name == "solve-hj") return cmd_solve_hj(run);
    if (name == "solve-scl") return cmd_solve_scl(run);
    if (name == "pair") return cmd_pair(run);
    if (name == "converge") return cmd_converge(run);
    if (name == "limiter") return cmd_limiter(run);
    if (name == "germ") return cmd_germ(run, queries);
    if (name == "counterexample") return cmd_counterexample(run);
    return cmd_audit(run);
  } catch (const jf::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return kExitConfig;
  } catch (const jf::CflError& e) {
    std::cerr << "CFL gate failure: " << e.what() << "\n";
    return kExitCfl;
  } catch (const std::exception& e) {
    std::cerr << "invariant breach: " << e.what() << "\n";
    return kExitInvariant;
  }
}
