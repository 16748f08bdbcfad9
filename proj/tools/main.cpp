// pulsefront command line: simulate, eigen, periodic, classify, threshold, sweep.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <cmath>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pulsefront/classify.hpp"
#include "pulsefront/config.hpp"
#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"
#include "pulsefront/output.hpp"
#include "pulsefront/periodic.hpp"
#include "pulsefront/simulator.hpp"

namespace fs = std::filesystem;
using namespace pulsefront;

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;
constexpr int kAudit = 4;

struct Globals {
  std::string config;
  std::string out;
  bool audit = false;
  bool strict = false;
};

fs::path out_or(const Globals& g, const char* fallback) { return g.out.empty() ? fs::path(fallback) : fs::path(g.out); }

// sibling file: result.json -> result_<tag>.<ext>
fs::path sibling(const fs::path& p, const std::string& tag, const std::string& ext) {
  return p.parent_path() / (p.stem().string() + "_" + tag + ext);
}

int report_audit(const AuditReport& a, bool enforce) {
  if (a.violations() == 0) return kOk;
  fmt::print(stderr, "audit: {} violation(s) (positivity {}, bound {}, pulse {}, front {}, time {})\n",
             a.violations(), a.positivity, a.bound, a.pulse, a.front, a.time_order);
  return enforce ? kAudit : kOk;
}

int cmd_simulate(const Globals& g, const std::vector<double>& fixed) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  const ModelParams& p = cfg.params;
  const Trajectory traj = fixed.empty() ? run_free(p, cfg.sim) : run_fixed(p, fixed[0], fixed[1], cfg.sim);
  const fs::path dir = out_or(g, "out");
  fs::create_directories(dir);
  write_trajectory_csv(traj, dir / "trajectory.csv");
  const std::size_t snaps = write_snapshots(traj, dir);
  const AuditReport audit = audit_trajectory(traj, p.harvest);
  Json summary{{"run", trajectory_summary(traj)},
               {"snapshots", snaps},
               {"verdict", to_json(classify_trajectory(traj, cfg.sim.tolerances))},
               {"audit", to_json(audit)},
               {"config", config_json(cfg)}};
  if (!fixed.empty()) summary["run"]["interval"] = {fixed[0], fixed[1]};
  write_json(summary, dir / "summary.json");
  fmt::print("simulated {} periods, final [g, h] = [{:.6g}, {:.6g}] -> {}\n", traj.periods(),
             traj.records.back().g, traj.records.back().h, dir.string());
  return report_audit(audit, g.audit);
}

EigenProblemSpec spec_from(const RunConfig& cfg) {
  const double h0 = cfg.params.frontier.h0;
  EigenProblemSpec s = make_eigen_spec(cfg.params, cfg.numerics.left(h0), cfg.numerics.right(h0),
                                       cfg.numerics.eigen_n, cfg.numerics.eigen_steps);
  s.tol = cfg.numerics.eigen_tol;
  return s;
}

int cmd_eigen(const Globals& g, const std::string& mode, bool extrapolate) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  EigenProblemSpec spec = spec_from(cfg);
  const fs::path out = out_or(g, "result.json");
  Json j{{"mode", mode}, {"interval", {spec.L1(), spec.L2()}}};

  auto solve = [&](const EigenProblemSpec& s) -> EigenResult {
    if (mode == "lambda0") return lambda0(s.k1, s.length, s.n);
    if (mode == "closed") return closed_form_lambda(s);
    return floquet_lambda(s);
  };

  if (mode == "bracket") {
    j["bracket"] = to_json(generalized_bracket(spec));
    j["lambda"] = j["bracket"]["surrogate"];
  } else if (mode == "sensitivity") {
    const double d = lambda_sensitivity(spec);
    j["sensitivity"] = d;
    j["lambda"] = closed_form_lambda(spec).lambda;
  } else {
    const EigenResult r = solve(spec);
    Json body = to_json(r);
    if (extrapolate) {
      EigenProblemSpec coarse = spec;
      coarse.n = spec.n / 2;
      coarse.steps = std::max<std::size_t>(1, spec.steps / 2);
      const double c = solve(coarse).lambda;
      body["richardson"] = {{"coarse", c}, {"fine", r.lambda}, {"extrapolated", richardson(c, r.lambda)}};
    }
    if (!r.x.empty() && !r.phi.empty()) {
      const fs::path csv = sibling(out, "eigenfunction", ".csv");
      write_eigenfunction_csv(r, csv);
      body["eigenfunction_csv"] = csv.filename().string();
    }
    j.update(body);
  }
  j["config"] = config_json(cfg);
  write_json(j, out);
  fmt::print("lambda = {}\n", format_double(j["lambda"].is_number() ? j["lambda"].get<double>() : NAN));
  return kOk;
}

int cmd_periodic(const Globals& g, const std::string& mode, const std::string& direction) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  const ModelParams& p = cfg.params;
  const fs::path out = out_or(g, "sol.csv");
  Json j{{"mode", mode}};
  PeriodicSolution sol;
  if (mode == "spatial") {
    const double h0 = p.frontier.h0;
    const double L1 = cfg.numerics.left(h0), L2 = cfg.numerics.right(h0);
    const MonotoneOptions opt{cfg.numerics.monotone_tol, cfg.numerics.monotone_max_iter};
    if (direction == "both") {
      sol = monotone_iteration(p, L1, L2, cfg.sim, Direction::FromUpper, opt);
      const PeriodicSolution lower = monotone_iteration(p, L1, L2, cfg.sim, Direction::FromLower, opt);
      j["lower"] = to_json(lower);
      j["limit_distance"] = sol.sup_distance(lower);
      write_periodic_csv(lower, sibling(out, "lower", ".csv"));
    } else {
      sol = monotone_iteration(p, L1, L2, cfg.sim,
                               direction == "lower" ? Direction::FromLower : Direction::FromUpper, opt);
    }
    j["interval"] = {L1, L2};
  } else if (mode == "ode-linear") {
    sol = ode_periodic_linear(p.coeffs, p.harvest);
  } else {
    sol = ode_periodic_logistic(p.coeffs, p.harvest);
  }
  write_periodic_csv(sol, out);
  j["solution"] = to_json(sol);
  j["config"] = config_json(cfg);
  write_json(j, sibling(out, "summary", ".json"));
  fmt::print("periodic orbit residual {} -> {}\n", format_double(sol.residual), out.string());
  return kOk;
}

int cmd_classify(const Globals& g) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  const ModelParams& p = cfg.params;
  SimConfig sim = cfg.sim;
  sim.keep_snapshots = g.audit;
  const Trajectory traj = run_free(p, sim);
  const Verdict v = classify_trajectory(traj, sim.tolerances);
  Json j{{"verdict", to_json(v)}, {"run", trajectory_summary(traj)}};
  try {
    const EigenInputs in = compute_eigen_inputs(p, cfg.numerics.eigen_n, cfg.numerics.eigen_steps);
    j["eigen"] = to_json(in);
    j["prediction"] = to_json(dichotomy_predict(in));
  } catch (const std::exception& e) {
    j["prediction"] = {{"prediction", "undetermined"}, {"rationale", e.what()}};
  }
  try {
    CertificateOptions co{cfg.numerics.eigen_n, cfg.numerics.eigen_steps, cfg.cert_fractions};
    j["certificate"] = to_json(vanishing_certificate(p, co));
  } catch (const NumericalError& e) {
    j["certificate"] = nullptr;
    j["certificate_note"] = e.what();
  }
  int code = kOk;
  if (g.audit) {
    const AuditReport a = audit_trajectory(traj, p.harvest);
    j["audit"] = to_json(a);
    code = report_audit(a, true);
  }
  j["config"] = config_json(cfg);
  write_json(j, out_or(g, "verdict.json"));
  fmt::print("{}: {}\n", to_string(v.outcome), v.reason);
  return code;
}

int cmd_threshold(const Globals& g, double ratio, const std::vector<double>& bracket, std::size_t budget) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  ThresholdOptions opt;
  opt.ratio = ratio;
  opt.lo = bracket[0];
  opt.hi = bracket[1];
  opt.budget = budget;
  opt.sim = cfg.sim;
  opt.certificate = {cfg.numerics.eigen_n, cfg.numerics.eigen_steps, cfg.cert_fractions};
  const ThresholdResult r = mu_threshold_search(cfg.params, opt);
  Json j = to_json(r);
  j["ratio"] = ratio;
  j["bracket"] = {opt.lo, opt.hi};
  j["config"] = config_json(cfg);
  write_json(j, out_or(g, "thr.json"));
  fmt::print("mu in [{:.6g}, {:.6g}], analytic lower bound {}\n", r.mu_low, r.mu_high,
             r.analytic_mu_low ? format_double(*r.analytic_mu_low) : "unavailable");
  return kOk;
}

Json sweep_point(const RunConfig& base, const SweepConfig& sw, double value) {
  RunConfig cfg = base;
  ModelParams& p = cfg.params;
  double L1 = cfg.numerics.left(p.frontier.h0), L2 = cfg.numerics.right(p.frontier.h0);
  switch (sw.parameter) {
    case SweepParameter::Slope:
      p.harvest = with_slope(p.harvest, value);
      break;
    case SweepParameter::Mu:
      p = with_mu(p, value, sw.ratio);
      break;
    case SweepParameter::H0:
      if (!(value > 0.0)) throw ConfigError("h0 must be positive");
      p.frontier.h0 = value;
      p.initial = InitialData::bump(value, p.initial.sup1(), p.initial.sup2());
      L1 = -value;
      L2 = value;
      break;
    case SweepParameter::Length:
      if (!(value > 0.0)) throw ConfigError("length must be positive");
      L1 = -value / 2.0;
      L2 = value / 2.0;
      break;
  }
  Json j{{"parameter", to_string(sw.parameter)}, {"value", value}};
  if (sw.task == "eigen") {
    EigenProblemSpec s = make_eigen_spec(p, L1, L2, cfg.numerics.eigen_n, cfg.numerics.eigen_steps);
    s.tol = cfg.numerics.eigen_tol;
    const EigenResult r = (p.coeffs.is_constant() && p.same_kernels()) ? closed_form_lambda(s) : floquet_lambda(s);
    j["interval"] = {L1, L2};
    j["eigen"] = to_json(r);
    j["lambda"] = r.lambda;
  } else {
    SimConfig sim = cfg.sim;
    sim.keep_snapshots = false;
    const Verdict v = classify_trajectory(run_free(p, sim), sim.tolerances);
    j["verdict"] = to_json(v);
    j["outcome"] = to_string(v.outcome);
  }
  return j;
}

int cmd_sweep(const Globals& g) {
  const RunConfig cfg = parse_config(g.config, g.strict);
  for (const auto& w : cfg.warnings) fmt::print(stderr, "warning: {}\n", w);
  if (!cfg.sweep || cfg.sweep->values.empty()) throw ConfigError("sweep needs a [sweep] section with a nonempty grid");
  const SweepConfig& sw = *cfg.sweep;
  const fs::path dir = out_or(g, "sweep");
  fs::create_directories(dir);

  const std::size_t n = sw.values.size();
  std::vector<Json> rows(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const std::string file = fmt::format("point_{}.json", i);
      Json row{{"index", i}, {"value", sw.values[i]}, {"file", file}};
      try {
        Json point = sweep_point(cfg, sw, sw.values[i]);
        write_json(point, dir / file);
        row["status"] = "ok";
        if (point.contains("lambda")) row["lambda"] = point["lambda"];
        if (point.contains("outcome")) row["outcome"] = point["outcome"];
      } catch (const std::exception& e) {
        row["status"] = "error";
        row["error"] = e.what();
        row["file"] = nullptr;
      }
      rows[i] = std::move(row);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t threads = std::min(sw.threads, n);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  Json manifest{{"parameter", to_string(sw.parameter)}, {"task", sw.task}, {"points", rows},
                {"config", config_json(cfg)}};
  write_json(manifest, dir / "manifest.json");
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r["status"] == "error";
  fmt::print("swept {} point(s), {} failed -> {}\n", n, failed, dir.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulsefront: nonlocal two-stage model with harvesting pulses and free boundaries"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI run config")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output file or directory");
  app.add_flag("--audit", g.audit, "re-check simulator invariants; exit 4 on violation");
  app.add_flag("--strict", g.strict, "treat hypothesis failures as config errors");

  std::vector<double> fixed;
  auto* sim = app.add_subcommand("simulate", "run the model and write trajectory CSVs");
  sim->add_option("--fixed", fixed, "fixed domain L1 L2")->expected(2);

  std::string eigen_mode = "floquet";
  bool extrapolate = false;
  auto* eig = app.add_subcommand("eigen", "principal eigenvalue");
  eig->add_option("--mode", eigen_mode)
      ->check(CLI::IsMember({"lambda0", "closed", "floquet", "bracket", "sensitivity"}));
  eig->add_flag("--richardson", extrapolate, "extrapolate against n/2 cells");

  std::string periodic_mode = "spatial", direction = "upper";
  auto* per = app.add_subcommand("periodic", "positive periodic solution");
  per->add_option("--mode", periodic_mode)->check(CLI::IsMember({"spatial", "ode-linear", "ode-logistic"}));
  per->add_option("--direction", direction)->check(CLI::IsMember({"upper", "lower", "both"}));

  auto* cls = app.add_subcommand("classify", "spreading or vanishing");

  double ratio = 1.0;
  std::vector<double> bracket{0.01, 10.0};
  std::size_t budget = 12;
  auto* thr = app.add_subcommand("threshold", "bisection on total expansion capacity");
  thr->add_option("--ratio", ratio, "mu1 : mu2");
  thr->add_option("--bracket", bracket, "lo hi")->expected(2);
  thr->add_option("--budget", budget, "bisection probes");

  auto* swp = app.add_subcommand("sweep", "grid over H'(0), mu, h0 or L");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (g.config.empty()) {
    fmt::print(stderr, "error: --config is required\n");
    return kConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(g, fixed);
    if (eig->parsed()) return cmd_eigen(g, eigen_mode, extrapolate);
    if (per->parsed()) return cmd_periodic(g, periodic_mode, direction);
    if (cls->parsed()) return cmd_classify(g);
    if (thr->parsed()) return cmd_threshold(g, ratio, bracket, budget);
    if (swp->parsed()) return cmd_sweep(g);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfig;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {} (residual {})\n", e.what(), e.residual());
    return kNumerical;
  }
  return kOk;
}
