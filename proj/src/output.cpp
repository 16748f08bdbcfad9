#include "pulsefront/output.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

// JSON has no inf/nan
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,g,h,mass1,mass2,max1,max2\n";
  for (const Record& r : traj.records) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.t, r.g, r.h,
                       r.mass1, r.mass2, r.max1, r.max2);
  }
}

std::size_t write_snapshots(const Trajectory& traj, const std::filesystem::path& dir) {
  std::size_t written = 0;
  for (const Snapshot& s : traj.snapshots) {
    if (s.phase != PulsePhase::PrePulse) continue;
    auto out = open_out(dir / fmt::format("snap_{}.csv", s.period));
    out << "x,u1,u2\n";
    for (std::size_t j = 0; j < s.state.size(); ++j) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", s.state.x(j), s.state.u1[j], s.state.u2[j]);
    }
    ++written;
  }
  return written;
}

void write_periodic_csv(const PeriodicSolution& sol, const std::filesystem::path& path) {
  auto out = open_out(path);
  const bool spatial = sol.x.size() > 1 || sol.kind == PeriodicKind::SpatialPeriodic;
  out << (spatial ? "t,x,U1,U2\n" : "t,U1,U2\n");
  for (std::size_t k = 0; k < sol.time.size(); ++k) {
    for (std::size_t j = 0; j < sol.U1[k].size(); ++j) {
      if (spatial) {
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", sol.time[k], sol.x[j], sol.U1[k][j],
                           sol.U2[k][j]);
      } else {
        out << fmt::format("{:.17g},{:.17g},{:.17g}\n", sol.time[k], sol.U1[k][j], sol.U2[k][j]);
      }
    }
  }
}

void write_eigenfunction_csv(const EigenResult& r, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x,phi,psi\n";
  for (std::size_t j = 0; j < r.x.size(); ++j) {
    const double psi = j < r.psi.size() ? r.psi[j] : 0.0;
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.x[j], r.phi[j], psi);
  }
}

void write_json(const Json& j, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

Json to_json(const AuditReport& a) {
  return {{"frames", a.frames},       {"positivity", a.positivity}, {"bound", a.bound},
          {"pulse", a.pulse},         {"front", a.front},           {"time_order", a.time_order},
          {"violations", a.violations()}};
}

Json to_json(const Verdict& v) {
  const Evidence& e = v.evidence;
  return {{"outcome", to_string(v.outcome)},
          {"horizon_periods", v.horizon},
          {"reason", v.reason},
          {"evidence",
           {{"final_width", num(e.final_width)},
            {"final_sup", num(e.final_sup)},
            {"front_advance", num(e.front_advance)},
            {"core_min", num(e.core_min)},
            {"width_slope", num(e.width_slope)},
            {"log_sup_slope", num(e.log_sup_slope)}}}};
}

Json to_json(const PredictedVerdict& v) {
  return {{"prediction", to_string(v.prediction)}, {"rationale", v.rationale}};
}

Json to_json(const EigenInputs& in) {
  return {{"same_kernels", in.same_kernels}, {"constant", in.constant},
          {"lambda_h0", opt(in.lambda_h0)},  {"lambda_inf", opt(in.lambda_inf)},
          {"lower_inf", opt(in.lower_inf)},  {"upper_inf", opt(in.upper_inf)}};
}

Json to_json(const EigenResult& r) {
  Json j{{"lambda", num(r.lambda)},
         {"method", to_string(r.method)},
         {"residual", num(r.residual)},
         {"grid", {{"cells", r.n}, {"steps", r.steps}}},
         {"iterations", r.iterations},
         {"surrogate", r.surrogate}};
  if (r.method == EigenMethod::ClosedForm) {
    j["closed_form"] = {{"lambda0", num(r.lambda0)}, {"c1", num(r.c1)}, {"c2", num(r.c2)},
                        {"m", num(r.m)},             {"Lambda", num(r.Lambda)}};
  }
  return j;
}

Json to_json(const GeneralizedBracket& b) {
  return {{"lower", num(b.lower)}, {"upper", num(b.upper)}, {"surrogate", num(b.surrogate)},
          {"witness", b.witness}};
}

Json to_json(const VanishingCertificate& c) {
  return {{"h1", num(c.h1)},
          {"lambda", num(c.lambda)},
          {"gamma", num(c.gamma)},
          {"C1", num(c.C1)},
          {"eigenfunction_min", num(c.eig_min)},
          {"smallness_bound", num(c.smallness_bound)},
          {"mu_bound", num(c.mu_bound)},
          {"front_envelope", c.eta_bar}};
}

Json to_json(const ThresholdResult& t) {
  Json probes = Json::array();
  for (const Probe& p : t.probes) {
    probes.push_back({{"mu", num(p.mu)}, {"outcome", to_string(p.outcome)}, {"horizon_periods", p.horizon}});
  }
  return {{"mu_low", num(t.mu_low)},
          {"mu_high", num(t.mu_high)},
          {"analytic_mu_low", opt(t.analytic_mu_low)},
          {"monotone", t.monotone},
          {"undetermined", t.undetermined},
          {"dt", num(t.dt)},
          {"probes", probes}};
}

Json to_json(const PeriodicSolution& s) {
  const char* kind = s.kind == PeriodicKind::SpatialPeriodic ? "spatial"
                     : s.kind == PeriodicKind::OdeLinear     ? "ode-linear"
                                                             : "ode-logistic";
  double sup = 0.0;
  for (const auto& row : s.U1) for (double v : row) sup = std::max(sup, v);
  for (const auto& row : s.U2) for (double v : row) sup = std::max(sup, v);
  Json j{{"kind", kind},
         {"residual", num(s.residual)},
         {"iterations", s.iterations},
         {"nodes", s.x.size()},
         {"samples", s.time.size()},
         {"sup", num(sup)}};
  if (s.seed_eps > 0.0) {
    j["seed"] = {{"eps", num(s.seed_eps)}, {"lambda", num(s.seed_lambda)}};
  }
  return j;
}

Json config_json(const RunConfig& cfg) {
  Json params = Json::object();
  for (const auto& [k, v] : cfg.resolved) params[k] = v;
  Json checks = Json::array();
  for (const auto& h : cfg.hypotheses.checks) {
    checks.push_back({{"name", h.name}, {"passed", h.passed}, {"message", h.message},
                      {"witness", opt(h.witness)}});
  }
  return {{"source", cfg.source.string()},
          {"strict", cfg.strict},
          {"parameters", params},
          {"hypotheses", checks},
          {"warnings", cfg.warnings}};
}

Json trajectory_summary(const Trajectory& traj) {
  Json j{{"periods", traj.periods()},
         {"records", traj.records.size()},
         {"bound", num(traj.bound)},
         {"fixed", traj.fixed}};
  if (!traj.records.empty()) {
    const Record& r = traj.records.back();
    j["final"] = {{"t", num(r.t)},         {"g", num(r.g)},         {"h", num(r.h)},
                  {"mass1", num(r.mass1)}, {"mass2", num(r.mass2)}, {"max1", num(r.max1)},
                  {"max2", num(r.max2)}};
  }
  return j;
}

}  // namespace pulsefront
