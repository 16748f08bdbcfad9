#include "pulsefront/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"kernel", {"family", "sigma", "table", "family2", "sigma2", "table2"}},
      {"coefficients", {"d1", "d2", "b", "a", "m1", "m2", "alpha1", "alpha2", "tau"}},
      {"harvest", {"rule", "c", "m", "a", "r", "b"}},
      {"frontier", {"mu1", "mu2", "h0"}},
      {"initial", {"type", "amp1", "amp2", "path"}},
      {"numerics",
       {"dx", "dt", "horizon", "record_stride", "snapshots", "L1", "L2", "eigen_n", "eigen_steps",
        "eigen_tol", "monotone_tol", "monotone_max_iter"}},
      {"classify",
       {"eps_vanish", "eps_front", "l_spread", "delta", "core_lo", "core_hi", "cert_fractions"}},
      {"sweep", {"parameter", "values", "task", "threads", "ratio"}},
  };
  return s;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::vector<double> parse_list(const std::string& text) {
  std::string t = text;
  for (char& ch : t) {
    if (ch == ',' || ch == ';') ch = ' ';
  }
  std::istringstream in(t);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt_double(v[i]);
  return s;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::vector<std::string>& violations, RunConfig& out)
      : tree_(tree), violations_(violations), out_(out) {}

  std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
    const auto s = tree_.get_child_optional(sec);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return *v;
  }

  double number(const std::string& sec, const std::string& key, double def) {
    double v = def;
    if (auto r = raw(sec, key)) {
      try {
        const auto list = parse_list(*r);
        if (list.size() != 1) throw std::invalid_argument(*r);
        v = list[0];
        if (!std::isfinite(v)) throw std::invalid_argument(*r);
      } catch (const std::exception&) {
        violations_.push_back(fmt::format("{}.{}: '{}' is not a number", sec, key, *r));
      }
    }
    record(sec, key, fmt_double(v));
    return v;
  }

  std::optional<double> maybe_number(const std::string& sec, const std::string& key) {
    if (!raw(sec, key)) {
      record(sec, key, "auto");
      return std::nullopt;
    }
    return number(sec, key, 0.0);
  }

  std::size_t count(const std::string& sec, const std::string& key, std::size_t def) {
    const double v = number(sec, key, static_cast<double>(def));
    if (v < 0.0 || v != std::floor(v)) {
      violations_.push_back(fmt::format("{}.{}: must be a nonnegative integer, got {}", sec, key, v));
      return def;
    }
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& sec, const std::string& key, std::vector<double> def) {
    std::vector<double> v = std::move(def);
    if (auto r = raw(sec, key)) {
      try {
        v = parse_list(*r);
      } catch (const std::exception&) {
        violations_.push_back(fmt::format("{}.{}: '{}' is not a list of numbers", sec, key, *r));
      }
    }
    record(sec, key, join(v));
    return v;
  }

  PeriodicFunction periodic(const std::string& sec, const std::string& key, double def) {
    const std::vector<double> v = list(sec, key, {def});
    if (v.empty()) {
      violations_.push_back(fmt::format("{}.{}: empty", sec, key));
      return {def};
    }
    return v.size() == 1 ? PeriodicFunction(v[0]) : PeriodicFunction(v);
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& def) {
    std::string v = raw(sec, key).value_or(def);
    record(sec, key, v);
    return v;
  }

  bool flag(const std::string& sec, const std::string& key, bool def) {
    const std::string v = text(sec, key, def ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    violations_.push_back(fmt::format("{}.{}: '{}' is not a boolean", sec, key, v));
    return def;
  }

  void record(const std::string& sec, const std::string& key, std::string value) {
    out_.resolved.emplace_back(sec + "." + key, std::move(value));
  }

 private:
  const pt::ptree& tree_;
  std::vector<std::string>& violations_;
  RunConfig& out_;
};

Kernel read_kernel(Reader& r, const std::string& suffix, const Kernel* fallback,
                   const std::filesystem::path& base, std::vector<std::string>& violations) {
  const bool given = r.raw("kernel", "family" + suffix) || r.raw("kernel", "sigma" + suffix) ||
                     r.raw("kernel", "table" + suffix);
  if (fallback && !given) {
    r.record("kernel", "family" + suffix, "same");
    return *fallback;
  }
  const std::string family = r.text("kernel", "family" + suffix, "triangular");
  const double sigma = r.number("kernel", "sigma" + suffix, 1.0);
  const std::string table = r.text("kernel", "table" + suffix, "");
  try {
    switch (kernel_family_from_string(family)) {
      case KernelFamily::Triangular:
        return Kernel::triangular(sigma);
      case KernelFamily::TruncatedGaussian:
        return Kernel::truncated_gaussian(sigma);
      case KernelFamily::Table: {
        if (table.empty()) throw ConfigError("table kernel needs a path");
        std::filesystem::path path(table);
        if (path.is_relative()) path = base / path;
        return Kernel::from_csv(path);
      }
    }
  } catch (const std::exception& e) {
    violations.push_back(fmt::format("kernel.family{}: {}", suffix, e.what()));
  }
  return Kernel::triangular(1.0);
}

HarvestRule read_harvest(Reader& r, std::vector<std::string>& violations) {
  const std::string rule = r.text("harvest", "rule", "linear");
  if (rule == "linear") {
    const double c = r.number("harvest", "c", 0.5);
    return HarvestRule::linear(c);
  }
  if (rule == "beverton-holt") {
    const double m = r.number("harvest", "m", 1.0);
    const double a = r.number("harvest", "a", 2.0);
    return HarvestRule::beverton_holt(m, a);
  }
  if (rule == "ricker") {
    const double rr = r.number("harvest", "r", -0.5);
    const double b = r.number("harvest", "b", 1.0);
    return HarvestRule::ricker(rr, b);
  }
  if (rule == "identity") return HarvestRule::identity();
  violations.push_back(fmt::format("harvest.rule: unknown rule '{}'", rule));
  return HarvestRule::identity();
}

RunConfig parse_tree(const pt::ptree& tree, bool strict, const std::filesystem::path& base) {
  RunConfig cfg;
  cfg.strict = strict;
  std::vector<std::string> violations;

  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      violations.push_back(fmt::format("unknown section [{}]", section));
      continue;
    }
    if (!body.data().empty()) violations.push_back(fmt::format("key '{}' outside any section", section));
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) violations.push_back(fmt::format("unknown key {}.{}", section, key));
    }
  }

  Reader r(tree, violations, cfg);
  ModelParams& p = cfg.params;

  p.k1 = read_kernel(r, "", nullptr, base, violations);
  p.k2 = read_kernel(r, "2", &p.k1, base, violations);

  Coefficients& c = p.coeffs;
  c.d1 = r.number("coefficients", "d1", 1.0);
  c.d2 = r.number("coefficients", "d2", 1.0);
  c.b = r.periodic("coefficients", "b", 1.0);
  c.a = r.periodic("coefficients", "a", 1.0);
  c.m1 = r.periodic("coefficients", "m1", 1.0);
  c.m2 = r.periodic("coefficients", "m2", 1.0);
  c.alpha1 = r.periodic("coefficients", "alpha1", 1.0);
  c.alpha2 = r.periodic("coefficients", "alpha2", 1.0);
  c.tau = r.number("coefficients", "tau", 1.0);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    for (const auto& v : e.violations()) violations.push_back("coefficients: " + v);
    if (e.violations().empty()) violations.push_back(std::string("coefficients: ") + e.what());
  }

  try {
    p.harvest = read_harvest(r, violations);
  } catch (const ConfigError& e) {
    violations.push_back(std::string("harvest: ") + e.what());
  }

  p.frontier.mu1 = r.number("frontier", "mu1", 1.0);
  p.frontier.mu2 = r.number("frontier", "mu2", 1.0);
  p.frontier.h0 = r.number("frontier", "h0", 1.0);
  if (!(p.frontier.h0 > 0.0)) violations.push_back("frontier.h0: must be positive");
  if (p.frontier.mu1 < 0.0 || p.frontier.mu2 < 0.0) violations.push_back("frontier.mu1/mu2: must be nonnegative");

  const std::string type = r.text("initial", "type", "bump");
  if (type == "bump") {
    const double a1 = r.number("initial", "amp1", 0.5);
    const double a2 = r.number("initial", "amp2", 0.5);
    if (a1 < 0.0 || a2 < 0.0) violations.push_back("initial.amp1/amp2: must be nonnegative");
    if (p.frontier.h0 > 0.0) p.initial = InitialData::bump(p.frontier.h0, std::max(a1, 0.0), std::max(a2, 0.0));
  } else if (type == "csv") {
    std::filesystem::path path(r.text("initial", "path", ""));
    if (path.is_relative()) path = base / path;
    try {
      p.initial = InitialData::from_csv(path.string());
      if (std::abs(p.initial.half_length() - p.frontier.h0) > 1e-12 * p.frontier.h0) {
        violations.push_back(fmt::format("initial.path: profile spans half-length {}, expected h0 = {}",
                                         p.initial.half_length(), p.frontier.h0));
      }
    } catch (const std::exception& e) {
      violations.push_back(fmt::format("initial.path: {}", e.what()));
    }
  } else {
    violations.push_back(fmt::format("initial.type: unknown type '{}'", type));
  }

  SimConfig& s = cfg.sim;
  s.dx = r.number("numerics", "dx", s.dx);
  s.dt = r.number("numerics", "dt", s.dt);
  s.horizon = r.count("numerics", "horizon", s.horizon);
  s.record_stride = r.count("numerics", "record_stride", s.record_stride);
  s.keep_snapshots = r.flag("numerics", "snapshots", s.keep_snapshots);
  if (!(s.dx > 0.0)) violations.push_back("numerics.dx: must be positive");
  if (!(s.dt > 0.0)) {
    violations.push_back("numerics.dt: must be positive");
  } else if (c.tau > 0.0) {
    const double ratio = c.tau / s.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      violations.push_back(fmt::format("numerics.dt: tau/dt = {} must be an integer", ratio));
    }
  }
  if (s.record_stride == 0) violations.push_back("numerics.record_stride: must be at least 1");

  NumericsConfig& n = cfg.numerics;
  n.L1 = r.maybe_number("numerics", "L1");
  n.L2 = r.maybe_number("numerics", "L2");
  if (n.L1.has_value() != n.L2.has_value()) violations.push_back("numerics.L1/L2: give both or neither");
  if (n.L1 && n.L2 && !(*n.L1 < *n.L2)) violations.push_back("numerics.L1/L2: need L1 < L2");
  n.eigen_n = r.count("numerics", "eigen_n", n.eigen_n);
  n.eigen_steps = r.count("numerics", "eigen_steps", n.eigen_steps);
  n.eigen_tol = r.number("numerics", "eigen_tol", n.eigen_tol);
  n.monotone_tol = r.number("numerics", "monotone_tol", n.monotone_tol);
  n.monotone_max_iter = r.count("numerics", "monotone_max_iter", n.monotone_max_iter);
  if (n.eigen_n < 8) violations.push_back("numerics.eigen_n: need at least 8 cells");
  if (n.eigen_steps < 1) violations.push_back("numerics.eigen_steps: need at least 1 step");

  ClassifyTolerances& t = s.tolerances;
  t.eps_vanish = r.maybe_number("classify", "eps_vanish");
  t.eps_front = r.number("classify", "eps_front", t.eps_front);
  t.l_spread = r.maybe_number("classify", "l_spread");
  t.delta = r.maybe_number("classify", "delta");
  t.core_lo = r.maybe_number("classify", "core_lo");
  t.core_hi = r.maybe_number("classify", "core_hi");
  cfg.cert_fractions = r.list("classify", "cert_fractions", cfg.cert_fractions);
  for (double f : cfg.cert_fractions) {
    if (!(f > 0.0)) violations.push_back("classify.cert_fractions: entries must be positive");
  }

  if (tree.get_child_optional("sweep")) {
    SweepConfig sw;
    const std::string param = r.text("sweep", "parameter", "slope");
    if (param == "slope") {
      sw.parameter = SweepParameter::Slope;
    } else if (param == "mu") {
      sw.parameter = SweepParameter::Mu;
    } else if (param == "h0") {
      sw.parameter = SweepParameter::H0;
    } else if (param == "length") {
      sw.parameter = SweepParameter::Length;
    } else {
      violations.push_back(fmt::format("sweep.parameter: unknown '{}'", param));
    }
    sw.values = r.list("sweep", "values", {});
    sw.task = r.text("sweep", "task", sw.task);
    sw.threads = r.count("sweep", "threads", sw.threads);
    sw.ratio = r.number("sweep", "ratio", sw.ratio);
    if (sw.values.empty()) violations.push_back("sweep.values: grid is empty");
    if (sw.task != "eigen" && sw.task != "classify") {
      violations.push_back(fmt::format("sweep.task: unknown '{}'", sw.task));
    }
    if (sw.threads == 0) sw.threads = 1;
    cfg.sweep = sw;
  }

  if (violations.empty()) {
    try {
      const Simulator sim(p, s.dx, s.dt);
    } catch (const ConfigError& e) {
      violations.push_back(std::string("numerics: ") + e.what());
    }
  }

  if (violations.empty()) {
    cfg.hypotheses = validate_hypotheses(p);
    for (const auto& h : cfg.hypotheses.checks) {
      if (h.passed) continue;
      std::string msg = fmt::format("hypothesis ({}) fails: {}", h.name, h.message);
      if (h.witness) msg += fmt::format(" (witness {})", *h.witness);
      (strict ? violations : cfg.warnings).push_back(msg);
    }
  }

  if (!violations.empty()) {
    std::string what = fmt::format("{} config violation(s):", violations.size());
    for (const auto& v : violations) what += "\n  " + v;
    throw ConfigError(what, violations);
  }
  return cfg;
}

}  // namespace

RunConfig parse_config_string(const std::string& text, bool strict, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.what()), {e.what()});
  }
  return parse_tree(tree, strict, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg = parse_config_string(buf.str(), strict, path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

HarvestRule with_slope(const HarvestRule& rule, double slope) {
  if (!(slope > 0.0)) throw ConfigError(fmt::format("H'(0) must be positive, got {}", slope));
  return std::visit(
      [slope](const auto& r) -> HarvestRule {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BevertonHoltHarvest>) {
          return HarvestRule::beverton_holt(slope * r.a, r.a);
        } else if constexpr (std::is_same_v<T, RickerHarvest>) {
          return HarvestRule::ricker(std::log(slope), r.b);
        } else {
          return HarvestRule::linear(slope);
        }
      },
      rule.variant());
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Slope:
      return "slope";
    case SweepParameter::Mu:
      return "mu";
    case SweepParameter::H0:
      return "h0";
    case SweepParameter::Length:
      return "length";
  }
  return "?";
}

}  // namespace pulsefront
