#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "config.hpp"
#include "report.hpp"

#include "invlab/errors.hpp"
#include "invlab/expr.hpp"
#include "invlab/gallery.hpp"
#include "invlab/ou.hpp"
#include "invlab/sde.hpp"
#include "invlab/semigroup.hpp"
#include "invlab/weak_form.hpp"

namespace invlab::cli {
namespace {

// ---------------------------------------------------------------- targets

struct Target {
  std::optional<GalleryCase> ex;
  CoefficientField cf;
  int d = 0;
};

CoefficientField inline_field(const InlineSpec& spec) {
  const int d = spec.d;
  std::vector<Expression> a(std::size_t(d) * std::size_t(d));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) // upper triangle; the lower entries are mirrors
      a[std::size_t(i) * std::size_t(d) + std::size_t(j)] =
          Expression::parse(spec.A[std::size_t(i) * std::size_t(d) + std::size_t(j)]);
  std::vector<Expression> g(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) g[std::size_t(i)] = Expression::parse(spec.G[std::size_t(i)]);

  CoefficientField cf;
  cf.d = d;
  cf.name = "inline";
  cf.description = "coefficients from inline expressions";
  cf.fill_upper = [a, d](const Vec& x, Mat& A) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j)
        A(i, j) = a[std::size_t(i) * std::size_t(d) + std::size_t(j)](x);
  };
  cf.G = [g, d](const Vec& x) -> Vec {
    Vec out = zero_vec(d);
    for (int i = 0; i < d; ++i) out[i] = g[std::size_t(i)](x);
    return out;
  };
  return cf;
}

DensitySpec inline_density(const InlineSpec& spec) {
  return DensitySpec::from_expression(Expression::parse(spec.rho), Finiteness::Unknown,
                                      "inline");
}

Target resolve_target(const RunConfig& cfg) {
  Target t;
  if (cfg.inline_spec.full()) {
    if (!cfg.example.empty())
      throw PreconditionError("config: give either 'example' or a full 'inline' spec, not both");
    t.cf = inline_field(cfg.inline_spec);
    t.d = cfg.inline_spec.d;
    return t;
  }
  t.ex = make_example(cfg.example, cfg.params);
  t.cf = t.ex->cf;
  t.d = t.ex->d;
  return t;
}

Vec start_point(const RunConfig& cfg, int d, const Vec& fallback) {
  if (cfg.start.empty()) return fallback;
  if (int(cfg.start.size()) != d)
    throw PreconditionError("config: 'start' must have exactly d = " + std::to_string(d) +
                            " entries");
  Vec x = zero_vec(d);
  for (int i = 0; i < d; ++i) x[i] = cfg.start[std::size_t(i)];
  return x;
}

SimConfig sim_config(const RunConfig& cfg, const Vec& x0) {
  SimConfig sim;
  sim.x0 = x0;
  sim.horizon = cfg.horizon;
  sim.h = cfg.step;
  sim.scheme = scheme_from_string(cfg.scheme);
  sim.r_kill = cfg.r_kill;
  sim.paths = cfg.paths;
  sim.seed = cfg.seed;
  return sim;
}

// ----------------------------------------------------------- subcommands

struct Outcome {
  Json result;
  std::string verdict; // pass | fail | inconclusive
};

Outcome run_check_invariance(RunConfig& cfg) {
  const Target t = resolve_target(cfg);

  struct Job {
    std::string name;
    const DensitySpec* rho;
    bool must_pass; // negative controls must fail instead
  };
  std::vector<Job> jobs;
  DensitySpec inlined;
  if (!cfg.inline_spec.rho.empty() && !cfg.inline_spec.full()) {
    inlined = inline_density(cfg.inline_spec);
    jobs.push_back({"inline", &inlined, true});
  } else if (cfg.inline_spec.full()) {
    inlined = inline_density(cfg.inline_spec);
    jobs.push_back({"inline", &inlined, true});
  } else if (cfg.measure == "all") {
    for (const DensitySpec& rho : t.ex->densities) jobs.push_back({rho.name, &rho, true});
    for (const DensitySpec& rho : t.ex->negative_controls)
      jobs.push_back({rho.name, &rho, false});
  } else {
    const int idx = std::stoi(cfg.measure);
    if (idx < 0 || idx >= int(t.ex->densities.size()))
      throw PreconditionError("config: 'measure' index out of range");
    jobs.push_back({t.ex->densities[std::size_t(idx)].name,
                    &t.ex->densities[std::size_t(idx)], true});
  }

  const std::vector<TestFunction> battery = make_battery(t.d);
  InvarianceOptions opt;
  opt.tol = cfg.tol;

  Json cases = Json::array();
  bool any_wrong = false, any_open = false;
  for (const Job& job : jobs) {
    const ResidualReport rep = invariance_residual(t.cf, *job.rho, battery, opt);
    const bool ok = job.must_pass ? rep.verdict == CheckVerdict::Pass
                                  : rep.verdict == CheckVerdict::Fail;
    if (rep.verdict == CheckVerdict::Inconclusive)
      any_open = true;
    else if (!ok)
      any_wrong = true;
    Json entry = to_json(rep);
    entry["density"] = job.name;
    entry["role"] = job.must_pass ? "candidate" : "negative-control";
    entry["as_required"] = ok;
    cases.push_back(std::move(entry));
  }

  Outcome out;
  out.result = {{"cases", cases}, {"battery_size", std::int64_t(battery.size())}};
  out.verdict = any_wrong ? "fail" : any_open ? "inconclusive" : "pass";
  return out;
}

Outcome run_classify(RunConfig& cfg) {
  const Target t = resolve_target(cfg);

  Verdict verdict;
  Json expected = nullptr;
  std::string density_name;
  bool compare = false;
  ExpectedClass want;

  if (t.ex) {
    if (cfg.density < 0 || cfg.density >= int(t.ex->densities.size()))
      throw PreconditionError("config: 'density' index out of range");
    density_name = t.ex->densities[std::size_t(cfg.density)].name;
    verdict = classify_example(*t.ex, cfg.density);
    if (cfg.density == 0) { // the recorded expectation is for the lead density
      compare = true;
      want = t.ex->expected;
      expected = to_json(want);
    }
  } else {
    const DensitySpec rho = inline_density(cfg.inline_spec);
    density_name = rho.name;
    verdict = classify(t.cf, rho);
  }

  Outcome out;
  out.result = {{"density", density_name},
                {"computed", to_json(verdict)},
                {"expected", expected}};

  if (verdict.inconsistent) {
    out.verdict = "fail";
    return out;
  }
  if (!compare) {
    out.verdict = "pass";
    return out;
  }
  const std::vector<std::pair<TriState, TriState>> pairs = {
      {want.recurrent, verdict.recurrent},
      {want.finite_mass, verdict.finite_mass},
      {want.conservative_primal, verdict.conservative_primal},
      {want.conservative_dual, verdict.conservative_dual},
      {want.invariant_for_primal, verdict.invariant_for_primal},
      {want.invariant_for_dual, verdict.invariant_for_dual},
  };
  bool mismatch = false, open = false;
  for (const auto& [expect, got] : pairs) {
    if (expect == TriState::Unknown) continue;
    if (got == TriState::Unknown)
      open = true;
    else if (got != expect)
      mismatch = true;
  }
  out.verdict = mismatch ? "fail" : open ? "inconclusive" : "pass";
  return out;
}

Outcome run_simulate(RunConfig& cfg) {
  const Target t = resolve_target(cfg);
  // The oracle crosscheck targets linear-drift fields, where the taming
  // denominator would introduce a visible O(h) shrinkage; plain Euler is
  // unbiased enough there, so prefer it unless a scheme was requested.
  if (cfg.crosscheck && !cfg.touched.count("scheme")) cfg.scheme = "euler";
  const SimConfig sim = sim_config(cfg, start_point(cfg, t.d, zero_vec(t.d)));
  const EnsembleResult ensemble = simulate(t.cf, sim);

  Outcome out;
  out.result = {{"ensemble", ensemble_summary(ensemble)}};
  out.verdict = ensemble.stalled > 0 ? "inconclusive" : "pass";

  if (cfg.crosscheck) {
    if (!t.ex || (t.ex->name != "ou" && t.ex->name != "brownian"))
      throw PreconditionError(
          "config: --crosscheck needs a linear-drift example (ou or brownian)");
    OUSpec spec;
    spec.d = t.d;
    spec.Q = Mat(0.5 * t.cf.A(zero_vec(t.d)));
    spec.B = Mat::Zero(t.d, t.d);
    if (t.ex->name == "ou") spec.B = Mat(-Mat::Identity(t.d, t.d));
    const ScalarField f = [](const Vec& y) { return std::exp(-y.squaredNorm()); };
    const MCEstimate estimate = estimate_Ptf(t.cf, f, sim);
    const double oracle = ou_expectation_gaussian(spec, 1.0, sim.x0, sim.horizon);
    const double z = estimate.se > 0 ? (estimate.value - oracle) / estimate.se : 0.0;
    const bool ok = std::abs(estimate.value - oracle) <= 3.0 * estimate.se;
    out.result["crosscheck"] = {{"observable", "exp(-norm2(x))"},
                                {"t", sim.horizon},
                                {"estimate", estimate.value},
                                {"se", estimate.se},
                                {"oracle", oracle},
                                {"z", z},
                                {"pass", ok}};
    if (!ok)
      out.verdict = "fail";
    else if (out.verdict == "pass" && estimate.stalled > 0)
      out.verdict = "inconclusive";
  }

  if (!cfg.out.empty()) {
    std::vector<std::vector<double>> rows;
    const std::int64_t n = std::int64_t(ensemble.status.size());
    for (std::int64_t i = 0; i < n; ++i) {
      std::vector<double> row{double(i), double(int(ensemble.status[std::size_t(i)])),
                              ensemble.exit_time[std::size_t(i)]};
      const Vec& x = ensemble.terminal[std::size_t(i)];
      for (int k = 0; k < t.d; ++k) row.push_back(x[k]);
      rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"path", "status", "exit_time"};
    for (int k = 1; k <= t.d; ++k) header.push_back("x" + std::to_string(k));
    const std::string path = cfg.out + "/terminals.csv";
    write_text_file(path, csv_table(header, rows));
    out.result["artifacts"] = Json::array({path});
  }
  return out;
}

Outcome run_reproduce(RunConfig& cfg) {
  const Target t = resolve_target(cfg);
  if (!t.ex)
    throw PreconditionError("config: reproduce needs a gallery example, not an inline spec");
  const GalleryCase& ex = *t.ex;

  Outcome out;
  std::vector<std::string> artifacts;

  if (ex.coexcessive) {
    // Fixed-point study: shorter default horizon and a finer default step
    // keep the integrator bias well inside the Monte Carlo noise.
    if (!cfg.touched.count("horizon")) cfg.horizon = 0.25;
    if (!cfg.touched.count("step")) cfg.step = 1.0 / 1024.0;
    const CoexcessivePreset& preset = *ex.coexcessive;
    const SimConfig base = sim_config(cfg, zero_vec(ex.d));
    const CoexcessiveReport rep =
        coexcessive_check(ex.cf, ex.densities[std::size_t(preset.numerator)],
                          ex.densities[std::size_t(preset.denominator)], preset.starts, base);
    out.result = {{"study", "coexcessive"}, {"note", preset.note}, {"table", to_json(rep)}};
    if (rep.upper_verdict == CheckVerdict::Fail || rep.match_verdict == CheckVerdict::Fail)
      out.verdict = "fail";
    else if (rep.upper_verdict == CheckVerdict::Pass &&
             rep.match_verdict == CheckVerdict::Pass)
      out.verdict = "pass";
    else
      out.verdict = "inconclusive";
    if (!cfg.out.empty()) {
      std::vector<std::vector<double>> rows;
      for (const CoexcessivePoint& p : rep.points)
        rows.push_back({p.x[0], p.target, p.estimate, p.se, double(p.pass_upper),
                        double(p.pass_match)});
      const std::string path = cfg.out + "/coexcessive.csv";
      write_text_file(path, csv_table({"x1", "target", "estimate", "se", "pass_upper",
                                       "pass_match"},
                                      rows));
      artifacts.push_back(path);
    }
  } else if (ex.name == "exp-quadratic-two-finite") {
    // Explosion study: the fraction of paths hitting the kill radius must be
    // positive and must persist when the radius is doubled.
    if (!cfg.touched.count("r_kill")) cfg.r_kill = 10.0;
    Vec fallback = zero_vec(ex.d);
    fallback[0] = 2.0;
    const SimConfig sim = sim_config(cfg, start_point(cfg, ex.d, fallback));
    const SurvivalReport rep = survival_probability(ex.cf, sim);
    out.result = {{"study", "explosion"}, {"survival", to_json(rep)}};
    const bool exits_near = rep.at_r.alive < rep.at_r.total;
    const bool exits_far = rep.at_2r.alive < rep.at_2r.total;
    out.verdict = exits_near && exits_far ? "pass" : "fail";
    if (!cfg.out.empty()) {
      const std::string path = cfg.out + "/survival.csv";
      write_text_file(path, csv_table({"r_kill", "survival", "se", "alive", "total"},
                                      {{rep.at_r.r_kill, rep.at_r.p, rep.at_r.se,
                                        double(rep.at_r.alive), double(rep.at_r.total)},
                                       {rep.at_2r.r_kill, rep.at_2r.p, rep.at_2r.se,
                                        double(rep.at_2r.alive), double(rep.at_2r.total)}}));
      artifacts.push_back(path);
    }
  } else {
    throw PreconditionError("example '" + ex.name +
                            "' has no bundled study; supported: "
                            "constant-drift-two-measures, dual-nonconservative, "
                            "exp-quadratic-two-finite");
  }

  if (!artifacts.empty()) out.result["artifacts"] = artifacts;
  return out;
}

Outcome run_list_examples(RunConfig&) {
  Json rows = Json::array();
  for (const GalleryEntry& entry : gallery_catalog()) {
    Json defaults = Json::object();
    for (const auto& [k, v] : entry.defaults) defaults[k] = v;
    rows.push_back({{"name", entry.name}, {"summary", entry.summary}, {"defaults", defaults}});
  }
  return {{{"examples", rows}}, "pass"};
}

// ------------------------------------------------------------------ driver

int run(RunConfig cfg) {
  const auto started = std::chrono::steady_clock::now();
  Outcome out;
  if (cfg.command == "check-invariance")
    out = run_check_invariance(cfg);
  else if (cfg.command == "classify")
    out = run_classify(cfg);
  else if (cfg.command == "simulate")
    out = run_simulate(cfg);
  else if (cfg.command == "reproduce")
    out = run_reproduce(cfg);
  else if (cfg.command == "list-examples")
    out = run_list_examples(cfg);
  else
    throw PreconditionError("config: unknown command '" + cfg.command + "'");

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const std::string text = render_report(cfg, out.result, out.verdict, wall);
  std::cout << text;
  if (!cfg.out.empty()) write_text_file(cfg.out + "/" + cfg.command + ".json", text);
  return exit_code_for(out.verdict);
}

struct Flags {
  std::string config_path, example, measure, scheme, out;
  std::vector<std::string> params;
  int density = 0;
  double tol = 0, horizon = 0, step = 0, r_kill = 0;
  std::uint64_t seed = 0;
  std::int64_t paths = 0;
  std::vector<double> start;
  bool crosscheck = false;
};

void add_common_options(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file; explicit flags override it");
  sub->add_option("--example", f.example, "gallery example id (see list-examples)");
  sub->add_option("--param", f.params, "example parameter override k=v (repeatable)");
  sub->add_option("--measure", f.measure,
                  "check-invariance target: all, or a density index");
  sub->add_option("--density", f.density, "density index (classify)");
  sub->add_option("--tol", f.tol, "invariance battery relative-residual threshold");
  sub->add_option("--seed", f.seed, "stream seed for Monte Carlo work");
  sub->add_option("--paths", f.paths, "Monte Carlo path count");
  sub->add_option("--horizon", f.horizon, "simulation time horizon");
  sub->add_option("--step", f.step, "base time step");
  sub->add_option("--scheme", f.scheme, "stepping scheme: euler, tamed or adaptive");
  sub->add_option("--r-kill", f.r_kill, "kill radius");
  sub->add_option("--start", f.start, "start point coordinates");
  sub->add_flag("--crosscheck", f.crosscheck,
                "simulate: compare against the linear-drift closed form");
  sub->add_option("--out", f.out, "directory for the report and CSV artifacts");
}

RunConfig assemble(const CLI::App* sub, const Flags& f, const std::string& command) {
  RunConfig cfg;
  if (sub->count("--config")) cfg = load_run_config(f.config_path, std::move(cfg));
  cfg.command = command;

  auto touch = [&cfg](const char* key) { cfg.touched.insert(key); };
  if (sub->count("--example")) cfg.example = f.example, touch("example");
  if (sub->count("--measure")) cfg.measure = f.measure, touch("measure");
  if (sub->count("--density")) cfg.density = f.density, touch("density");
  if (sub->count("--tol")) cfg.tol = f.tol, touch("tol");
  if (sub->count("--seed")) cfg.seed = f.seed, touch("seed");
  if (sub->count("--paths")) cfg.paths = f.paths, touch("paths");
  if (sub->count("--horizon")) cfg.horizon = f.horizon, touch("horizon");
  if (sub->count("--step")) cfg.step = f.step, touch("step");
  if (sub->count("--scheme")) cfg.scheme = f.scheme, touch("scheme");
  if (sub->count("--r-kill")) cfg.r_kill = f.r_kill, touch("r_kill");
  if (sub->count("--start")) cfg.start = f.start, touch("start");
  if (sub->count("--crosscheck")) cfg.crosscheck = f.crosscheck, touch("crosscheck");
  if (sub->count("--out")) cfg.out = f.out, touch("out");
  for (const std::string& kv : f.params) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw PreconditionError("config: --param expects k=v, got '" + kv + "'");
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(kv.substr(eq + 1), &used);
    } catch (const std::exception&) {
      throw PreconditionError("config: --param value in '" + kv + "' is not a number");
    }
    if (used != kv.size() - eq - 1)
      throw PreconditionError("config: --param value in '" + kv + "' is not a number");
    cfg.params[kv.substr(0, eq)] = value;
    touch("params");
  }
  validate_run_config(cfg);
  return cfg;
}

} // namespace
} // namespace invlab::cli

int main(int argc, char** argv) {
  using namespace invlab::cli;

  CLI::App app{"invlab: a laboratory for second-order operators "
               "L = 1/2 tr(A D^2) + <G, grad>: certify invariant densities by "
               "weak-form quadrature, classify the associated semigroups and "
               "validate them against Monte Carlo simulation"};
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const char* name : {"check-invariance", "classify", "simulate", "reproduce",
                           "list-examples"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    add_common_options(sub, flags);
    subs.emplace_back(name, sub);
  }
  subs[0].second->description("run the invariance residual battery; exit 0 pass, 1 fail, "
                              "2 inconclusive, 3 config error");
  subs[1].second->description("classify recurrence/transience/conservativeness");
  subs[2].second->description("run a path ensemble and summarize it");
  subs[3].second->description("re-run an example's bundled validation study");
  subs[4].second->description("list registered examples and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3; // help/version exit 0, any parse problem is a config error
  }

  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) return run(assemble(sub, flags, name));
    std::cerr << "error: no subcommand\n";
    return 3;
  } catch (const invlab::ParseError& e) {
    std::cerr << "error: " << e.what() << " (line " << e.line << ", column " << e.column
              << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
