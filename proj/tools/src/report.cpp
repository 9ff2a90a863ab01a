#include "report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "invlab/errors.hpp"

namespace invlab::cli {

namespace {

Json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr; // JSON has no inf/nan; null keeps the report parseable
}

} // namespace

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < int(v.size()); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const ResidualReport& report) {
  Json functions = Json::array();
  for (const FunctionResidual& f : report.functions) {
    functions.push_back({{"label", f.label},
                         {"center", to_json(f.center)},
                         {"radius", f.radius},
                         {"residual", f.residual},
                         {"normalizer", f.normalizer},
                         {"relative", finite_or_null(f.relative)},
                         {"quad_error", f.quad_error},
                         {"converged", f.converged},
                         {"pass", f.pass}});
  }
  return {{"functions", functions},
          {"max_relative", finite_or_null(report.max_relative)},
          {"tol", report.tol},
          {"verdict", to_string(report.verdict)}};
}

Json to_json(const Verdict& verdict) {
  Json criteria = Json::array();
  for (const CriterionOutcome& c : verdict.criteria) {
    criteria.push_back({{"name", c.name},
                        {"verdict", to_string(c.verdict)},
                        {"numeric", finite_or_null(c.numeric)},
                        {"note", c.note}});
  }
  return {{"recurrent", to_string(verdict.recurrent)},
          {"conservative_primal", to_string(verdict.conservative_primal)},
          {"conservative_dual", to_string(verdict.conservative_dual)},
          {"finite_mass", to_string(verdict.finite_mass)},
          {"invariant_for_primal", to_string(verdict.invariant_for_primal)},
          {"invariant_for_dual", to_string(verdict.invariant_for_dual)},
          {"unique_invariant_density", to_string(verdict.unique_invariant_density)},
          {"inconsistent", verdict.inconsistent},
          {"criteria", criteria},
          {"evidence", verdict.evidence}};
}

Json to_json(const ExpectedClass& expected) {
  return {{"recurrent", to_string(expected.recurrent)},
          {"conservative_primal", to_string(expected.conservative_primal)},
          {"conservative_dual", to_string(expected.conservative_dual)},
          {"finite_mass", to_string(expected.finite_mass)},
          {"invariant_for_primal", to_string(expected.invariant_for_primal)},
          {"invariant_for_dual", to_string(expected.invariant_for_dual)}};
}

Json to_json(const CoexcessiveReport& report) {
  Json points = Json::array();
  for (const CoexcessivePoint& p : report.points) {
    points.push_back({{"x", to_json(p.x)},
                      {"target", p.target},
                      {"estimate", p.estimate},
                      {"se", p.se},
                      {"pass_upper", p.pass_upper},
                      {"pass_match", p.pass_match}});
  }
  return {{"points", points},
          {"sigma_tol", report.sigma_tol},
          {"upper_verdict", to_string(report.upper_verdict)},
          {"match_verdict", to_string(report.match_verdict)}};
}

Json to_json(const SurvivalReport& report) {
  auto row = [](const SurvivalEstimate& e) {
    return Json{{"r_kill", e.r_kill},
                {"survival", e.p},
                {"se", e.se},
                {"alive", e.alive},
                {"total", e.total}};
  };
  return {{"at_r", row(report.at_r)}, {"at_2r", row(report.at_2r)}};
}

Json to_json(const VolumeTable& table) {
  const char* method = table.method == VolumeMethod::ClosedForm       ? "closed-form"
                       : table.method == VolumeMethod::RadialQuadrature ? "radial-quadrature"
                                                                        : "monte-carlo";
  return {{"r", table.r}, {"mu", table.mu}, {"se", table.se}, {"method", method}};
}

Json ensemble_summary(const EnsembleResult& ensemble) {
  const std::int64_t n = std::int64_t(ensemble.status.size());
  const int d = n > 0 ? int(ensemble.terminal.front().size()) : 0;
  Vec mean = zero_vec(std::max(d, 1));
  double mean_sq = 0.0;
  std::int64_t alive = 0;
  double exit_sum = 0.0;
  std::int64_t exits = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (ensemble.status[std::size_t(i)] == PathStatus::Alive) {
      mean += ensemble.terminal[std::size_t(i)];
      mean_sq += ensemble.terminal[std::size_t(i)].squaredNorm();
      ++alive;
    } else if (ensemble.status[std::size_t(i)] == PathStatus::Exited) {
      exit_sum += ensemble.exit_time[std::size_t(i)];
      ++exits;
    }
  }
  if (alive > 0) {
    mean /= double(alive);
    mean_sq /= double(alive);
  }
  Json j{{"paths", n},
         {"alive", ensemble.alive},
         {"exited", ensemble.exited},
         {"stalled", ensemble.stalled},
         {"survival", n > 0 ? double(ensemble.alive) / double(n) : 0.0},
         {"total_steps", ensemble.total_steps},
         {"seed", ensemble.seed}};
  j["terminal_mean_alive"] = alive > 0 ? to_json(mean) : Json(nullptr);
  j["terminal_mean_square_alive"] = alive > 0 ? Json(finite_or_null(mean_sq)) : Json(nullptr);
  j["mean_exit_time"] = exits > 0 ? Json(exit_sum / double(exits)) : Json(nullptr);
  return j;
}

std::string render_report(const RunConfig& config, const Json& result,
                          const std::string& verdict, double wall_seconds) {
  Json echo = Json::parse(run_config_to_json(config));
  Json report{{"command", config.command},
              {"config", echo},
              {"result", result},
              {"schema_version", kSchemaVersion},
              {"tool_version", kToolVersion},
              {"verdict", verdict},
              {"wall_clock_seconds", wall_seconds}};
  return report.dump(2) + "\n";
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  out.precision(17);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw PreconditionError("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << text;
}

int exit_code_for(const std::string& verdict) {
  if (verdict == "pass") return 0;
  if (verdict == "fail") return 1;
  return 2;
}

} // namespace invlab::cli
