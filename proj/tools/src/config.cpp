#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "invlab/errors.hpp"
#include "invlab/linalg.hpp"

namespace invlab::cli {

namespace {

using Json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw PreconditionError("config: " + what); }

double as_number(const Json& j, const std::string& key) {
  if (!j.is_number()) bad("'" + key + "' must be a number");
  return j.get<double>();
}

std::string as_string(const Json& j, const std::string& key) {
  if (!j.is_string()) bad("'" + key + "' must be a string");
  return j.get<std::string>();
}

std::int64_t as_count(const Json& j, const std::string& key) {
  const double v = as_number(j, key);
  if (v < 0 || v != std::floor(v)) bad("'" + key + "' must be a non-negative integer");
  return std::int64_t(v);
}

InlineSpec parse_inline(const Json& j) {
  if (!j.is_object()) bad("'inline' must be an object");
  InlineSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "d") {
      spec.d = int(as_count(value, "inline.d"));
    } else if (key == "A" || key == "G") {
      if (!value.is_array()) bad("'inline." + key + "' must be an array of expressions");
      std::vector<std::string> entries;
      for (const auto& e : value) entries.push_back(as_string(e, "inline." + key + " entry"));
      (key == "A" ? spec.A : spec.G) = std::move(entries);
    } else if (key == "rho") {
      spec.rho = as_string(value, "inline.rho");
    } else {
      bad("unknown key 'inline." + key + "'");
    }
  }
  return spec;
}

Json inline_to_json(const InlineSpec& spec) {
  Json j = Json::object();
  if (spec.d > 0) j["d"] = spec.d;
  if (!spec.A.empty()) j["A"] = spec.A;
  if (!spec.G.empty()) j["G"] = spec.G;
  if (!spec.rho.empty()) j["rho"] = spec.rho;
  return j;
}

} // namespace

RunConfig run_config_from_json(const std::string& text, RunConfig base) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  for (const auto& [key, value] : j.items()) {
    base.touched.insert(key);
    if (key == "command") {
      base.command = as_string(value, key);
    } else if (key == "example") {
      base.example = as_string(value, key);
    } else if (key == "params") {
      if (!value.is_object()) bad("'params' must be an object of numbers");
      for (const auto& [k, v] : value.items()) base.params[k] = as_number(v, "params." + k);
    } else if (key == "inline") {
      base.inline_spec = parse_inline(value);
    } else if (key == "measure") {
      base.measure = as_string(value, key);
    } else if (key == "density") {
      base.density = int(as_count(value, key));
    } else if (key == "tol") {
      base.tol = as_number(value, key);
    } else if (key == "seed") {
      base.seed = std::uint64_t(as_count(value, key));
    } else if (key == "paths") {
      base.paths = as_count(value, key);
    } else if (key == "horizon") {
      base.horizon = as_number(value, key);
    } else if (key == "step") {
      base.step = as_number(value, key);
    } else if (key == "scheme") {
      base.scheme = as_string(value, key);
    } else if (key == "r_kill") {
      base.r_kill = as_number(value, key);
    } else if (key == "start") {
      if (!value.is_array()) bad("'start' must be an array of numbers");
      base.start.clear();
      for (const auto& e : value) base.start.push_back(as_number(e, "start entry"));
    } else if (key == "crosscheck") {
      if (!value.is_boolean()) bad("'crosscheck' must be a boolean");
      base.crosscheck = value.get<bool>();
    } else if (key == "out") {
      base.out = as_string(value, key);
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  validate_run_config(base);
  return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) bad("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return run_config_from_json(text.str(), std::move(base));
}

std::string run_config_to_json(const RunConfig& config) {
  Json j;
  j["command"] = config.command;
  j["example"] = config.example;
  j["params"] = Json::object();
  for (const auto& [k, v] : config.params) j["params"][k] = v;
  if (!config.inline_spec.empty()) j["inline"] = inline_to_json(config.inline_spec);
  j["measure"] = config.measure;
  j["density"] = config.density;
  j["tol"] = config.tol;
  j["seed"] = config.seed;
  j["paths"] = config.paths;
  j["horizon"] = config.horizon;
  j["step"] = config.step;
  j["scheme"] = config.scheme;
  j["r_kill"] = config.r_kill;
  j["start"] = config.start;
  j["crosscheck"] = config.crosscheck;
  j["out"] = config.out;
  return j.dump(2) + "\n";
}

void validate_run_config(const RunConfig& config) {
  if (!(config.tol > 0)) bad("'tol' must be positive");
  if (config.paths < 1) bad("'paths' must be at least 1");
  if (!(config.horizon > 0)) bad("'horizon' must be positive");
  if (!(config.step > 0)) bad("'step' must be positive");
  if (!(config.r_kill > 0)) bad("'r_kill' must be positive");
  if (config.density < 0) bad("'density' must be non-negative");
  if (config.scheme != "euler" && config.scheme != "tamed" && config.scheme != "adaptive")
    bad("'scheme' must be euler, tamed or adaptive");
  if (config.measure != "all") {
    for (char c : config.measure)
      if (!std::isdigit(static_cast<unsigned char>(c)))
        bad("'measure' must be \"all\" or a density index");
    if (config.measure.empty()) bad("'measure' must be \"all\" or a density index");
  }

  const InlineSpec& spec = config.inline_spec;
  if (spec.empty()) {
    if (config.example.empty() && config.command != "list-examples")
      bad("either 'example' or 'inline' is required");
    return;
  }
  if (spec.rho.empty()) bad("'inline.rho' is required when 'inline' is present");
  if (spec.full()) {
    if (spec.d < 1 || spec.d > kMaxDim)
      bad("'inline.d' must be in [1, " + std::to_string(kMaxDim) + "]");
    if (int(spec.A.size()) != spec.d * spec.d)
      bad("'inline.A' must have d*d row-major entries");
    if (int(spec.G.size()) != spec.d) bad("'inline.G' must have d entries");
  } else {
    if (spec.d != 0 || !spec.G.empty())
      bad("'inline' must give all of d, A, G or only rho");
    if (config.example.empty()) bad("'inline.rho' alone needs an 'example' operator");
  }
}

} // namespace invlab::cli
