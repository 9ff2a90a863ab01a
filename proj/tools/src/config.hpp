#pragma once

/// @file config.hpp
/// Run configuration for the invlab command line tool. Every report embeds
/// its RunConfig, and a run is reproducible from that echo alone, so the
/// JSON round-trip is strict: unknown keys, wrong types and out-of-range
/// values are all rejected with PreconditionError.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace invlab::cli {

// Operator and density given directly as expressions (see docs/grammar.md).
// Either the full triple (d, A, G, rho) is present, or only rho, in which
// case the coefficient field comes from --example and rho is checked as an
// extra candidate density.
struct InlineSpec {
  int d = 0;
  std::vector<std::string> A; // row-major d*d entries; must be symmetric
  std::vector<std::string> G; // d entries
  std::string rho;

  bool empty() const { return rho.empty() && A.empty() && G.empty() && d == 0; }
  bool full() const { return !A.empty(); }
};

struct RunConfig {
  std::string command;                  // subcommand, set by the CLI
  std::string example;                  // gallery id; may be empty when inline is full
  std::map<std::string, double> params; // example parameter overrides
  InlineSpec inline_spec;

  // check-invariance target: "all" (every density plus every negative
  // control, controls must fail), or a single density index as text.
  std::string measure = "all";
  int density = 0; // density index used by classify / simulate / reproduce

  double tol = 1e-6;        // invariance battery threshold
  std::uint64_t seed = 1;   // stream seed for all Monte Carlo work
  std::int64_t paths = 10000;
  double horizon = 1.0;
  double step = 1.0 / 256.0;
  std::string scheme = "tamed"; // euler | tamed | adaptive
  double r_kill = 50.0;
  std::vector<double> start;    // simulation start; empty -> per-command default
  bool crosscheck = false;      // simulate: compare against the linear-drift oracle
  std::string out;              // output directory; empty -> stdout only

  // Keys explicitly set via file or flags (not serialized); commands use it
  // to fill study-specific defaults without clobbering user choices.
  std::set<std::string> touched;
};

// Overlays the JSON object in `text` onto `base` and validates the result.
RunConfig run_config_from_json(const std::string& text, RunConfig base = {});

// Reads the file at `path` and overlays it. Throws PreconditionError when
// the file cannot be read.
RunConfig load_run_config(const std::string& path, RunConfig base = {});

// Canonical serialization: sorted keys, two-space indent, trailing newline.
std::string run_config_to_json(const RunConfig& config);

// Range/consistency checks shared by both construction paths.
void validate_run_config(const RunConfig& config);

} // namespace invlab::cli
