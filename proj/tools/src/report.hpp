#pragma once

/// @file report.hpp
/// Deterministic report rendering. Reports are canonical JSON: objects keep
/// their keys sorted, numbers use shortest round-trip form, indentation is
/// two spaces and the file ends in a newline. Two runs with identical
/// configs produce byte-identical reports except for wall_clock_seconds.

#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "invlab/criteria.hpp"
#include "invlab/gallery.hpp"
#include "invlab/linalg.hpp"
#include "invlab/sde.hpp"
#include "invlab/semigroup.hpp"
#include "invlab/volume.hpp"
#include "invlab/weak_form.hpp"

namespace invlab::cli {

// nlohmann's map-backed value type keeps object keys sorted, which is what
// makes the dumps canonical.
using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

Json to_json(const Vec& v);
Json to_json(const ResidualReport& report);
Json to_json(const Verdict& verdict);
Json to_json(const ExpectedClass& expected);
Json to_json(const CoexcessiveReport& report);
Json to_json(const SurvivalReport& report);
Json to_json(const VolumeTable& table);

// Ensemble summary: status counts plus alive-path moments (killed and
// stalled paths are excluded from the moments, matching the estimators).
Json ensemble_summary(const EnsembleResult& ensemble);

// Full report envelope; `verdict` is "pass", "fail" or "inconclusive".
std::string render_report(const RunConfig& config, const Json& result,
                          const std::string& verdict, double wall_seconds);

// RFC-4180-ish CSV: header row plus one row per entry, '\n' line ends.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& text);

int exit_code_for(const std::string& verdict);

} // namespace invlab::cli
