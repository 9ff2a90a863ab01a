#pragma once

/// @file gallery.hpp
/// Built-in operator/density examples with closed-form expectations: each case
/// packages a coefficient field, candidate invariant densities (plus controls
/// that must fail the weak-form check), Lyapunov certificates, tuned
/// classifier options and the classification a correct implementation must
/// reproduce. Tests and the CLI both draw from this registry.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "invlab/criteria.hpp"
#include "invlab/fields.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

struct ExpectedClass {
  TriState recurrent = TriState::Unknown;
  TriState finite_mass = TriState::Unknown;
  TriState conservative_primal = TriState::Unknown;
  TriState conservative_dual = TriState::Unknown;
  TriState invariant_for_primal = TriState::Unknown;
  TriState invariant_for_dual = TriState::Unknown;
};

// A Lyapunov certificate bundled with the density its dual (if any) refers to.
struct CaseCertificate {
  LyapunovSpec spec;
  int density = 0;
};

// Preset for the co-excessive fixed-point check: h = densities[numerator] /
// densities[denominator], simulated under the dual drift of the denominator.
struct CoexcessivePreset {
  int numerator = 0;
  int denominator = 0;
  std::vector<Vec> starts;
  std::string note;
};

struct GalleryCase {
  std::string name;
  std::string summary;
  int d = 1;
  std::map<std::string, double> params; // resolved values, defaults filled in
  CoefficientField cf;
  std::vector<DensitySpec> densities;         // must pass the weak-form check
  std::vector<DensitySpec> negative_controls; // must fail it
  std::vector<CaseCertificate> certificates;
  ClassifyOptions classify_options; // shells/volume ranges tuned per case
  ExpectedClass expected;           // for densities[0]
  std::optional<CoexcessivePreset> coexcessive;
};

struct GalleryEntry {
  std::string name;
  std::string summary;
  std::map<std::string, double> defaults;
};

std::vector<GalleryEntry> gallery_catalog();

// Throws PreconditionError for unknown names, unknown parameter keys or
// out-of-range values.
GalleryCase make_example(const std::string& name,
                         const std::map<std::string, double>& params = {});

// Runs the case's Lyapunov certificates, folds the confirmed ones into the
// external evidence, then classifies densities[density_index].
Verdict classify_example(const GalleryCase& ex, int density_index = 0);

} // namespace invlab
