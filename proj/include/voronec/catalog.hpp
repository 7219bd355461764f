// Built-in catalog of benchmark systems with parameters, admissibility
// guards, embeddings, default states and expected first integrals.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "voronec/energy.hpp"
#include "voronec/system.hpp"

namespace voronec::systems {

using ParamMap = std::map<std::string, double>;

struct CatalogEntry {
  std::string id;
  std::string summary;
  ParamMap defaults;
};

const std::vector<CatalogEntry>& catalog();
bool has_system(const std::string& id);

/// Builds a validated spec (embedding plus derived energy model) for the
/// given catalog id; unknown keys or out-of-domain parameters throw SpecError.
SystemSpec build(const std::string& id, const ParamMap& params = {});

/// Admissible default initial state.
KinematicState default_state(const std::string& id, const ParamMap& params = {});

/// The integrals the catalog asserts for this system, as evaluable
/// functions; empty when no conservation claim holds.
std::vector<energy::FirstIntegral> expected_integrals(const std::string& id,
                                                      const ParamMap& params = {});

}  // namespace voronec::systems
