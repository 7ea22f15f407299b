#pragma once

// JSON forms of the run metadata shared by frequency and CTM table files.

#include <json.hpp>

#include "ctmlab/space.hpp"

namespace ctmlab::detail {

inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json spec_to_json(const SpaceSpec& spec);
SpaceSpec spec_from_json(const nlohmann::json& j);
nlohmann::json census_to_json(const Census& c);
Census census_from_json(const nlohmann::json& j);

}  // namespace ctmlab::detail
