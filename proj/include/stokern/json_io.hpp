#pragma once

#include <string>

#include <json.hpp>

#include "stokern/instance.hpp"

namespace stokern {

// Instance files are JSON:
//   {"model":"existential","dimension":d,"points":[{"coords":[...],"p":0.5},...]}
//   {"model":"locational","dimension":d,
//    "points":[{"locations":[{"coords":[...],"p":0.5},...]},...]}
// Numbers are IEEE doubles; NaN/Inf are rejected on both read and write.
// nlohmann's serializer emits shortest-round-trip doubles, so
// serialize(deserialize(x)) is bit-exact on coordinates.

nlohmann::json to_json(const ExistentialSet& set);
nlohmann::json to_json(const LocationalSet& set);
nlohmann::json to_json(const Instance& inst);

Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace stokern
