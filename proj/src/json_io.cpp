#include "stokern/json_io.hpp"

#include <cmath>
#include <fstream>

namespace stokern {

using nlohmann::json;

namespace {

double get_finite(const json& j, const char* what) {
  if (!j.is_number()) throw ValidationError(std::string(what) + ": expected a number");
  double x = j.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": NaN/Inf not allowed");
  return x;
}

std::vector<double> get_coords(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw ValidationError("coords: dimension mismatch (expected " + std::to_string(dim) +
                          " coordinates)");
  std::vector<double> c;
  c.reserve(dim);
  for (const auto& x : j) c.push_back(get_finite(x, "coords"));
  return c;
}

}  // namespace

json to_json(const ExistentialSet& set) {
  json pts = json::array();
  for (int i = 0; i < set.size(); ++i) {
    auto c = set.point(i);
    pts.push_back({{"coords", std::vector<double>(c.begin(), c.end())}, {"p", set.prob(i)}});
  }
  return {{"model", "existential"}, {"dimension", set.dimension()}, {"points", pts}};
}

json to_json(const LocationalSet& set) {
  json pts = json::array();
  const int d = set.dimension();
  for (int i = 0; i < set.size(); ++i) {
    const auto& pt = set.point(i);
    json locs = json::array();
    for (int s = 0; s < pt.locations(); ++s) {
      std::vector<double> c(pt.coords.begin() + static_cast<std::size_t>(s) * d,
                            pt.coords.begin() + static_cast<std::size_t>(s + 1) * d);
      locs.push_back({{"coords", c}, {"p", pt.probs[s]}});
    }
    pts.push_back({{"locations", locs}});
  }
  return {{"model", "locational"}, {"dimension", d}, {"points", pts}};
}

json to_json(const Instance& inst) {
  return inst.existential() ? to_json(inst.as_existential()) : to_json(inst.as_locational());
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("instance: expected a JSON object");
  const std::string model = j.value("model", "");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    throw ValidationError("instance: missing integer \"dimension\"");
  const int dim = j["dimension"].get<int>();
  if (dim < 1) throw ValidationError("instance: dimension must be >= 1");
  if (!j.contains("points") || !j["points"].is_array())
    throw ValidationError("instance: missing \"points\" array");

  if (model == "existential") {
    std::vector<double> coords, probs;
    for (const auto& pj : j["points"]) {
      auto c = get_coords(pj.at("coords"), dim);
      coords.insert(coords.end(), c.begin(), c.end());
      probs.push_back(get_finite(pj.at("p"), "p"));
    }
    ExistentialSet set(dim, std::move(coords), std::move(probs));
    validate(set).raise_if_invalid();
    return Instance(std::move(set));
  }
  if (model == "locational") {
    std::vector<LocationDistribution> pts;
    for (const auto& pj : j["points"]) {
      if (!pj.contains("locations") || !pj["locations"].is_array())
        throw ValidationError("locational point: missing \"locations\" array");
      LocationDistribution dist;
      for (const auto& lj : pj["locations"]) {
        auto c = get_coords(lj.at("coords"), dim);
        dist.coords.insert(dist.coords.end(), c.begin(), c.end());
        dist.probs.push_back(get_finite(lj.at("p"), "p"));
      }
      pts.push_back(std::move(dist));
    }
    LocationalSet set(dim, std::move(pts));
    validate(set).raise_if_invalid();
    return Instance(std::move(set));
  }
  throw ValidationError("instance: \"model\" must be \"existential\" or \"locational\"");
}

Instance load_instance(const std::string& path) { return instance_from_json(read_json_file(path)); }

void save_instance(const Instance& inst, const std::string& path) {
  write_json_file(to_json(inst), path);
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace stokern
