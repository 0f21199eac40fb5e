#pragma once

#include <cstdint>
#include <variant>

#include "stokern/model.hpp"

namespace stokern {

// Either uncertainty model behind one interface; most operations accept this.
class Instance {
 public:
  Instance() = default;
  Instance(ExistentialSet s) : v_(std::move(s)) {}
  Instance(LocationalSet s) : v_(std::move(s)) {}

  bool existential() const { return std::holds_alternative<ExistentialSet>(v_); }
  const ExistentialSet& as_existential() const { return std::get<ExistentialSet>(v_); }
  const LocationalSet& as_locational() const { return std::get<LocationalSet>(v_); }

  int dimension() const {
    return existential() ? as_existential().dimension() : as_locational().dimension();
  }
  // Number of independent entities (points).
  int size() const { return existential() ? as_existential().size() : as_locational().size(); }
  // Number of distinct candidate locations.
  int total_locations() const {
    return existential() ? as_existential().size() : as_locational().total_locations();
  }
  double min_prob() const {
    return existential() ? as_existential().min_prob() : as_locational().min_prob();
  }

  ValidationReport validate_report() const {
    return existential() ? validate(as_existential()) : validate(as_locational());
  }
  Realization sample(std::uint64_t seed) const {
    return existential() ? sample_realization(as_existential(), seed)
                         : sample_realization(as_locational(), seed);
  }

 private:
  std::variant<ExistentialSet, LocationalSet> v_;
};

}  // namespace stokern
