#pragma once

#include <cstdint>
#include <string>

#include "stokern/instance.hpp"

namespace stokern {

// Built-in instance families used by the CLI and the test suites.
//   uniform-disk    n points uniform in the unit ball, probability p
//   circle          n points evenly spaced on the unit circle (d=3: spiral
//                   on the sphere), probability p
//   clustered       n points in a few Gaussian clusters, probability p
//   negative-lemma  n/2 points at the origin and n/2 at x = 1, p = 1/n
//   locational-grid n locational points, 2-4 candidate grid locations each
// p <= 0 requests per-point random probabilities in [beta, 1].
Instance make_preset(const std::string& name, int n, int d, double p, double beta,
                     std::uint64_t seed);

}  // namespace stokern
