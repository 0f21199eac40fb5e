#pragma once

#include <json.hpp>

#include "stokern/expkernel.hpp"
#include "stokern/fpowkernel.hpp"
#include "stokern/quantkernel.hpp"
#include "stokern/shapefit.hpp"

namespace stokern {

// Deterministic kernels reuse the instance schema (all probabilities 1) with
// an added "epsilon" field; stochastic kernels record method, parameters and
// anchors alongside their point sets.

nlohmann::json to_json(const DeterministicKernel& k);
nlohmann::json to_json(const SubsetKernel& k);
nlohmann::json to_json(const MixtureKernel& k);
nlohmann::json to_json(const BernoulliKernel& k);
nlohmann::json to_json(const FpowKernel& k);
nlohmann::json to_json(const FitResult& r);

MixtureKernel mixture_from_json(const nlohmann::json& j);
BernoulliKernel bernoulli_from_json(const nlohmann::json& j);

}  // namespace stokern
