#include "stokern/serialize.hpp"

namespace stokern {

using nlohmann::json;

namespace {

json points_json(const PointMatrix& pts, double prob) {
  json arr = json::array();
  for (int i = 0; i < pts.size(); ++i) {
    auto c = pts.point(i);
    json pj = {{"coords", std::vector<double>(c.begin(), c.end())}};
    if (prob >= 0.0) pj["p"] = prob;
    arr.push_back(std::move(pj));
  }
  return arr;
}

PointMatrix points_from_json(const json& arr, int dim) {
  PointMatrix pts;
  pts.dim = dim;
  for (const auto& pj : arr) {
    std::vector<double> c = pj.at("coords").get<std::vector<double>>();
    pts.push(c);
  }
  return pts;
}

}  // namespace

json to_json(const DeterministicKernel& k) {
  json j = {{"model", "existential"},
            {"dimension", k.points.dim},
            {"points", points_json(k.points, 1.0)},
            {"epsilon", k.epsilon}};
  if (k.degenerate) j["degenerate"] = true;
  if (!k.source_indices.empty()) j["source_indices"] = k.source_indices;
  return j;
}

json to_json(const SubsetKernel& k) {
  json pts = json::array();
  for (int i = 0; i < k.points.size(); ++i) {
    auto c = k.points.point(i);
    pts.push_back(
        {{"coords", std::vector<double>(c.begin(), c.end())}, {"p", k.points.prob(i)}});
  }
  return {{"model", "existential"}, {"dimension", k.points.dimension()},
          {"points", pts},          {"epsilon", k.epsilon},
          {"beta", k.beta},         {"source_indices", k.source_indices},
          {"rounds", k.rounds}};
}

json to_json(const MixtureKernel& k) {
  json sets = json::array();
  for (const auto& e : k.sets) {
    json pts = json::array();
    for (int i = 0; i < e.size(); ++i) {
      auto c = e.point(i);
      pts.push_back(std::vector<double>(c.begin(), c.end()));
    }
    sets.push_back(std::move(pts));
  }
  return {{"kind", "mixture"}, {"method", k.method},   {"dimension", k.dim},
          {"epsilon", k.epsilon}, {"tau", k.tau},      {"seed", k.seed},
          {"sets", sets}};
}

json to_json(const BernoulliKernel& k) {
  return {{"kind", "bernoulli"},
          {"method", k.method},
          {"dimension", k.dim},
          {"epsilon", k.epsilon},
          {"tau", k.tau},
          {"delta", k.delta},
          {"seed", k.seed},
          {"lambda", k.lambda},
          {"sample_prob", k.sample_prob},
          {"anchors", points_json(k.anchors, 1.0)},
          {"points", points_json(k.sampled, k.sample_prob)}};
}

json to_json(const FpowKernel& k) {
  json sets = json::array();
  for (const auto& e : k.sets) {
    json pts = json::array();
    for (int i = 0; i < e.size(); ++i) {
      auto c = e.point(i);
      pts.push_back(std::vector<double>(c.begin(), c.end()));
    }
    sets.push_back(std::move(pts));
  }
  return {{"kind", "fpow"},      {"dimension", k.dim}, {"r", k.r},
          {"epsilon", k.epsilon}, {"beta", k.beta},    {"eps0", k.eps0},
          {"seed", k.seed},       {"sets", sets}};
}

json to_json(const FitResult& r) {
  return {{"center", r.center},
          {"value", r.value},
          {"coreset_size", r.coreset_size},
          {"optimizer_gap", r.optimizer_gap}};
}

MixtureKernel mixture_from_json(const json& j) {
  MixtureKernel k;
  k.dim = j.at("dimension").get<int>();
  k.epsilon = j.value("epsilon", 0.0);
  k.tau = j.value("tau", 0.0);
  k.method = j.value("method", "simple");
  k.seed = j.value("seed", 0ULL);
  for (const auto& sj : j.at("sets")) {
    PointMatrix pts;
    pts.dim = k.dim;
    for (const auto& pj : sj) {
      std::vector<double> c = pj.get<std::vector<double>>();
      pts.push(c);
    }
    k.sets.push_back(std::move(pts));
  }
  return k;
}

BernoulliKernel bernoulli_from_json(const json& j) {
  BernoulliKernel k;
  k.dim = j.at("dimension").get<int>();
  k.epsilon = j.value("epsilon", 0.0);
  k.tau = j.value("tau", 0.0);
  k.delta = j.value("delta", 0.0);
  k.method = j.value("method", "poisson");
  k.seed = j.value("seed", 0ULL);
  k.lambda = j.value("lambda", 0.0);
  k.sample_prob = j.at("sample_prob").get<double>();
  k.anchors = points_from_json(j.at("anchors"), k.dim);
  k.sampled = points_from_json(j.at("points"), k.dim);
  return k;
}

}  // namespace stokern
