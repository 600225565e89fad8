#include "ecs/state_io.hpp"

#include <stdexcept>

namespace ecs {

namespace {

nlohmann::json pair(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx unpair(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json toJson(const SuperposedState& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms()) {
    nlohmann::json label = nlohmann::json::array();
    for (auto a : t.label.amplitudes()) label.push_back(pair(a));
    terms.push_back({{"coefficient", pair(t.coefficient)}, {"label", label}});
  }
  return {{"modeCount", s.modeCount()}, {"terms", terms}};
}

nlohmann::json toJson(const MixedState& rho) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : rho.components()) comps.push_back({{"weight", c.weight}, {"state", toJson(c.state)}});
  return {{"modeCount", rho.modeCount()}, {"components", comps}};
}

SuperposedState superposedFromJson(const nlohmann::json& j) {
  const auto modes = j.at("modeCount").get<std::size_t>();
  std::vector<Term> terms;
  for (const auto& t : j.at("terms")) {
    std::vector<cplx> amps;
    for (const auto& a : t.at("label")) amps.push_back(unpair(a));
    terms.push_back({unpair(t.at("coefficient")), CoherentLabel(std::move(amps))});
  }
  return {modes, std::move(terms)};
}

MixedState mixedFromJson(const nlohmann::json& j) {
  const auto modes = j.at("modeCount").get<std::size_t>();
  std::vector<MixedState::Component> comps;
  for (const auto& c : j.at("components")) {
    comps.push_back({c.at("weight").get<double>(), superposedFromJson(c.at("state"))});
  }
  return {modes, std::move(comps)};
}

}  // namespace ecs
