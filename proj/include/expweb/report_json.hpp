#pragma once

#include <string>

#include <json.hpp>

#include "expweb/dynamics.hpp"
#include "expweb/estimates.hpp"
#include "expweb/geometry.hpp"
#include "expweb/mcmullen.hpp"
#include "expweb/spiderweb.hpp"
#include "expweb/tower.hpp"

namespace expweb {

using json = nlohmann::ordered_json;

// Complex numbers serialize as [re, im].
json complex_json(const cplx& z);
cplx complex_from_json(const json& j);

void to_json(json& j, const TowerReal& t);
void to_json(json& j, const InequalityResult& r);
void to_json(json& j, const EstimateReport& r);
void to_json(json& j, const ClosedPolyline& p);
void to_json(json& j, const ParamCheck& c);
void to_json(json& j, const RefinementParams& p);
void to_json(json& j, const BoxId& b);
void to_json(json& j, const SurvivalReport& r);
void to_json(json& j, const AreaBound& a);
void to_json(json& j, const Classification& c);
void to_json(json& j, const EpsilonPrime& e);
void to_json(json& j, const WebParams& p);
void to_json(json& j, const InclusionResult& r);
void to_json(json& j, const WebStepReport& r);
void to_json(json& j, const WebCertificate& c);
void to_json(json& j, const ConformalityResult& c);
void to_json(json& j, const DistortionEstimate& d);
void to_json(json& j, const GrowthCheck& g);

// Sidecar for a rendered grid: window, resolution, params and label histogram.
json grid_sidecar(const LabelGrid& grid, const GridParams& params);

void write_json(const std::string& path, const json& j);

}  // namespace expweb
