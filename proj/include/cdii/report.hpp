#pragma once

// JSON and CSV views of solver reports. ordered_json keeps key order fixed by
// construction, so identical inputs serialize to byte-identical files.

#include "cdii/forward.hpp"
#include "cdii/least_gradient.hpp"
#include "cdii/level_sets.hpp"
#include "cdii/stability.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace cdii {

using json = nlohmann::ordered_json;

json to_json(const AdmissibilityReport& r);
json to_json(const CertificateReport& r);
json to_json(const LevelSetStats& s);
json to_json(const WellStructuredEstimate& e);
json to_json(const FitResult& f);
json to_json(const InequalityCheck& c);
json to_json(const StabilityRun& r);
json to_json(const StabilityReport& r);

// 2-space indent, trailing newline.
void write_json(const std::string& path, const json& j);
json read_json(const std::string& path); // InvalidInput on parse errors

// columns: level,component,closed,vertex,x,y
void write_contours_csv(const std::string& path, const std::vector<LevelSet>& sets);
// one row per run, all StabilityRun channels
void write_runs_csv(const std::string& path, const StabilityReport& rep);

} // namespace cdii
