#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qpresp/config.hpp"

namespace qpresp {

using Json = nlohmann::json;

// Coefficient table: one row [k_0..k_{d-1}, n, re, im] per mode (n 1-based).
void write_field_csv(std::ostream& os, const SpectralField& u);
void write_field_csv(const std::string& path, const SpectralField& u);

Json complex_to_json(Complex z);
Json field_to_json(const SpectralField& u);

Json to_json(const HullResidual& r);
Json to_json(const FixedPointResult& r);  // summary; coefficients omitted
Json to_json(const GammaBound& g);
Json to_json(const ResonanceTable& t);
Json to_json(const NonresonanceDiagnostic& d);
Json to_json(const ScanPoint& p);
Json to_json(const std::vector<ScanPoint>& pts);
Json to_json(const CauchyCheck& c);
Json to_json(const ResidualOrderFit& f);
Json to_json(const ContractionEstimate& c);
Json to_json(const ZerothBranch& b);

// Model/context header included in every report.
Json context_summary(const ModelContext& ctx);
// Wraps a payload with schema_version and a report kind tag.
Json report(const std::string& kind, Json payload);

void write_json_file(const std::string& path, const Json& j);

// Expansion persistence; loading validates the model hash and shapes.
Json series_to_json(const LindstedtSeries& s);
LindstedtSeries series_from_json(const Json& j, const ModelContext& ctx);
void save_series(const std::string& path, const LindstedtSeries& s);
LindstedtSeries load_series(const std::string& path, const ModelContext& ctx);

}  // namespace qpresp
