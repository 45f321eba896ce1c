// Machine-readable run reports: JSON records for checks and averages, plus
// CSV and aligned-table renderings.
#pragma once

#include "vlab/virial.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace vlab {

using Json = nlohmann::json;

enum class Format { Json, Csv, Pretty };

Format parse_format(const std::string& name); // "json" | "csv" | "pretty"

Json to_json(const VirialCheck& check);
Json to_json(const AverageReport& report);

struct RunReport {
    Json config;
    std::vector<VirialCheck> checks;
    std::vector<AverageReport> averages;
    Json extra;                        // experiment-specific diagnostics
    std::vector<std::string> failures; // tolerance violations, human-readable
    bool pass = true;
    double wall_ms = 0.0;
    std::string version = "0.1.0";
};

/// Full structured document. Volatile fields (wall time) live under "meta"
/// so reports are byte-identical across runs once "meta" is dropped.
Json report_json(const RunReport& report);

std::string emit(const RunReport& report, Format format);

} // namespace vlab
