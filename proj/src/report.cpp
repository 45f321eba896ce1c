#include "vlab/report.hpp"

#include "vlab/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace vlab {

Format parse_format(const std::string& name) {
    if (name == "json") return Format::Json;
    if (name == "csv") return Format::Csv;
    if (name == "pretty") return Format::Pretty;
    throw ConfigError("unknown format \"" + name + "\" (json|csv|pretty)");
}

Json to_json(const VirialCheck& c) {
    Json j;
    j["identity"] = c.identity;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["residual"] = c.residual;
    j["relative_residual"] = c.relative_residual;
    j["window"] = {{"t1", c.window.t1}, {"t2", c.window.t2}};
    j["system"] = c.system;
    j["params"] = c.params;
    return j;
}

Json to_json(const AverageReport& r) {
    Json j;
    j["mean"] = r.mean;
    j["window"] = {{"t1", r.window.t1}, {"t2", r.window.t2}};
    j["n_samples"] = r.n_samples;
    if (r.boundary_term) j["boundary_term"] = *r.boundary_term;
    return j;
}

Json report_json(const RunReport& report) {
    Json j;
    j["config"] = report.config;
    j["checks"] = Json::array();
    for (const auto& c : report.checks)
        j["checks"].push_back(to_json(c));
    j["averages"] = Json::array();
    for (const auto& a : report.averages)
        j["averages"].push_back(to_json(a));
    if (!report.extra.is_null()) j["extra"] = report.extra;
    j["failures"] = report.failures;
    j["pass"] = report.pass;
    j["meta"] = {{"tool", "virial-lab"},
                 {"version", report.version},
                 {"wall_ms", report.wall_ms}};
    return j;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string emit_csv(const RunReport& report) {
    std::ostringstream os;
    os << "identity,lhs,rhs,residual,relative_residual\n";
    for (const auto& c : report.checks)
        os << c.identity << ',' << fmt_double(c.lhs) << ',' << fmt_double(c.rhs)
           << ',' << fmt_double(c.residual) << ','
           << fmt_double(c.relative_residual) << '\n';
    return os.str();
}

std::string emit_pretty(const RunReport& report) {
    std::ostringstream os;
    std::size_t name_w = 8;
    for (const auto& c : report.checks)
        name_w = std::max(name_w, c.identity.size());
    os << "identity";
    os << std::string(name_w - 8, ' ');
    os << "  lhs             rhs             residual\n";
    for (const auto& c : report.checks) {
        os << c.identity << std::string(name_w - c.identity.size(), ' ');
        char buf[80];
        std::snprintf(buf, sizeof buf, "  %-15.6e %-15.6e %-+10.3e\n", c.lhs,
                      c.rhs, c.residual);
        os << buf;
    }
    for (const auto& f : report.failures)
        os << "FAIL: " << f << '\n';
    os << (report.pass ? "PASS" : "FAIL") << '\n';
    return os.str();
}

} // namespace

std::string emit(const RunReport& report, Format format) {
    switch (format) {
    case Format::Json:
        return report_json(report).dump(2) + "\n";
    case Format::Csv:
        return emit_csv(report);
    case Format::Pretty:
        return emit_pretty(report);
    }
    throw ConfigError("emit: unknown format");
}

} // namespace vlab
