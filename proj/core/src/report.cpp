#include "dcb/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "dcb/errors.hpp"
#include "dcb/version.hpp"

namespace dcb {

std::string format_double(double v) {
    // Shortest decimal that parses back to the same double: try increasing
    // precision, verify by round-trip.
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_csv(const std::string& path, const std::string& config_echo,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    out << "# " << kVersion << "\n";
    out << "# config: " << (config_echo.empty() ? "{}" : config_echo) << "\n";
    for (size_t i = 0; i < columns.size(); ++i) {
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }
    for (const auto& row : rows) {
        if (row.size() != columns.size()) {
            throw ContractError("csv row width " + std::to_string(row.size()) +
                                " != header width " + std::to_string(columns.size()));
        }
        for (size_t i = 0; i < row.size(); ++i) {
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
    }
    if (!out) throw FormatError("short write to '" + path + "'", 0);
}

void write_metrics_csv(const std::string& path, const std::string& config_echo,
                       const std::vector<MetricRow>& rows) {
    std::vector<std::vector<std::string>> cells;
    cells.reserve(rows.size());
    for (const MetricRow& r : rows) {
        cells.push_back({r.run_id, r.mode, r.metric,
                         r.threshold < 0.0 ? "" : format_double(r.threshold),
                         r.lead_time < 0 ? "" : std::to_string(r.lead_time),
                         format_double(r.value)});
    }
    write_csv(path, config_echo, {"run_id", "mode", "metric", "threshold", "lead_time", "value"},
              cells);
}

void write_json_report(const std::string& path, const std::string& config_echo,
                       const std::string& payload_key, const std::string& payload_json) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = nlohmann::json::parse(config_echo.empty() ? "{}" : config_echo);
    j[payload_key] = nlohmann::json::parse(payload_json);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
    out << j.dump(2) << "\n";
    if (!out) throw FormatError("short write to '" + path + "'", 0);
}

}  // namespace dcb
