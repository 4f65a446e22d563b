#pragma once

#include <string>
#include <vector>

namespace dcb {

/// Shortest round-trippable decimal form of v ("%.17g" trimmed); the one
/// float format every CSV/JSON writer uses, so identical runs produce
/// byte-identical files.
std::string format_double(double v);

/// One metric observation. threshold / lead_time are -1 when not applicable
/// (serialized as an empty cell).
struct MetricRow {
    std::string run_id;
    std::string mode;
    std::string metric;
    double threshold = -1.0;
    int lead_time = -1;  // 1-based lead index
    double value = 0.0;
};

/// CSV layout shared by every report:
///   # <version>
///   # config: <canonical JSON echo>
///   <header row>
///   <data rows>
void write_csv(const std::string& path, const std::string& config_echo,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows);

void write_metrics_csv(const std::string& path, const std::string& config_echo,
                       const std::vector<MetricRow>& rows);

/// Arbitrary JSON payload wrapped with version + config echo.
void write_json_report(const std::string& path, const std::string& config_echo,
                       const std::string& payload_key, const std::string& payload_json);

}  // namespace dcb
