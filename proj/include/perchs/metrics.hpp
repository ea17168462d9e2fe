#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace perchs {

struct MetricsRecord {
    std::string experiment_id;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    double t = 0.0;
    std::string metric_name;
    double value = 0.0;
};

// Fixed-schema CSV: header "experiment_id,epsilon,seed,t,metric_name,value",
// floats at 17 significant digits so reruns are byte-comparable.
std::string metrics_to_csv(const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> metrics_from_csv(const std::string& csv_text);

std::string format_double(double v); // %.17g

} // namespace perchs
