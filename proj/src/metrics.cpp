#include "perchs/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace perchs {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
    std::ostringstream out;
    out << "experiment_id,epsilon,seed,t,metric_name,value\n";
    for (const auto& r : records)
        out << r.experiment_id << ',' << format_double(r.epsilon) << ',' << r.seed << ','
            << format_double(r.t) << ',' << r.metric_name << ',' << format_double(r.value)
            << '\n';
    return out.str();
}

std::vector<MetricsRecord> metrics_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line) || line != "experiment_id,epsilon,seed,t,metric_name,value")
        throw std::runtime_error("metrics_from_csv: schema mismatch");
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        MetricsRecord r;
        std::getline(ls, r.experiment_id, ',');
        std::getline(ls, field, ',');
        r.epsilon = std::stod(field);
        std::getline(ls, field, ',');
        r.seed = std::stoull(field);
        std::getline(ls, field, ',');
        r.t = std::stod(field);
        std::getline(ls, r.metric_name, ',');
        std::getline(ls, field, ',');
        r.value = std::stod(field);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace perchs
