#include "perchs/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "perchs/metrics.hpp"

namespace perchs {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

void write_pgm(const std::string& path, const GridSpec& g,
               const std::vector<unsigned char>& pix) {
    std::ofstream f = open_out(path, std::ios::binary);
    f << "P5\n" << g.nx << " " << g.ny << "\n255\n";
    // Top image row is the largest j so plots read like plane coordinates.
    for (int j = g.ny - 1; j >= 0; --j)
        f.write(reinterpret_cast<const char*>(&pix[static_cast<std::size_t>(j) * g.nx]), g.nx);
}

} // namespace

void write_mask_pgm(const std::string& path, const DomainMask& mask) {
    const GridSpec& g = mask.grid;
    std::vector<unsigned char> pix(g.cells());
    for (int c = 0; c < g.cells(); ++c) pix[c] = mask.fluid[c] ? 255 : 0;
    write_pgm(path, g, pix);
}

void write_field_pgm(const std::string& path, const ScalarField& field) {
    const GridSpec& g = field.grid;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (double v : field.values) {
        if (std::isnan(v)) continue;
        if (first || v < lo) lo = first ? v : std::min(lo, v);
        if (first || v > hi) hi = first ? v : std::max(hi, v);
        first = false;
    }
    double span = hi - lo;
    std::vector<unsigned char> pix(g.cells(), 0);
    for (int c = 0; c < g.cells(); ++c) {
        double v = field.values[c];
        if (std::isnan(v)) continue;
        double s = span > 0 ? (v - lo) / span : 1.0;
        pix[c] = static_cast<unsigned char>(std::lround(255.0 * s));
    }
    write_pgm(path, g, pix);
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    std::ofstream f = open_out(path);
    f << "i,j,value\n";
    const GridSpec& g = field.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f << i << "," << j << "," << format_double(field.values[g.idx(i, j)]) << "\n";
}

ScalarField read_field_csv(const std::string& path, const GridSpec& grid) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(f, line) || line != "i,j,value")
        throw std::runtime_error("field csv schema mismatch: " + path);
    ScalarField out;
    out.grid = grid;
    out.values.assign(grid.cells(), std::numeric_limits<double>::quiet_NaN());
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        int i, j;
        char c1, c2;
        std::string vs;
        if (!(ss >> i >> c1 >> j >> c2) || c1 != ',' || c2 != ',' || !std::getline(ss, vs))
            throw std::runtime_error("bad field csv row: " + line);
        if (!grid.in_grid(i, j)) throw std::runtime_error("field csv index out of range");
        out.values[grid.idx(i, j)] = std::strtod(vs.c_str(), nullptr);
    }
    return out;
}

std::string model_to_json(const PerforationModel& model) {
    nlohmann::json j{{"kind", to_string(model.kind)},
                     {"inclusion_scale", model.inclusion_scale},
                     {"occupancy_prob", model.occupancy_prob},
                     {"period", model.period},
                     {"seed", model.seed}};
    return j.dump(2);
}

PerforationModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PerforationModel m;
    m.kind = perforation_kind_from_string(j.at("kind").get<std::string>());
    m.inclusion_scale = j.value("inclusion_scale", m.inclusion_scale);
    m.occupancy_prob = j.value("occupancy_prob", m.occupancy_prob);
    m.period = j.value("period", m.period);
    m.seed = j.value("seed", m.seed);
    m.validate();
    return m;
}

std::string tensor_to_json(const EffectiveTensor& tensor, const PerforationModel& model,
                           const GridSpec& grid, const std::vector<std::uint64_t>& seeds) {
    nlohmann::json j{{"a11", tensor.a11},
                     {"a12", tensor.a12},
                     {"a22", tensor.a22},
                     {"mu", tensor.mu},
                     {"model", nlohmann::json::parse(model_to_json(model))},
                     {"grid", {{"nx", grid.nx}, {"ny", grid.ny}, {"h", grid.h},
                               {"ox", grid.ox}, {"oy", grid.oy}}},
                     {"seeds", seeds}};
    return j.dump(2);
}

} // namespace perchs
