#include "perchs/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "perchs/io.hpp"

namespace perchs {

namespace {

using nlohmann::json;

const std::set<std::string> kKinds = {
    "gen-domain", "solve-linear",   "evolve",           "corrector", "homogenize",
    "converge-linear", "converge-heleshaw", "green", "capacity",  "probe"};

json grid_to_json(const GridSpec& g) {
    return json{{"nx", g.nx}, {"ny", g.ny}, {"h", g.h}, {"ox", g.ox}, {"oy", g.oy}};
}

GridSpec grid_from_json(const json& j, GridSpec g) {
    g.nx = j.value("nx", g.nx);
    g.ny = j.value("ny", g.ny);
    g.h = j.value("h", g.h);
    g.ox = j.value("ox", g.ox);
    g.oy = j.value("oy", g.oy);
    return g;
}

json d0_to_json(const RegionSpec& d) {
    json j{{"shape", d.shape == RegionSpec::Shape::Disc ? "disc" : "polygon"},
           {"cx", d.cx},
           {"cy", d.cy},
           {"radius", d.radius}};
    if (d.shape == RegionSpec::Shape::Polygon) {
        json poly = json::array();
        for (auto& [x, y] : d.polygon) poly.push_back(json::array({x, y}));
        j["polygon"] = poly;
    }
    return j;
}

RegionSpec d0_from_json(const json& j, RegionSpec d) {
    std::string shape = j.value("shape", std::string(
        d.shape == RegionSpec::Shape::Disc ? "disc" : "polygon"));
    if (shape == "disc")
        d.shape = RegionSpec::Shape::Disc;
    else if (shape == "polygon")
        d.shape = RegionSpec::Shape::Polygon;
    else
        throw ConfigError("d0.shape: expected disc or polygon, got " + shape);
    d.cx = j.value("cx", d.cx);
    d.cy = j.value("cy", d.cy);
    d.radius = j.value("radius", d.radius);
    if (j.contains("polygon")) {
        d.polygon.clear();
        for (auto& v : j.at("polygon"))
            d.polygon.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    }
    return d;
}

SolverConfig solver_from_json(const json& j, SolverConfig s) {
    s.tol = j.value("tol", s.tol);
    s.max_iter = j.value("max_iter", s.max_iter);
    s.relaxation = j.value("relaxation", s.relaxation);
    std::string m = j.value("method", std::string(s.method == SolveMethod::CG ? "cg" : "sor"));
    if (m == "cg")
        s.method = SolveMethod::CG;
    else if (m == "sor")
        s.method = SolveMethod::SOR;
    else
        throw ConfigError("solver.method: expected cg or sor, got " + m);
    return s;
}

json solver_to_json(const SolverConfig& s) {
    return json{{"tol", s.tol},
                {"max_iter", s.max_iter},
                {"relaxation", s.relaxation},
                {"method", s.method == SolveMethod::CG ? "cg" : "sor"}};
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    if (!j.contains("kind")) throw ConfigError("kind: required");
    c.kind = j.at("kind").get<std::string>();
    if (j.contains("model")) {
        json m = j.at("model");
        c.model.kind = m.contains("kind")
                           ? perforation_kind_from_string(m.at("kind").get<std::string>())
                           : c.model.kind;
        c.model.inclusion_scale = m.value("inclusion_scale", c.model.inclusion_scale);
        c.model.occupancy_prob = m.value("occupancy_prob", c.model.occupancy_prob);
        c.model.period = m.value("period", c.model.period);
        c.model.seed = m.value("seed", c.model.seed);
    }
    if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"), c.grid);
    if (j.contains("eps_list")) c.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("d0")) c.d0 = d0_from_json(j.at("d0"), c.d0);
    c.T = j.value("T", c.T);
    c.dt = j.value("dt", c.dt);
    if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"), c.solver);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
    c.jobs = j.value("jobs", c.jobs);
    c.step_mode = j.value("step_mode", c.step_mode);
    c.rhs_value = j.value("rhs_value", c.rhs_value);
    c.cells_per_period = j.value("cells_per_period", c.cells_per_period);
    c.n_periods = j.value("n_periods", c.n_periods);
    c.probe_r = j.value("probe_r", c.probe_r);
    c.r_box = j.value("r_box", c.r_box);
    if (j.contains("radii")) c.radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("level_values"))
        c.level_values = j.at("level_values").get<std::vector<double>>();
    return c;
}

StepMode step_mode_of(const ExperimentConfig& cfg) {
    if (cfg.step_mode == "explicit") return StepMode::Explicit;
    if (cfg.step_mode == "fixed_point") return StepMode::FixedPoint;
    throw ConfigError("step_mode: expected explicit or fixed_point, got " + cfg.step_mode);
}

PerforationModel model_with(const ExperimentConfig& cfg, double eps, std::uint64_t seed) {
    PerforationModel m = cfg.model;
    m.period = eps;
    m.seed = seed;
    return m;
}

DomainMask domain_for(const ExperimentConfig& cfg, const PerforationModel& m) {
    if (m.kind == PerforationKind::None) return all_fluid_mask(cfg.grid);
    return generate_domain(m, cfg.grid);
}

std::vector<double> eps_or_period(const ExperimentConfig& cfg) {
    return cfg.eps_list.empty() ? std::vector<double>{cfg.model.period} : cfg.eps_list;
}

// Fan-out: runs jobs on up to n_threads workers; results keep job order.
std::vector<std::vector<MetricsRecord>> run_jobs(
    int n_threads, const std::vector<std::function<std::vector<MetricsRecord>()>>& jobs) {
    std::vector<std::vector<MetricsRecord>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    int workers = std::max(1, std::min<int>(n_threads, static_cast<int>(jobs.size())));
    auto worker = [&] {
        for (;;) {
            std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            try {
                results[k] = jobs[k]();
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw SolverError(e);
    return results;
}

std::string snapshot_path(const std::string& dir, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "state_%06d.pgm", index);
    return dir + "/" + buf;
}

double default_r_box(const ExperimentConfig& cfg) {
    if (cfg.r_box > 0) return cfg.r_box;
    double half = 0.5 * std::min(cfg.grid.nx, cfg.grid.ny) * cfg.grid.h;
    return half - 2.0 * cfg.grid.h;
}

std::vector<double> default_radii(const ExperimentConfig& cfg, double r_box) {
    if (!cfg.radii.empty()) return cfg.radii;
    double lo = 4.0 * cfg.grid.h, hi = r_box / 2.0;
    std::vector<double> out;
    for (int k = 0; k < 5; ++k) out.push_back(lo * std::pow(hi / lo, k / 4.0));
    return out;
}

void run_gen_domain(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    DomainMask mask = domain_for(cfg, cfg.model);
    write_mask_pgm(cfg.output_dir + "/domain.pgm", mask);
    auto placements = generate_placements(cfg.model, cfg.grid);
    SeparationReport sep = verify_separation(cfg.model, placements);
    double eps = cfg.model.period;
    std::uint64_t s = cfg.model.seed;
    metrics.push_back({cfg.kind, eps, s, 0.0, "volume_fraction", volume_fraction(mask)});
    metrics.push_back({cfg.kind, eps, s, 0.0, "fluid_components",
                       static_cast<double>(mask.fluid_components())});
    metrics.push_back({cfg.kind, eps, s, 0.0, "min_gap", sep.min_gap});
    metrics.push_back({cfg.kind, eps, s, 0.0, "separation_pass", sep.pass ? 1.0 : 0.0});
}

void run_solve_linear(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    DomainMask mask = domain_for(cfg, cfg.model);
    ScalarField rhs = make_field(mask, cfg.rhs_value);
    ScalarField v = solve_poisson(mask, rhs, cfg.solver);
    write_field_csv(cfg.output_dir + "/solution.csv", v);
    write_field_pgm(cfg.output_dir + "/solution.pgm", v);
    metrics.push_back({cfg.kind, cfg.model.period, cfg.model.seed, 0.0, "sup_norm",
                       norm_inf(mask, v)});
    metrics.push_back({cfg.kind, cfg.model.period, cfg.model.seed, 0.0, "l2_norm",
                       norm_l2(mask, v)});
}

void run_evolve(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    DomainMask mask = domain_for(cfg, cfg.model);
    ObstacleState state = init_state(mask, cfg.d0);
    double eps = cfg.model.period;
    std::uint64_t s = cfg.model.seed;
    double h2 = cfg.grid.h * cfg.grid.h;
    int step_index = 0;
    auto record = [&](const ObstacleState& st, const StepReport* rep) {
        double area = 0.0;
        for (int c = 0; c < cfg.grid.cells(); ++c)
            if (st.active[c] && mask.fluid[c]) area += h2;
        metrics.push_back({cfg.kind, eps, s, st.t, "area", area});
        metrics.push_back({cfg.kind, eps, s, st.t, "sup_p", norm_inf(mask, st.p)});
        if (rep) {
            metrics.push_back({cfg.kind, eps, s, st.t, "inner_iterations",
                               static_cast<double>(rep->inner_iterations)});
            metrics.push_back({cfg.kind, eps, s, st.t, "monotonicity_violations",
                               static_cast<double>(rep->monotonicity_violations)});
        }
        if (cfg.snapshot_every > 0 && step_index % cfg.snapshot_every == 0)
            write_field_pgm(snapshot_path(cfg.output_dir, step_index), st.p);
    };
    record(state, nullptr);
    evolve(state, mask, cfg.T, cfg.dt, step_mode_of(cfg), cfg.solver, nullptr,
           [&](const ObstacleState& st, const StepReport& rep) {
               ++step_index;
               record(st, &rep);
           });
}

void run_corrector(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    DomainMask cell = periodic_cell_mask(cfg.model, cfg.cells_per_period, cfg.n_periods);
    CorrectorSolution sol = solve_corrector(cell, 1.0, 0.0, cfg.solver);
    write_field_pgm(cfg.output_dir + "/corrector.pgm", sol.chi);
    write_field_csv(cfg.output_dir + "/corrector.csv", sol.chi);
    double eps = cfg.model.period;
    std::uint64_t s = cfg.model.seed;
    metrics.push_back({cfg.kind, eps, s, 0.0, "flux_x", sol.flux_x});
    metrics.push_back({cfg.kind, eps, s, 0.0, "flux_y", sol.flux_y});
    metrics.push_back({cfg.kind, eps, s, 0.0, "mu", volume_fraction(cell)});
}

EffectiveTensor resolve_tensor(const ExperimentConfig& cfg) {
    if (cfg.model.kind == PerforationKind::None) return identity_tensor();
    return effective_tensor_ensemble(cfg.model, cfg.cells_per_period, cfg.n_periods,
                                     cfg.seeds, cfg.solver)
        .tensor;
}

void run_homogenize(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    EffectiveTensorResult res =
        cfg.model.kind == PerforationKind::None
            ? EffectiveTensorResult{identity_tensor(), 0.0}
            : effective_tensor_ensemble(cfg.model, cfg.cells_per_period, cfg.n_periods,
                                        cfg.seeds, cfg.solver);
    std::ofstream f(cfg.output_dir + "/tensor.json");
    f << tensor_to_json(res.tensor, cfg.model, cfg.grid, cfg.seeds) << "\n";
    double eps = cfg.model.period;
    std::uint64_t s = cfg.seeds.empty() ? cfg.model.seed : cfg.seeds.front();
    metrics.push_back({cfg.kind, eps, s, 0.0, "a11", res.tensor.a11});
    metrics.push_back({cfg.kind, eps, s, 0.0, "a12", res.tensor.a12});
    metrics.push_back({cfg.kind, eps, s, 0.0, "a22", res.tensor.a22});
    metrics.push_back({cfg.kind, eps, s, 0.0, "mu", res.tensor.mu});
    metrics.push_back({cfg.kind, eps, s, 0.0, "asymmetry", res.asymmetry});
}

void run_converge_linear(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    EffectiveTensor tensor = resolve_tensor(cfg);
    std::vector<std::function<std::vector<MetricsRecord>()>> jobs;
    for (double eps : cfg.eps_list)
        for (std::uint64_t seed : cfg.seeds)
            jobs.push_back([&, eps, seed] {
                PerforationModel m = model_with(cfg, eps, seed);
                return linear_homogenization_experiment(m, {eps}, cfg.rhs_value, cfg.grid,
                                                        tensor, cfg.solver, cfg.kind);
            });
    for (auto& part : run_jobs(cfg.jobs, jobs))
        metrics.insert(metrics.end(), part.begin(), part.end());
}

void run_converge_heleshaw(const ExperimentConfig& cfg,
                           std::vector<MetricsRecord>& metrics) {
    EffectiveTensor tensor = resolve_tensor(cfg);
    StepMode mode = step_mode_of(cfg);
    std::vector<std::function<std::vector<MetricsRecord>()>> jobs;
    for (double eps : cfg.eps_list)
        for (std::uint64_t seed : cfg.seeds)
            jobs.push_back([&, eps, seed] {
                PerforationModel m = model_with(cfg, eps, seed);
                return heleshaw_convergence_experiment(m, {eps}, cfg.d0, cfg.T, cfg.dt,
                                                       cfg.grid, tensor, cfg.solver, mode,
                                                       cfg.kind);
            });
    for (auto& part : run_jobs(cfg.jobs, jobs))
        metrics.insert(metrics.end(), part.begin(), part.end());
}

void run_green(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    double r_box = default_r_box(cfg);
    std::vector<double> radii = default_radii(cfg, r_box);
    int ci = cfg.grid.nx / 2, cj = cfg.grid.ny / 2;
    std::vector<std::function<std::vector<MetricsRecord>()>> jobs;
    for (double eps : eps_or_period(cfg))
        for (std::uint64_t seed : cfg.seeds)
            jobs.push_back([&, eps, seed, ci, cj, r_box, radii] {
                PerforationModel m = model_with(cfg, eps, seed);
                DomainMask mask = domain_for(cfg, m);
                std::vector<MetricsRecord> out;
                for (const GreenBoundsRow& row :
                     green_bounds_check(mask, ci, cj, radii, r_box, cfg.solver)) {
                    out.push_back({cfg.kind, eps, seed, row.r, "ratio_min", row.ratio_min});
                    out.push_back({cfg.kind, eps, seed, row.r, "ratio_max", row.ratio_max});
                    out.push_back({cfg.kind, eps, seed, row.r, "sandwich_ok",
                                   row.sandwich_ok ? 1.0 : 0.0});
                }
                return out;
            });
    for (auto& part : run_jobs(cfg.jobs, jobs))
        metrics.insert(metrics.end(), part.begin(), part.end());
}

void run_capacity(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    double r_box = default_r_box(cfg);
    int ci = cfg.grid.nx / 2, cj = cfg.grid.ny / 2;
    std::vector<std::function<std::vector<MetricsRecord>()>> jobs;
    for (double eps : eps_or_period(cfg))
        for (std::uint64_t seed : cfg.seeds)
            jobs.push_back([&, eps, seed, ci, cj, r_box] {
                PerforationModel m = model_with(cfg, eps, seed);
                DomainMask mask = domain_for(cfg, m);
                std::vector<double> a_list = cfg.level_values;
                if (a_list.empty()) {
                    double mid = std::log(r_box / (r_box / 4.0)) / (2.0 * 3.14159265358979);
                    a_list = {0.5 * mid, mid, 1.5 * mid};
                }
                std::vector<MetricsRecord> out;
                for (const LevelSetCapacityRow& row :
                     level_set_capacity_check(mask, ci, cj, a_list, r_box, cfg.solver))
                    out.push_back({cfg.kind, eps, seed, row.a, "a_times_cap", row.product});
                return out;
            });
    for (auto& part : run_jobs(cfg.jobs, jobs))
        metrics.insert(metrics.end(), part.begin(), part.end());
    std::vector<MetricsRecord> lb = capacity_lower_bound_check(
        cfg.model, eps_or_period(cfg), cfg.probe_r, r_box, cfg.grid, cfg.solver, cfg.kind);
    metrics.insert(metrics.end(), lb.begin(), lb.end());
}

void run_probe(const ExperimentConfig& cfg, std::vector<MetricsRecord>& metrics) {
    double r_box = default_r_box(cfg);
    std::vector<double> radii = default_radii(cfg, r_box);
    int ci = cfg.grid.nx / 2, cj = cfg.grid.ny / 2;
    for (double eps : eps_or_period(cfg))
        for (std::uint64_t seed : cfg.seeds) {
            PerforationModel m = model_with(cfg, eps, seed);
            DomainMask mask = domain_for(cfg, m);
            std::vector<double> quotients = harnack_probe(mask, ci, cj, radii, cfg.solver);
            for (std::size_t k = 0; k < radii.size(); ++k)
                metrics.push_back(
                    {cfg.kind, eps, seed, radii[k], "harnack_quotient", quotients[k]});
            std::vector<double> osc = holder_probe(mask, ci, cj, cfg.probe_r, 3, cfg.solver);
            for (std::size_t k = 0; k < osc.size(); ++k)
                metrics.push_back({cfg.kind, eps, seed, static_cast<double>(k + 1),
                                   "holder_osc_ratio", osc[k]});
        }
}

} // namespace

void ExperimentConfig::validate() const {
    if (!kKinds.count(kind)) throw ConfigError("kind: unknown experiment kind '" + kind + "'");
    try {
        grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    try {
        model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
    try {
        solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    if (kind.rfind("converge-", 0) == 0 && eps_list.empty())
        throw ConfigError("eps_list: must be nonempty for " + kind);
    if (kind == "evolve" || kind.rfind("converge-", 0) == 0) {
        if (!(T > 0)) throw ConfigError("T: must be > 0");
        if (!(dt > 0 && dt <= T)) throw ConfigError("dt: must be in (0, T]");
    }
    if (snapshot_every < 0) throw ConfigError("snapshot_every: must be >= 0");
    if (jobs < 1) throw ConfigError("jobs: must be >= 1");
    if (step_mode != "explicit" && step_mode != "fixed_point")
        throw ConfigError("step_mode: expected explicit or fixed_point");
    if (cells_per_period < 4) throw ConfigError("cells_per_period: must be >= 4");
    if (n_periods < 1) throw ConfigError("n_periods: must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds: must be nonempty");
}

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    for (const std::string& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set: expected key=value, got '" + ov + "'");
        std::string key = ov.substr(0, eq), value = ov.substr(eq + 1);
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (...) {
            parsed = value; // bare strings stay strings
        }
        json* node = &j;
        std::size_t pos = 0;
        while (true) {
            auto dot = key.find('.', pos);
            std::string part = key.substr(pos, dot - pos);
            if (part.empty()) throw ConfigError("--set: empty key segment in '" + ov + "'");
            if (dot == std::string::npos) {
                (*node)[part] = parsed;
                break;
            }
            node = &(*node)[part];
            pos = dot + 1;
        }
    }
    try {
        return config_from_json(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string config_to_json(const ExperimentConfig& c) {
    json j{{"kind", c.kind},
           {"model",
            {{"kind", to_string(c.model.kind)},
             {"inclusion_scale", c.model.inclusion_scale},
             {"occupancy_prob", c.model.occupancy_prob},
             {"period", c.model.period},
             {"seed", c.model.seed}}},
           {"grid", grid_to_json(c.grid)},
           {"eps_list", c.eps_list},
           {"seeds", c.seeds},
           {"d0", d0_to_json(c.d0)},
           {"T", c.T},
           {"dt", c.dt},
           {"solver", solver_to_json(c.solver)},
           {"output_dir", c.output_dir},
           {"snapshot_every", c.snapshot_every},
           {"jobs", c.jobs},
           {"step_mode", c.step_mode},
           {"rhs_value", c.rhs_value},
           {"cells_per_period", c.cells_per_period},
           {"n_periods", c.n_periods},
           {"probe_r", c.probe_r},
           {"r_box", c.r_box},
           {"radii", c.radii},
           {"level_values", c.level_values}};
    return j.dump(2);
}

void run(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream f(cfg.output_dir + "/config-echo.json");
        if (!f) throw ConfigError("output_dir: cannot write to " + cfg.output_dir);
        f << config_to_json(cfg) << "\n";
    }
    std::vector<MetricsRecord> metrics;
    if (cfg.kind == "gen-domain")
        run_gen_domain(cfg, metrics);
    else if (cfg.kind == "solve-linear")
        run_solve_linear(cfg, metrics);
    else if (cfg.kind == "evolve")
        run_evolve(cfg, metrics);
    else if (cfg.kind == "corrector")
        run_corrector(cfg, metrics);
    else if (cfg.kind == "homogenize")
        run_homogenize(cfg, metrics);
    else if (cfg.kind == "converge-linear")
        run_converge_linear(cfg, metrics);
    else if (cfg.kind == "converge-heleshaw")
        run_converge_heleshaw(cfg, metrics);
    else if (cfg.kind == "green")
        run_green(cfg, metrics);
    else if (cfg.kind == "capacity")
        run_capacity(cfg, metrics);
    else if (cfg.kind == "probe")
        run_probe(cfg, metrics);
    std::ofstream f(cfg.output_dir + "/metrics.csv");
    f << metrics_to_csv(metrics);
}

std::string summarize(const std::vector<std::string>& metrics_paths) {
    std::vector<MetricsRecord> all;
    for (const std::string& path : metrics_paths) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open: " + path);
        std::stringstream ss;
        ss << f.rdbuf();
        std::vector<MetricsRecord> rows = metrics_from_csv(ss.str());
        all.insert(all.end(), rows.begin(), rows.end());
    }
    // Group by (metric_name, epsilon) and aggregate over seeds and times.
    std::map<std::pair<std::string, double>, std::vector<double>> groups;
    for (const MetricsRecord& r : all) groups[{r.metric_name, r.epsilon}].push_back(r.value);
    std::ostringstream out;
    out << "metric,epsilon,count,mean,min,max\n";
    for (const auto& [key, vals] : groups) {
        double mn = vals[0], mx = vals[0], sum = 0.0;
        for (double v : vals) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
        out << key.first << "," << format_double(key.second) << "," << vals.size() << ","
            << format_double(sum / vals.size()) << "," << format_double(mn) << ","
            << format_double(mx) << "\n";
    }
    // Monotone-in-eps verdicts on mean values, largest eps first.
    std::map<std::string, std::map<double, double>> by_metric;
    for (const auto& [key, vals] : groups) {
        double sum = 0.0;
        for (double v : vals) sum += v;
        by_metric[key.first][key.second] = sum / vals.size();
    }
    for (const auto& [name, per_eps] : by_metric) {
        if (per_eps.size() < 2) continue;
        bool mono = true;
        double prev = 0.0;
        bool first = true;
        for (auto it = per_eps.rbegin(); it != per_eps.rend(); ++it) {
            if (!first && !(it->second < prev)) mono = false;
            prev = it->second;
            first = false;
        }
        out << "# " << name << " monotone: " << (mono ? "yes" : "no") << "\n";
    }
    return out.str();
}

} // namespace perchs
