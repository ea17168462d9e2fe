#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "perchs/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"perchs: Hele-Shaw flow in perforated domains"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::vector<std::string> overrides;
    int snapshot_every = -1;
    int jobs = 0;
    if (const char* env = std::getenv("PERCHS_JOBS")) jobs = std::atoi(env);

    const std::vector<std::string> kinds = {
        "gen-domain", "solve-linear", "evolve",   "corrector", "homogenize",
        "converge-linear", "converge-heleshaw", "green", "capacity", "probe"};
    std::vector<CLI::App*> subs;
    for (const std::string& kind : kinds) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--set", overrides, "override config keys (dotted key=value)");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--snapshot-every", snapshot_every, "snapshot cadence in steps");
        sub->add_option("--jobs", jobs, "worker count (default: PERCHS_JOBS or 1)");
        subs.push_back(sub);
    }
    CLI::App* summ = app.add_subcommand("summarize", "aggregate metrics CSVs");
    std::vector<std::string> metric_paths;
    summ->add_option("paths", metric_paths, "metrics.csv files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (summ->parsed()) {
            std::cout << perchs::summarize(metric_paths);
            return 0;
        }
        std::string kind = app.get_subcommands().front()->get_name();
        perchs::ExperimentConfig cfg = perchs::load_config(config_path, overrides);
        cfg.kind = kind;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (snapshot_every >= 0) cfg.snapshot_every = snapshot_every;
        if (jobs > 0) cfg.jobs = jobs;
        perchs::run(cfg);
        return 0;
    } catch (const perchs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const perchs::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
