// bottleneck-cd <experiment> --config <file> [--out <dir>] [--jobs N] [--dt X] [--cd-mode M]
#include "bcd/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_compute = 1;
constexpr int exit_config = 2;

int default_jobs() {
    if (const char* env = std::getenv("BOTTLENECK_CD_JOBS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        throw bcd::ConfigError("BOTTLENECK_CD_JOBS", 0, "", std::string("not a positive integer: '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counterdiabatic driving through the bottleneck chain: sweeps to CSV/JSON"};
    std::string experiment, config_path, out_dir, cd_mode;
    int jobs = 0;
    double dt = 0.0;
    app.add_option("experiment", experiment,
                   "crossing-report | gap-scan | gap-cd-scan | dynamics | qbcd-dynamics | cost-scan")
        ->required();
    app.add_option("--config", config_path, "flat key = value run configuration")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output_dir)");
    auto* jobs_opt = app.add_option("--jobs", jobs, "parallel sweep points (fallback: BOTTLENECK_CD_JOBS, then cores)")
                         ->check(CLI::PositiveNumber);
    auto* dt_opt = app.add_option("--dt", dt, "time step (overrides dt)")->check(CLI::PositiveNumber);
    auto* mode_opt = app.add_option("--cd-mode", cd_mode, "single cd mode (overrides cd_modes)");
    app.set_version_flag("--version", bcd::version_string);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    bcd::RunConfig cfg;
    try {
        cfg = bcd::load_config(config_path);
        if (bcd::experiment_from_string(experiment) != cfg.experiment)
            throw bcd::ConfigError(config_path, 0, "experiment",
                                   "file says '" + bcd::to_string(cfg.experiment) + "', command line says '" +
                                       experiment + "'");
        if (*out_opt) cfg.output_dir = out_dir;
        if (*dt_opt) cfg.dt = dt;
        if (*mode_opt) cfg.cd_modes = {bcd::cd_mode_from_string(cd_mode)};
        if (!*jobs_opt) jobs = default_jobs();
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const bcd::ExperimentOutput out = bcd::run_experiment(cfg, jobs);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bcd::write_outputs(cfg, out, jobs, wall);
        int failed = 0;
        for (const auto& p : out.points)
            if (!p.ok) {
                ++failed;
                std::cerr << "point failed: " << p.key << ": " << p.error << "\n";
            }
        std::cout << bcd::to_string(cfg.experiment) << ": " << out.points.size() - failed << "/" << out.points.size()
                  << " points ok, results in " << cfg.output_dir << "\n";
        return failed ? exit_compute : exit_ok;
    } catch (const bcd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_compute;
    }
}
