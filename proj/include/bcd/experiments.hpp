#pragma once

#include "bcd/config.hpp"
#include "bcd/io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bcd {

struct PointRecord {
    std::string key;  // e.g. "L=41 T=100 cd_mode=bare"
    double wall_time = 0.0;
    bool ok = true;
    std::string error;
};

struct ExperimentOutput {
    std::vector<std::pair<std::string, Table>> tables;       // file name -> CSV
    std::vector<std::pair<std::string, std::string>> json;   // file name -> JSON text
    std::vector<PointRecord> points;                         // in sweep order
    bool ok() const;
};

// Evaluate f(0..n-1) on up to `jobs` threads; results land at their own index so the
// output order never depends on scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

// Runs every sweep point (failures are recorded per point, remaining points still run).
ExperimentOutput run_experiment(const RunConfig& cfg, int jobs);

// Writes tables, JSON files and manifest.json into cfg.output_dir.
void write_outputs(const RunConfig& cfg, const ExperimentOutput& out, int jobs, double total_wall_time);

extern const char* const version_string;

}  // namespace bcd
