#pragma once

#include "bcd/cd.hpp"
#include "bcd/dynamics.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcd {

enum class Experiment { crossing_report, gap_scan, gap_cd_scan, dynamics, qbcd_dynamics, cost_scan };

std::string to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& field, const std::string& msg);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct RunConfig {
    Experiment experiment = Experiment::crossing_report;
    double J = 0.5;
    double Jp = 0.27;
    int ell = 25;  // crossing-report only
    std::vector<int> L_list;
    std::vector<double> T_list;
    std::vector<CdMode> cd_modes;
    double dt = 0.0;  // <= 0: default policy
    bool dt_check = false;
    Stepper stepper = Stepper::automatic;
    QbcdForm qbcd_form = QbcdForm::closed;
    int samples = 0;
    int grid_points = 200;
    double gap_tol = 1e-6;
    int cost_steps = 200;
    std::string output_dir = "results";

    // canonical "key = value" listing, sorted by key; identical configs give identical text
    std::string canonical() const;
    // canonical() without output_dir: the part that determines the numbers
    std::string hash_text() const;
    // throws ConfigError (line 0) when the combination is not runnable
    void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Lists are comma separated, and integer or real
// ranges may be written start:stop:step (inclusive of stop).
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& s);

}  // namespace bcd
