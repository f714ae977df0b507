#include "bcd/experiments.hpp"

#include "bcd/analysis.hpp"
#include "bcd/spectrum.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <thread>

namespace bcd {

#ifndef BCD_VERSION
#define BCD_VERSION "dev"
#endif
const char* const version_string = BCD_VERSION;

using nlohmann::json;

bool ExperimentOutput::ok() const {
    for (const auto& p : points)
        if (!p.ok) return false;
    return true;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) f(i);
        });
    for (auto& th : pool) th.join();
}

namespace {

ModelParams params_for(const RunConfig& c, int L) { return ModelParams((L - 1) / 2, c.J, c.Jp); }

std::string fmt(double v) { return format_double(v); }

// Runs n points, timing each and catching per-point failures.
template <class R>
std::vector<std::optional<R>> sweep(int n, int jobs, const std::function<std::string(int)>& key,
                                    const std::function<R(int)>& f, std::vector<PointRecord>& records) {
    std::vector<std::optional<R>> out(n);
    std::vector<PointRecord> rec(n);
    parallel_for(n, jobs, [&](int i) {
        rec[i].key = key(i);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            out[i] = f(i);
        } catch (const std::exception& e) {
            rec[i].ok = false;
            rec[i].error = e.what();
        }
        rec[i].wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });
    records.insert(records.end(), rec.begin(), rec.end());
    return out;
}

ExperimentOutput crossing_report(const RunConfig& c) {
    ExperimentOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    PointRecord rec{"ell=" + std::to_string(c.ell), 0.0, true, ""};
    try {
        const ModelParams p(c.ell, c.J, c.Jp);
        const CrossingData x = analytic_crossing(p);
        const EdgeStates e = build_edge_states(p);
        json j = {{"J", c.J},           {"Jp", c.Jp},       {"ell", c.ell},     {"alpha", x.alpha},
                  {"lambda_c", x.lambda_c}, {"kappa_c", x.kappa_c}, {"mu", x.mu}, {"eps_c", x.eps_c},
                  {"B_c", x.B_c},       {"edge_overlap", e.psiL.dot(e.psiR)}};
        out.json.emplace_back("crossing.json", j.dump(2) + "\n");
    } catch (const std::exception& ex) {
        rec.ok = false;
        rec.error = ex.what();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.points.push_back(rec);
    return out;
}

json fit_json(const FitResult& f) {
    json j = {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_err", f.slope_err},
              {"window", {f.window.first, f.window.second}}};
    if (!f.warning.empty()) j["warning"] = f.warning;
    return j;
}

ExperimentOutput gap_scan(const RunConfig& c, int jobs) {
    ExperimentOutput out;
    const int n = static_cast<int>(c.L_list.size());
    auto res = sweep<GapResult>(
        n, jobs, [&](int i) { return "L=" + std::to_string(c.L_list[i]); },
        [&](int i) {
            const ModelParams p = params_for(c, c.L_list[i]);
            const auto [lo, hi] = default_gap_window(p);
            return min_gap_scan(p, [&p](double lam) { return CMat(build_hopping_matrix(p, lam).cast<cplx>()); }, lo,
                                hi, c.grid_points, c.gap_tol);
        },
        out.points);
    Table t{{"L", "lambda_star", "delta_min"}, {}};
    Series data;
    for (int i = 0; i < n; ++i) {
        if (!res[i]) continue;
        t.add({std::int64_t{c.L_list[i]}, res[i]->lambda_star, res[i]->delta_min});
        data.push_back({static_cast<double>(c.L_list[i]), res[i]->delta_min});
    }
    out.tables.emplace_back("gap_scan.csv", t);
    json j = {{"analytic_alpha", analytic_crossing(params_for(c, c.L_list.front())).alpha}};
    if (data.size() >= 4) {
        const FitResult f = fit_exponential(data);
        j["alpha_hat"] = -f.slope;
        j["fit"] = fit_json(f);
    }
    out.json.emplace_back("gap_scan_fit.json", j.dump(2) + "\n");
    return out;
}

CMat cd_gap_generator(const ModelParams& p, CdMode m, double T, double lam) {
    const double s = schedule_inverse(lam);
    const double ldot = 6.0 * s * (1.0 - s) / T;
    const CDCoefficients cc = m == CdMode::var2 ? solve_variational_second(p, lam) : solve_variational_first(p, lam);
    return build_hopping_matrix(p, lam).cast<cplx>() + ldot * build_variational_gamma(cc);
}

ExperimentOutput gap_cd_scan(const RunConfig& c, int jobs) {
    ExperimentOutput out;
    const int nL = static_cast<int>(c.L_list.size()), nT = static_cast<int>(c.T_list.size()),
              nM = static_cast<int>(c.cd_modes.size());
    // point index: first the bare gap per L, then (L, T, mode)
    const int n = nL + nL * nT * nM;
    auto decode = [&](int i, int& li, int& ti, int& mi) {
        if (i < nL) {
            li = i;
            ti = mi = -1;
            return;
        }
        const int k = i - nL;
        li = k / (nT * nM);
        ti = (k / nM) % nT;
        mi = k % nM;
    };
    auto res = sweep<GapResult>(
        n, jobs,
        [&](int i) {
            int li, ti, mi;
            decode(i, li, ti, mi);
            return "L=" + std::to_string(c.L_list[li]) +
                   (ti < 0 ? " cd_mode=bare" : " T=" + fmt(c.T_list[ti]) + " cd_mode=" + to_string(c.cd_modes[mi]));
        },
        [&](int i) {
            int li, ti, mi;
            decode(i, li, ti, mi);
            const ModelParams p = params_for(c, c.L_list[li]);
            const auto [lo, hi] = default_gap_window(p);
            if (ti < 0)
                return min_gap_scan(p, [&p](double lam) { return CMat(build_hopping_matrix(p, lam).cast<cplx>()); },
                                    lo, hi, c.grid_points, c.gap_tol);
            const double T = c.T_list[ti];
            const CdMode m = c.cd_modes[mi];
            return min_gap_scan(p, [&](double lam) { return cd_gap_generator(p, m, T, lam); }, lo, hi, c.grid_points,
                                c.gap_tol);
        },
        out.points);

    Table scan{{"L", "T", "cd_mode", "lambda_star", "delta_min", "delta_min_bare", "amplification"}, {}};
    std::map<std::pair<int, int>, Series> per;  // (mode, T) -> (L, delta)
    Series bare;
    for (int li = 0; li < nL; ++li)
        if (res[li]) bare.push_back({static_cast<double>(c.L_list[li]), res[li]->delta_min});
    for (int i = nL; i < n; ++i) {
        int li, ti, mi;
        decode(i, li, ti, mi);
        if (!res[i] || !res[li]) continue;
        const double db = res[li]->delta_min;
        scan.add({std::int64_t{c.L_list[li]}, c.T_list[ti], to_string(c.cd_modes[mi]), res[i]->lambda_star,
                  res[i]->delta_min, db, res[i]->delta_min / db});
        per[{mi, ti}].push_back({static_cast<double>(c.L_list[li]), res[i]->delta_min});
    }
    out.tables.emplace_back("gap_cd_scan.csv", scan);

    Table fits{{"cd_mode", "T", "alpha_cd", "slope_err", "sizes"}, {}};
    json j;
    std::optional<double> alpha_hat;
    if (bare.size() >= 4) {
        const FitResult f = fit_exponential(bare);
        alpha_hat = -f.slope;
        j["bare"] = {{"alpha_hat", -f.slope}, {"fit", fit_json(f)}};
    }
    j["analytic_alpha"] = analytic_crossing(params_for(c, c.L_list.front())).alpha;
    for (int mi = 0; mi < nM; ++mi) {
        Series approach;
        for (int ti = 0; ti < nT; ++ti) {
            const auto it = per.find({mi, ti});
            if (it == per.end() || it->second.size() < 4) continue;
            const FitResult f = fit_exponential(it->second);
            fits.add({to_string(c.cd_modes[mi]), c.T_list[ti], -f.slope, f.slope_err,
                      static_cast<std::int64_t>(it->second.size())});
            approach.push_back({c.T_list[ti], -f.slope});
        }
        json m;
        if (alpha_hat && approach.size() >= 4) {
            try {
                const FitResult pw = fit_power_law_approach(approach, *alpha_hat);
                m = {{"exponent", pw.slope}, {"exponent_err", pw.slope_err}, {"delta", std::exp(pw.intercept)}};
            } catch (const std::exception& e) {
                m = {{"error", e.what()}};
            }
        }
        j["power_law"][to_string(c.cd_modes[mi])] = m;
    }
    out.tables.emplace_back("gap_cd_fit.csv", fits);
    out.json.emplace_back("gap_cd_fit.json", j.dump(2) + "\n");
    return out;
}

struct DynPoint {
    DriveResult r;
    double dt = 0.0;
    double dt_shift = 0.0;
};

ExperimentOutput dynamics_sweep(const RunConfig& c, int jobs) {
    ExperimentOutput out;
    const int nL = static_cast<int>(c.L_list.size()), nT = static_cast<int>(c.T_list.size()),
              nM = static_cast<int>(c.cd_modes.size());
    const int n = nL * nT * nM;
    auto idx = [&](int i) { return std::array<int, 3>{i / (nT * nM), (i / nM) % nT, i % nM}; };
    auto res = sweep<DynPoint>(
        n, jobs,
        [&](int i) {
            const auto [li, ti, mi] = idx(i);
            return "L=" + std::to_string(c.L_list[li]) + " T=" + fmt(c.T_list[ti]) +
                   " cd_mode=" + to_string(c.cd_modes[mi]);
        },
        [&](int i) {
            const auto [li, ti, mi] = idx(i);
            DriveSpec s;
            s.cd_mode = c.cd_modes[mi];
            s.params = params_for(c, c.L_list[li]);
            s.schedule = Schedule(c.T_list[ti]);
            s.dt = c.dt;
            s.stepper = c.stepper;
            s.qbcd_form = c.qbcd_form;
            DynPoint d;
            if (c.dt_check) {
                d.r = run_drive_converged(s, c.samples, 1e-6, &d.dt_shift);
                d.dt = 0.5 * s.schedule.T / s.n_steps();
            } else {
                d.r = run_drive(s, c.samples);
                d.dt = s.schedule.T / s.n_steps();
                d.dt_shift = std::nan("");
            }
            return d;
        },
        out.points);

    Table t{{"L", "T", "cd_mode", "kinks", "domain_walls", "excess_energy", "energy", "steps", "dt", "stepper",
             "unitarity_drift", "dt_shift"},
            {}};
    Table series{{"L", "T", "cd_mode", "t", "lambda", "kinks", "domain_walls", "energy"}, {}};
    std::map<std::pair<int, int>, Series> kz;  // (L index, mode) -> (T, K)
    for (int i = 0; i < n; ++i) {
        if (!res[i]) continue;
        const auto [li, ti, mi] = idx(i);
        const DriveResult& r = res[i]->r;
        const std::int64_t L = c.L_list[li];
        const std::string mode = to_string(c.cd_modes[mi]);
        t.add({L, c.T_list[ti], mode, r.final_state.kinks, r.final_state.domain_walls, r.excess_energy,
               r.final_state.energy, std::int64_t{r.steps}, res[i]->dt, to_string(r.stepper_used), r.unitarity_drift,
               res[i]->dt_shift});
        for (const Observation& o : r.series)
            series.add({L, c.T_list[ti], mode, o.t, o.lambda, o.kinks, o.domain_walls, o.energy});
        kz[{li, mi}].push_back({c.T_list[ti], r.final_state.kinks});
    }
    out.tables.emplace_back(c.experiment == Experiment::qbcd_dynamics ? "qbcd_dynamics.csv" : "dynamics.csv", t);
    if (c.samples > 0) out.tables.emplace_back("dynamics_series.csv", series);

    // Kibble-Zurek slopes where enough T points fall inside the band
    json j = json::array();
    for (auto& [key, data] : kz) {
        std::sort(data.begin(), data.end());
        json e = {{"L", c.L_list[key.first]}, {"cd_mode", to_string(c.cd_modes[key.second])}};
        try {
            const auto w = auto_kz_window(data, c.L_list[key.first]);
            const FitResult f = kz_slope(data, w);
            e["slope"] = f.slope;
            e["slope_err"] = f.slope_err;
            e["T_window"] = {data[w.first].first, data[w.second].first};
        } catch (const std::exception& ex) {
            e["unavailable"] = ex.what();
        }
        j.push_back(e);
    }
    out.json.emplace_back("kz_fits.json", j.dump(2) + "\n");

    if (c.experiment == Experiment::qbcd_dynamics) {
        Table q{{"L", "lambda_c", "matrix_element", "gap_estimate", "ratio", "hs_cost"}, {}};
        for (int L : c.L_list) {
            const QBCDTerm term = build_qbcd(params_for(c, L), c.qbcd_form);
            q.add({std::int64_t{L}, term.lambda_c, term.matrix_element, term.gap_estimate,
                   term.matrix_element / term.gap_estimate, hs_cost(term.gamma_matrix)});
        }
        out.tables.emplace_back("qbcd_terms.csv", q);
    }
    return out;
}

ExperimentOutput cost_scan(const RunConfig& c, int jobs) {
    ExperimentOutput out;
    const int nL = static_cast<int>(c.L_list.size()), nM = static_cast<int>(c.cd_modes.size());
    struct CostPoint {
        double avg, at_half;
    };
    auto res = sweep<CostPoint>(
        nL * nM, jobs,
        [&](int i) { return "L=" + std::to_string(c.L_list[i / nM]) + " cd_mode=" + to_string(c.cd_modes[i % nM]); },
        [&](int i) {
            const ModelParams p = params_for(c, c.L_list[i / nM]);
            const CdMode m = c.cd_modes[i % nM];
            std::function<CMat(double)> gen;
            if (m == CdMode::var1 || m == CdMode::var2) {
                gen = [&p, m](double s) {
                    const double lam = Schedule(1.0).eval(s).first;
                    return build_variational_gamma(m == CdMode::var1 ? solve_variational_first(p, lam)
                                                                     : solve_variational_second(p, lam));
                };
            } else if (m == CdMode::qbcd) {
                const CMat g = build_qbcd(p, c.qbcd_form).gamma_matrix;
                gen = [g](double) { return g; };
            } else {
                gen = [&p](double s) { return exact_agp_single_particle(p, Schedule(1.0).eval(s).first); };
            }
            return CostPoint{time_averaged_cost(gen, c.cost_steps), hs_cost(gen(0.5))};
        },
        out.points);
    Table t{{"L", "ell", "cd_mode", "time_avg_cost", "cost_at_half"}, {}};
    for (int i = 0; i < nL * nM; ++i) {
        if (!res[i]) continue;
        const int L = c.L_list[i / nM];
        t.add({std::int64_t{L}, std::int64_t{(L - 1) / 2}, to_string(c.cd_modes[i % nM]), res[i]->avg, res[i]->at_half});
    }
    out.tables.emplace_back("cost_scan.csv", t);
    return out;
}

}  // namespace

ExperimentOutput run_experiment(const RunConfig& cfg, int jobs) {
    cfg.validate();
    switch (cfg.experiment) {
        case Experiment::crossing_report: return crossing_report(cfg);
        case Experiment::gap_scan: return gap_scan(cfg, jobs);
        case Experiment::gap_cd_scan: return gap_cd_scan(cfg, jobs);
        case Experiment::dynamics:
        case Experiment::qbcd_dynamics: return dynamics_sweep(cfg, jobs);
        case Experiment::cost_scan: return cost_scan(cfg, jobs);
    }
    throw std::logic_error("run_experiment: unhandled experiment");
}

void write_outputs(const RunConfig& cfg, const ExperimentOutput& out, int jobs, double total_wall_time) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
    json files = json::array();
    for (const auto& [name, table] : out.tables) {
        write_text_file((fs::path(cfg.output_dir) / name).string(), to_csv(table));
        files.push_back(name);
    }
    for (const auto& [name, text] : out.json) {
        write_text_file((fs::path(cfg.output_dir) / name).string(), text);
        files.push_back(name);
    }
    json points = json::array();
    for (const auto& p : out.points) {
        json e = {{"key", p.key}, {"wall_time_s", p.wall_time}, {"status", p.ok ? "ok" : "failed"}};
        if (!p.ok) e["error"] = p.error;
        points.push_back(e);
    }
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.hash_text())));
    const json manifest = {{"tool", "bottleneck-cd"},
                           {"version", version_string},
                           {"experiment", to_string(cfg.experiment)},
                           {"config_hash", std::string("fnv1a64:") + hash},
                           {"config", cfg.canonical()},
                           {"jobs", jobs},
                           {"written_utc", stamp},
                           {"total_wall_time_s", total_wall_time},
                           {"status", out.ok() ? "ok" : "failed"},
                           {"files", files},
                           {"points", points}};
    write_text_file((fs::path(cfg.output_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace bcd
