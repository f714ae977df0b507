#include "bcd/config.hpp"

#include "bcd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace bcd {

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::crossing_report: return "crossing-report";
        case Experiment::gap_scan: return "gap-scan";
        case Experiment::gap_cd_scan: return "gap-cd-scan";
        case Experiment::dynamics: return "dynamics";
        case Experiment::qbcd_dynamics: return "qbcd-dynamics";
        case Experiment::cost_scan: return "cost-scan";
    }
    return "unknown";
}

Experiment experiment_from_string(const std::string& s) {
    for (Experiment e : {Experiment::crossing_report, Experiment::gap_scan, Experiment::gap_cd_scan, Experiment::dynamics,
                         Experiment::qbcd_dynamics, Experiment::cost_scan})
        if (to_string(e) == s) return e;
    throw std::invalid_argument("unknown experiment '" + s +
                                "' (expected crossing-report, gap-scan, gap-cd-scan, dynamics, qbcd-dynamics, cost-scan)");
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& field, const std::string& msg)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") + (field.empty() ? "" : ": " + field) +
                         ": " + msg),
      line_(line),
      field_(field) {}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw std::invalid_argument("'" + s + "' is not a finite number");
    return v;
}

int parse_int(const std::string& s) {
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::invalid_argument("'" + s + "' is not an integer");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("'" + s + "' is not a boolean (true/false)");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& s, F parse_one) {
    std::vector<T> out;
    for (const std::string& item : split(s, ',')) {
        if (item.empty()) throw std::invalid_argument("empty list entry");
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(parse_one(item));
        } else if (parts.size() == 3) {
            const T a = parse_one(parts[0]), b = parse_one(parts[1]), step = parse_one(parts[2]);
            if (!(step > T(0)) || b < a) throw std::invalid_argument("range '" + item + "' needs start <= stop and step > 0");
            const long n = std::lround(std::floor((b - a) / static_cast<double>(step) + 1e-9));
            if (n > 100000) throw std::invalid_argument("range '" + item + "' is too long");
            for (long k = 0; k <= n; ++k) out.push_back(a + static_cast<T>(k * step));
        } else {
            throw std::invalid_argument("bad list entry '" + item + "'");
        }
    }
    return out;
}

std::string qbcd_form_name(QbcdForm f) {
    switch (f) {
        case QbcdForm::closed: return "closed";
        case QbcdForm::closed_squared: return "closed_squared";
        case QbcdForm::numeric: return "numeric";
    }
    return "unknown";
}

QbcdForm qbcd_form_from_string(const std::string& s) {
    if (s == "closed") return QbcdForm::closed;
    if (s == "closed_squared") return QbcdForm::closed_squared;
    if (s == "numeric") return QbcdForm::numeric;
    throw std::invalid_argument("unknown qbcd_form '" + s + "' (expected closed, closed_squared, numeric)");
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

}  // namespace

std::string RunConfig::canonical() const {
    std::map<std::string, std::string> kv;
    kv["experiment"] = to_string(experiment);
    kv["J"] = format_double(J);
    kv["Jp"] = format_double(Jp);
    kv["ell"] = std::to_string(ell);
    kv["L_list"] = join(L_list, [](int x) { return std::to_string(x); });
    kv["T_list"] = join(T_list, [](double x) { return format_double(x); });
    kv["cd_modes"] = join(cd_modes, [](CdMode m) { return to_string(m); });
    kv["dt"] = format_double(dt);
    kv["dt_check"] = dt_check ? "true" : "false";
    kv["stepper"] = to_string(stepper);
    kv["qbcd_form"] = qbcd_form_name(qbcd_form);
    kv["samples"] = std::to_string(samples);
    kv["grid_points"] = std::to_string(grid_points);
    kv["gap_tol"] = format_double(gap_tol);
    kv["cost_steps"] = std::to_string(cost_steps);
    kv["output_dir"] = output_dir;
    std::string out;
    for (const auto& [k, v] : kv)
        if (!v.empty()) out += k + " = " + v + "\n";  // unset lists are left out
    return out;
}

std::string RunConfig::hash_text() const {
    RunConfig c = *this;
    c.output_dir.clear();
    return c.canonical();
}

void RunConfig::validate() const {
    const std::string src = "config";
    auto fail = [&](const std::string& field, const std::string& msg) { throw ConfigError(src, 0, field, msg); };
    auto check_params = [&](int e, const std::string& field) {
        try {
            ModelParams p(e, J, Jp);
            analytic_crossing(p);
        } catch (const std::exception& ex) {
            fail(field, ex.what());
        }
    };
    check_params(std::max(ell, 2), "J/Jp");
    if (experiment == Experiment::crossing_report) {
        check_params(ell, "ell");
        return;
    }
    if (L_list.empty()) fail("L_list", "required for " + to_string(experiment));
    for (int L : L_list) {
        if (L < 5 || L % 2 == 0) fail("L_list", "L = " + std::to_string(L) + " must be odd and >= 5");
        check_params((L - 1) / 2, "L_list");
    }
    const bool needs_T = experiment == Experiment::gap_cd_scan || experiment == Experiment::dynamics ||
                         experiment == Experiment::qbcd_dynamics;
    if (needs_T && T_list.empty()) fail("T_list", "required for " + to_string(experiment));
    for (double T : T_list)
        if (!(T > 0.0)) fail("T_list", "T must be positive");
    if (grid_points < 3) fail("grid_points", "need at least 3");
    if (!(gap_tol > 0.0)) fail("gap_tol", "must be positive");
    if (cost_steps < 100) fail("cost_steps", "need at least 100");
    if (samples < 0) fail("samples", "must be >= 0");
    if (output_dir.empty()) fail("output_dir", "must not be empty");
    for (CdMode m : cd_modes) {
        if (experiment == Experiment::gap_cd_scan && m != CdMode::var1 && m != CdMode::var2)
            fail("cd_modes", "gap-cd-scan supports var1 and var2");
        if (experiment == Experiment::cost_scan && m == CdMode::bare)
            fail("cd_modes", "cost-scan needs a counterdiabatic mode");
    }
    if (dt > 0.0)
        for (double T : T_list)
            if (dt >= T) fail("dt", "dt must be smaller than every T");
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    c.cd_modes.clear();
    bool have_modes = false;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"experiment", [&](const std::string& v) { c.experiment = experiment_from_string(v); }},
        {"J", [&](const std::string& v) { c.J = parse_real(v); }},
        {"Jp", [&](const std::string& v) { c.Jp = parse_real(v); }},
        {"ell", [&](const std::string& v) { c.ell = parse_int(v); }},
        {"L_list", [&](const std::string& v) { c.L_list = parse_list<int>(v, parse_int); }},
        {"T_list", [&](const std::string& v) { c.T_list = parse_list<double>(v, parse_real); }},
        {"cd_modes",
         [&](const std::string& v) {
             c.cd_modes.clear();
             for (const auto& m : split(v, ',')) c.cd_modes.push_back(cd_mode_from_string(m));
             have_modes = true;
         }},
        {"dt", [&](const std::string& v) { c.dt = parse_real(v); }},
        {"dt_check", [&](const std::string& v) { c.dt_check = parse_bool(v); }},
        {"stepper", [&](const std::string& v) { c.stepper = stepper_from_string(v); }},
        {"qbcd_form", [&](const std::string& v) { c.qbcd_form = qbcd_form_from_string(v); }},
        {"samples", [&](const std::string& v) { c.samples = parse_int(v); }},
        {"grid_points", [&](const std::string& v) { c.grid_points = parse_int(v); }},
        {"gap_tol", [&](const std::string& v) { c.gap_tol = parse_real(v); }},
        {"cost_steps", [&](const std::string& v) { c.cost_steps = parse_int(v); }},
        {"output_dir", [&](const std::string& v) { c.output_dir = v; }},
    };
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(source, line, key, "unknown key");
        if (!seen.insert(key).second) throw ConfigError(source, line, key, "duplicate key");
        if (value.empty()) throw ConfigError(source, line, key, "empty value");
        try {
            it->second(value);
        } catch (const std::exception& e) {
            throw ConfigError(source, line, key, e.what());
        }
    }
    if (!seen.count("experiment")) throw ConfigError(source, 0, "experiment", "missing");
    if (!have_modes) {
        switch (c.experiment) {
            case Experiment::gap_cd_scan: c.cd_modes = {CdMode::var1}; break;
            case Experiment::dynamics: c.cd_modes = {CdMode::bare, CdMode::var1, CdMode::var2}; break;
            case Experiment::qbcd_dynamics: c.cd_modes = {CdMode::bare, CdMode::qbcd}; break;
            case Experiment::cost_scan: c.cd_modes = {CdMode::var1, CdMode::var2, CdMode::qbcd}; break;
            default: break;
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, 0, "", "cannot open file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace bcd
