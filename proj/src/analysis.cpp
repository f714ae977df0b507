#include "bcd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bcd {

namespace {

constexpr int min_points = 4;
constexpr double kz_floor = 1.5;

void check_window(std::pair<int, int> w, std::size_t n) {
    if (w.first < 0 || w.second >= static_cast<int>(n) || w.second < w.first)
        throw std::invalid_argument("fit window out of range");
    if (w.second - w.first + 1 < min_points)
        throw std::invalid_argument("fit needs at least " + std::to_string(min_points) + " points");
}

std::pair<int, int> full_window(const Series& d) { return {0, static_cast<int>(d.size()) - 1}; }

}  // namespace

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::pair<int, int> w) {
    if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
    check_window(w, x.size());
    const int n = w.second - w.first + 1;
    double mx = 0.0, my = 0.0;
    for (int i = w.first; i <= w.second; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = w.first; i <= w.second; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: abscissae are all equal");
    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double ss = 0.0;
    for (int i = w.first; i <= w.second; ++i) {
        const double e = y[i] - r.slope * x[i] - r.intercept;
        ss += e * e;
    }
    r.slope_err = std::sqrt(ss / (n - 2) / sxx);
    r.window = w;
    return r;
}

FitResult fit_exponential(const Series& data) {
    std::vector<double> x, y;
    for (const auto& [L, d] : data) {
        if (!(d > 0.0)) throw std::invalid_argument("fit_exponential: nonpositive gap at L = " + std::to_string(L));
        x.push_back(L);
        y.push_back(std::log(d));
    }
    if (data.size() < static_cast<std::size_t>(min_points)) throw std::invalid_argument("fit_exponential: need at least 4 sizes");
    FitResult r = linear_fit(x, y, full_window(data));
    double lo = y.front(), hi = y.front();
    for (double v : y) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < std::log(10.0)) r.warning = "gap data span less than one decade";
    return r;
}

FitResult fit_power_law_approach(const Series& data, double alpha) {
    std::vector<double> x, y;
    for (const auto& [T, a] : data) {
        if (!(a < alpha))
            throw std::invalid_argument("fit_power_law_approach: alpha_cd >= alpha at T = " + std::to_string(T));
        if (!(T > 0.0)) throw std::invalid_argument("fit_power_law_approach: nonpositive T");
        x.push_back(std::log(T));
        y.push_back(std::log(alpha - a));
    }
    if (data.size() < static_cast<std::size_t>(min_points)) throw std::invalid_argument("fit_power_law_approach: need at least 4 points");
    return linear_fit(x, y, full_window(data));
}

double estimate_adiabatic_time(double alpha, double delta, int L, double delta0) {
    if (alpha < 0.0 || delta < 0.0 || L <= 0 || !(delta0 > 0.0))
        throw std::invalid_argument("estimate_adiabatic_time: inputs must be positive");
    const double t_ad = std::exp(2.0 * alpha * L) / (delta0 * delta0);
    const double f = 1.0 - 2.0 * delta * L / (t_ad * t_ad);
    if (f <= 0.0) throw std::domain_error("estimate_adiabatic_time: correction outside the linearized regime");
    return t_ad * f;
}

std::pair<int, int> auto_kz_window(const Series& data, int L) {
    const double top = 0.3 * L / 2.0;
    std::pair<int, int> best{0, -1};
    int start = -1;
    for (int i = 0; i <= static_cast<int>(data.size()); ++i) {
        const bool in = i < static_cast<int>(data.size()) && data[i].second >= kz_floor && data[i].second <= top;
        if (in && start < 0) start = i;
        if (!in && start >= 0) {
            const double span = std::log(data[i - 1].first / data[start].first);
            const double best_span =
                best.second >= best.first ? std::log(data[best.second].first / data[best.first].first) : -1.0;
            if (span > best_span) best = {start, i - 1};
            start = -1;
        }
    }
    if (best.second < best.first) throw std::runtime_error("auto_kz_window: no point inside the Kibble-Zurek band");
    return best;
}

FitResult kz_slope(const Series& data, std::pair<int, int> w) {
    check_window(w, data.size());
    std::vector<double> x, y;
    for (const auto& [T, K] : data) {
        x.push_back(std::log(T));
        y.push_back(K > 0.0 ? std::log(K) : 0.0);
    }
    for (int i = w.first; i <= w.second; ++i)
        if (data[i].second < kz_floor)
            throw std::invalid_argument("kz_slope: window contains plateau point at T = " + std::to_string(data[i].first));
    return linear_fit(x, y, w);
}

}  // namespace bcd
