#pragma once

#include <string>
#include <utility>
#include <vector>

namespace bcd {

using Series = std::vector<std::pair<double, double>>;

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;  // standard error of the slope
    std::pair<int, int> window{0, 0};  // [first, last] data indices used
    std::string warning;               // empty unless the fit is poorly conditioned
};

// Ordinary least squares y = slope x + intercept over data[first..last].
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y, std::pair<int, int> window);

// (L, Delta) -> fit on (L, ln Delta); the decay rate is -slope.
FitResult fit_exponential(const Series& data);

// (T, alpha_cd) -> fit on (ln T, ln(alpha - alpha_cd)); slope is the exponent, exp(intercept) the amplitude.
FitResult fit_power_law_approach(const Series& data, double alpha);

// Baseline T_ad = Delta_min^-2 with Delta_min = delta0 exp(-alpha L), corrected to first order
// in the CD shift of the rate: T_ad (1 - 2 delta L / T_ad^2).
double estimate_adiabatic_time(double alpha, double delta, int L, double delta0);

// Largest contiguous run (data sorted by T) with K in [1.5, 0.3 L / 2].
std::pair<int, int> auto_kz_window(const Series& data, int L);

// (T, K) -> log-log slope over the window; points below K = 1.5 are rejected.
FitResult kz_slope(const Series& data, std::pair<int, int> window);

}  // namespace bcd
