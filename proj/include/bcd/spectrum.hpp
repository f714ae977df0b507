#pragma once

#include "bcd/model.hpp"

#include <functional>
#include <utility>

namespace bcd {

struct SpectrumData {
    RVec eigenvalues;   // ascending
    CMat eigenvectors;  // columns
};

// Hermitian eigensolve with ascending eigenvalues; throws on non-Hermitian input.
SpectrumData eigendecompose_sorted(const CMat& m);
SpectrumData eigendecompose_sorted(const RMat& m);

// Physical sector keeps the ell+1 lowest single-particle modes filled.
double ground_state_energy(const ModelParams& p, double lam);
// lowest excitation: promote mode ell+1 to ell+2
double first_excited_energy(const ModelParams& p, double lam);

struct CrossingData {
    double B_c = 0.0;
    double lambda_c = 0.0;
    double eps_c = 0.0;
    double kappa_c = 0.0;
    double mu = 0.0;
    double alpha = 0.0;
};

CrossingData analytic_crossing(const ModelParams& p);

struct EdgeStates {
    RVec psiL, psiR;  // unit vectors
    RVec rawL, rawR;  // unnormalized entry pattern
    double kappa = 0.0;
    double mu = 0.0;
};

EdgeStates build_edge_states(const ModelParams& p);

struct GapResult {
    double delta_min = 0.0;
    double lambda_star = 0.0;
};

using HoppingGenerator = std::function<CMat(double lam)>;

// 2 (m_b - m_a) for the adjacent pair of modes with largest weight on span{psiL, psiR}
double edge_gap(const CMat& h, const EdgeStates& e);

// [max(0, lambda_c - 0.2), min(1, lambda_c + 0.2)]
std::pair<double, double> default_gap_window(const ModelParams& p);

// Coarse grid then golden-section refinement of the edge gap.
GapResult min_gap_scan(const ModelParams& p, const HoppingGenerator& gen, double lo, double hi,
                       int grid_points = 200, double rel_tol = 1e-6);
GapResult bare_min_gap(const ModelParams& p);

// Inverse of the cubic ramp: s in [0,1] with 3s^2 - 2s^3 = lam.
double schedule_inverse(double lam);

}  // namespace bcd
