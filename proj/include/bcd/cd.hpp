#pragma once

#include "bcd/model.hpp"
#include "bcd/spectrum.hpp"

#include <functional>

namespace bcd {

// Variational counterdiabatic coefficients at one value of lambda.
// order 1: H1 = sum_j alpha_j (Y_j Z_{j+1} + Z_j Y_{j+1})
// order 2: adds sum_j beta_j (Y_j X_{j+1} Z_{j+2} + Z_j X_{j+1} Y_{j+2})
struct CDCoefficients {
    int order = 1;
    double lambda = 0.0;
    RVec alpha;
    RVec beta;  // empty for order 1
};

// Same system for an arbitrary periodic coupling array (index j = bond j+1).
CDCoefficients solve_variational(const RVec& couplings, double lam, int order);
CDCoefficients solve_variational_first(const ModelParams& p, double lam);
CDCoefficients solve_variational_second(const ModelParams& p, double lam);
// max-norm residual of the coefficient equations
double variational_residual(const ModelParams& p, const CDCoefficients& c);

// Gamma-basis matrix A with H1 = 2 G+ A G- (purely imaginary, Hermitian)
CMat build_variational_gamma(const CDCoefficients& c);
// H1 = Psi^dag M Psi
BdGMatrix build_variational_bdg(const CDCoefficients& c);

// Single-particle adiabatic gauge potential of h(lambda), energy-denominator form.
// The exact many-body counterdiabatic term is G+ A G- (no factor 2).
CMat exact_agp_single_particle(const ModelParams& p, double lam, double degeneracy_tol = 1e-12);

enum class QbcdForm {
    closed,          // closed forms for the edge-vector sandwiches
    closed_squared,  // same, with the boundary factor squared
    numeric          // direct sandwiches with the constructed edge vectors
};

struct QBCDTerm {
    CMat gamma_matrix;  // many-body term is G+ gamma_matrix G-, fixed in lambda
    double matrix_element = 0.0;
    double gap_estimate = 0.0;
    double lambda_c = 0.0;
    EdgeStates edges;
};

// closed-form <R|d_lambda h|L> and <R|h|L> with unnormalized edge vectors at lambda
double qbcd_matrix_element(const ModelParams& p, double lam, QbcdForm form = QbcdForm::closed);
double qbcd_gap_estimate(const ModelParams& p, double lam, QbcdForm form = QbcdForm::closed);

QBCDTerm build_qbcd(const ModelParams& p, QbcdForm form = QbcdForm::closed);

// Hilbert-Schmidt norm squared, sum |M_nm|^2
double hs_cost(const CMat& m);
// midpoint average over s in [0,1] of hs_cost(gen(s))
double time_averaged_cost(const std::function<CMat(double s)>& gen, int n_steps);

}  // namespace bcd
