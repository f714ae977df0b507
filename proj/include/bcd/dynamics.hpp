#pragma once

#include "bcd/cd.hpp"
#include "bcd/model.hpp"

#include <string>
#include <vector>

namespace bcd {

enum class CdMode { bare, var1, var2, qbcd, exact_agp };

std::string to_string(CdMode m);
CdMode cd_mode_from_string(const std::string& s);

// bdg: 2L x 2L Dirac propagator, exponential by eigendecomposition.
// gamma: the ell+1 occupied Gamma orbitals, same midpoint rule, exponential by
//        Taylor series on the banded generator. All generators here conserve
//        Gamma number, so both describe the same state.
// automatic: bdg for L <= 25, gamma above.
enum class Stepper { automatic, bdg, gamma };

std::string to_string(Stepper s);
Stepper stepper_from_string(const std::string& s);

struct DriveSpec {
    CdMode cd_mode = CdMode::bare;
    ModelParams params;
    Schedule schedule{1.0};
    double dt = 0.0;  // <= 0 selects min(0.01, T/1000)
    Stepper stepper = Stepper::automatic;
    QbcdForm qbcd_form = QbcdForm::closed;

    double effective_dt() const;
    int n_steps() const;
};

struct Propagator {
    CMat V;  // Psi(t) = V Psi(0)
    double final_time = 0.0;
    int steps = 0;
};

// Instantaneous values of the observables.
struct Observation {
    double t = 0.0;
    double lambda = 0.0;
    double kinks = 0.0;         // frustrated bonds, sum_j (1 - sign(J_j) Z_j Z_{j+1}) / 2
    double domain_walls = 0.0;  // sum_j (1 - Z_j Z_{j+1}) / 2
    double energy = 0.0;        // <H[lambda]>
};

struct DriveResult {
    std::vector<Observation> series;  // requested sample times, then the final point
    Observation final_state;
    double excess_energy = 0.0;
    double unitarity_drift = 0.0;
    int steps = 0;
    Stepper stepper_used = Stepper::bdg;
};

// Dirac-operator equal-time correlations R(a, b) = <Psi_a Psi_b> of the evolved state.
CMat correlations_from_propagator(const CMat& V);
// same from Gamma orbitals (columns of phi are the occupied modes)
CMat correlations_from_orbitals(const CMat& phi);

// sum_j s_j <(c_j^dag - c_j)(c_{j+1}^dag + c_{j+1})>, with periodic fermion indices
double bond_contraction(const CMat& R, const RVec& signs);

double kink_number(const CMat& R, const CouplingSet& c);
double domain_wall_number(const CMat& R, const CouplingSet& c);
double energy_expectation(const CMat& R, const ModelParams& p, double lam);

double kink_number(const Propagator& V, const CouplingSet& c);
double energy_expectation(const Propagator& V, const ModelParams& p, double lam);
double excess_energy(const Propagator& V, const ModelParams& p);

// Full 2L x 2L propagator (bdg stepper).
Propagator propagate(const DriveSpec& spec);

// Drive with observables recorded at n_samples equally spaced times (0 keeps only the final state).
DriveResult run_drive(const DriveSpec& spec, int n_samples = 0);

// run_drive, then again at half the step; throws when any final observable moves by more
// than tol. The finer run is returned and the largest shift stored in *shift.
DriveResult run_drive_converged(const DriveSpec& spec, int n_samples = 0, double tol = 1e-6, double* shift = nullptr);

// ||V^dag V - I||_max
double unitarity_drift(const CMat& V);

}  // namespace bcd
