#pragma once

#include "bcd/dynamics.hpp"

namespace bcd {

// Brute-force spin-basis reference for tiny chains (L <= 9, state vector of size 2^L).
// Basis index bit j is spin j in the Z basis, bit value 0 = up.
namespace ed {

constexpr int max_sites = 9;

// Dense spin Hamiltonian -(1-lam) sum X_j - lam sum_j K_j Z_j Z_{j+1} (periodic) for given couplings.
CMat spin_hamiltonian(const RVec& couplings, double lam);

// Spectrum of the even-parity sector with the plain couplings joined with the odd sector
// using the parity-flipped couplings, ascending. Symmetric about zero.
RVec chiral_spectrum(const ModelParams& p, double lam);

// Lowest eigenvalue of the spin Hamiltonian restricted to prod X = +1.
double even_sector_ground_energy(const ModelParams& p, double lam);

// Midpoint-rule Schrodinger evolution of |+x ... +x>; supports bare, var1, var2.
// Sampling identical to run_drive so the two series can be compared point by point.
DriveResult evolve(const DriveSpec& spec, int n_samples = 0);

}  // namespace ed
}  // namespace bcd
