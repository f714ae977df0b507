#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

namespace bcd {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

// Ring of L = 2*ell + 1 spins. Bonds ell and ell+1 carry J, the last bond
// carries -Jp (antiferromagnetic), every other bond is 1.
struct ModelParams {
    int ell = 0;
    double J = 0.5;
    double Jp = 0.27;

    ModelParams() = default;
    ModelParams(int ell_, double J_, double Jp_);

    int L() const { return 2 * ell + 1; }
    // throws std::invalid_argument unless 0 < Jp < J < 1, J^2 < Jp and L >= 5
    void validate() const;
};

// All arrays are indexed 0..L-1 for bonds 1..L (bond j couples sites j, j+1).
struct CouplingSet {
    RVec plain;           // J_j
    RVec parity_flipped;  // J~_j: last entry sign-flipped (periodic fermions)
    RVec kink_signs;      // sign(J_j)
};

CouplingSet build_couplings(const ModelParams& p);

// Cubic ramp lambda(s) = 3s^2 - 2s^3, s = t/T.
struct Schedule {
    double T = 1.0;

    explicit Schedule(double T_ = 1.0);
    // returns (lambda, dlambda/dt); throws for s outside [0, 1]
    std::pair<double, double> eval(double s) const;
};

// Effective single-particle matrix in the Gamma basis, H = 2 G+ h G- + lam*J_L + (1-lam).
RMat build_hopping_matrix(const ModelParams& p, double lam);
// d/dlambda of the above (the matrix is linear in lambda)
RMat hopping_derivative(const ModelParams& p);
// additive constant lam*J_L + (1 - lam) of the many-body form
double hopping_constant(const ModelParams& p, double lam);

// Quadratic form H = Psi^dag M Psi with Psi = (c_1..c_L, c_1^dag..c_L^dag).
// Rows/cols 0..L-1 are annihilators, L..2L-1 creators.
struct BdGMatrix {
    CMat hpm;  // particle-hole conserving block, Hermitian
    CMat hpp;  // pairing block, antisymmetric

    int L() const { return static_cast<int>(hpm.rows()); }
    CMat full() const;
    static BdGMatrix from_full(const CMat& m);
    static BdGMatrix zero(int L);
};

BdGMatrix build_bdg_hamiltonian(const ModelParams& p, double lam);

// Linear map Gamma+_k = sum_a W(k, a) Psi_a (L x 2L).
CMat gamma_creation_map(int L);

// Converts sum_ij G+_i X_ij G-_j into canonical Psi^dag M Psi + constant.
// Note the many-body Hamiltonian itself corresponds to X = 2 h.
BdGMatrix gamma_to_bdg(const CMat& X, double* constant = nullptr);

}  // namespace bcd
