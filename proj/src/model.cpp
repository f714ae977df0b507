#include "bcd/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bcd {

ModelParams::ModelParams(int ell_, double J_, double Jp_) : ell(ell_), J(J_), Jp(Jp_) { validate(); }

void ModelParams::validate() const {
    if (ell < 2)
        throw std::invalid_argument("ModelParams: ell must be >= 2 (L >= 5), got " + std::to_string(ell));
    if (!(Jp > 0.0 && Jp < J && J < 1.0))
        throw std::invalid_argument("ModelParams: need 0 < Jp < J < 1");
    // too close to J^2 the edge modes delocalize and the crossing analytics break down
    if (!(J * J < Jp - 1e-6))
        throw std::invalid_argument("ModelParams: need J^2 < Jp (localized crossing regime)");
}

CouplingSet build_couplings(const ModelParams& p) {
    const int L = p.L();
    CouplingSet c;
    c.plain = RVec::Ones(L);
    c.plain(p.ell - 1) = p.J;
    c.plain(p.ell) = p.J;
    c.plain(L - 1) = -p.Jp;
    c.parity_flipped = c.plain;
    c.parity_flipped(L - 1) = -c.plain(L - 1);
    c.kink_signs = c.plain.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; });
    return c;
}

Schedule::Schedule(double T_) : T(T_) {
    if (!(T > 0.0)) throw std::invalid_argument("Schedule: total time must be positive");
}

std::pair<double, double> Schedule::eval(double s) const {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("Schedule::eval: s outside [0,1]");
    return {s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s) / T};
}

RMat build_hopping_matrix(const ModelParams& p, double lam) {
    const int L = p.L();
    const CouplingSet c = build_couplings(p);
    RMat h = RMat::Zero(L, L);
    h(0, 0) = -lam * c.plain(L - 1);
    h(L - 1, L - 1) = lam - 1.0;
    for (int j = 1; j <= p.ell; ++j) {
        h(2 * j - 2, 2 * j - 1) = h(2 * j - 1, 2 * j - 2) = lam - 1.0;
        h(2 * j - 1, 2 * j) = h(2 * j, 2 * j - 1) = lam * c.plain(j - 1);
    }
    return h;
}

RMat hopping_derivative(const ModelParams& p) {
    return build_hopping_matrix(p, 1.0) - build_hopping_matrix(p, 0.0);
}

double hopping_constant(const ModelParams& p, double lam) { return lam * (-p.Jp) + (1.0 - lam); }

CMat BdGMatrix::full() const {
    const int n = L();
    CMat m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = hpm;
    m.topRightCorner(n, n) = hpp;
    m.bottomLeftCorner(n, n) = -hpp.conjugate();
    m.bottomRightCorner(n, n) = -hpm.conjugate();
    return m;
}

BdGMatrix BdGMatrix::from_full(const CMat& m) {
    const int n = static_cast<int>(m.rows()) / 2;
    return {m.topLeftCorner(n, n), m.topRightCorner(n, n)};
}

BdGMatrix BdGMatrix::zero(int L) { return {CMat::Zero(L, L), CMat::Zero(L, L)}; }

BdGMatrix build_bdg_hamiltonian(const ModelParams& p, double lam) {
    const int L = p.L();
    const CouplingSet c = build_couplings(p);
    BdGMatrix b = BdGMatrix::zero(L);
    b.hpm.diagonal().setConstant(1.0 - lam);
    for (int j = 0; j < L; ++j) {
        const int k = (j + 1) % L;
        const double t = -lam * c.parity_flipped(j) / 2.0;
        b.hpm(j, k) += t;
        b.hpm(k, j) += t;
        b.hpp(j, k) += t;
        b.hpp(k, j) -= t;
    }
    return b;
}

CMat gamma_creation_map(int L) {
    const int ell = (L - 1) / 2;
    const cplx h(0.0, 0.5);
    CMat W = CMat::Zero(L, 2 * L);
    // odd Gamma index 2j-1 pairs gamma_{2j-1} with its mirror gamma_{2L-2j+2}
    for (int j = 1; j <= ell + 1; ++j) {
        const int k = 2 * j - 2, a = j - 1, r = L - j;
        W(k, a) += h;
        W(k, L + a) += h;
        W(k, r) += h;
        W(k, L + r) -= h;
    }
    for (int j = 1; j <= ell; ++j) {
        const int k = 2 * j - 1, a = j - 1, r = L - j;
        W(k, a) += h;
        W(k, L + a) -= h;
        W(k, r) += h;
        W(k, L + r) += h;
    }
    return W;
}

BdGMatrix gamma_to_bdg(const CMat& X, double* constant) {
    const int L = static_cast<int>(X.rows());
    if (X.cols() != L) throw std::invalid_argument("gamma_to_bdg: matrix must be square");
    if ((X - X.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + X.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("gamma_to_bdg: matrix must be Hermitian");
    const CMat W = gamma_creation_map(L);
    // G- = conj(W) Psi^dag, and Psi^dag = S Psi with S swapping the two halves
    auto swap_rows = [L](const CMat& m) {
        CMat r(m.rows(), m.cols());
        r.topRows(L) = m.bottomRows(L);
        r.bottomRows(L) = m.topRows(L);
        return r;
    };
    auto swap_cols = [L](const CMat& m) {
        CMat r(m.rows(), m.cols());
        r.leftCols(L) = m.rightCols(L);
        r.rightCols(L) = m.leftCols(L);
        return r;
    };
    // sum G+ X G- = Psi^T (W^T X W* S) Psi = Psi^dag Y Psi with Y = S W^T X W* S
    const CMat Q = W.transpose() * X * W.conjugate();
    const CMat Y = swap_rows(swap_cols(Q));
    // Psi^dag Y Psi = Psi^dag M Psi + tr(Y)/2 with M = (Y - S Y^T S)/2
    const CMat SYS = swap_rows(swap_cols(CMat(Y.transpose())));
    const CMat M = 0.5 * (Y - SYS);
    if (constant) *constant = 0.5 * Y.trace().real();
    return BdGMatrix::from_full(M);
}

}  // namespace bcd
