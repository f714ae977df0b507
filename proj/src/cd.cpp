#include "bcd/cd.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bcd {

namespace {

// Linear system for the stacked unknowns (alpha, beta); order 1 keeps only the alpha block.
void variational_system(const RVec& Jv, double lam, int order, RMat& A, RVec& b) {
    const int L = static_cast<int>(Jv.size());
    auto J = [&](int i) { return Jv(((i % L) + L) % L); };
    auto w = [L](int i) { return ((i % L) + L) % L; };
    const double d0 = 8.0 * (1.0 - lam) * (1.0 - lam);
    const double l2 = lam * lam;
    const double x = 4.0 * lam * (lam - 1.0);
    const int n = order * L;
    A = RMat::Zero(n, n);
    b = RVec::Zero(n);
    for (int j = 0; j < L; ++j) {
        A(j, j) += d0 + l2 * (J(j - 1) * J(j - 1) + 2.0 * J(j) * J(j) + J(j + 1) * J(j + 1));
        A(j, w(j - 1)) += 2.0 * l2 * J(j) * J(j - 1);
        A(j, w(j + 1)) += 2.0 * l2 * J(j) * J(j + 1);
        b(j) = -J(j);
        if (order == 1) continue;
        A(j, L + w(j - 1)) += x * J(j - 1);
        A(j, L + j) += x * J(j + 1);
        const int r = L + j;
        A(r, r) += d0 + l2 * (J(j - 1) * J(j - 1) + J(j) * J(j) + J(j + 1) * J(j + 1) + J(j + 2) * J(j + 2));
        A(r, L + w(j - 1)) += 2.0 * l2 * J(j - 1) * J(j + 1);
        A(r, L + w(j + 1)) += 2.0 * l2 * J(j) * J(j + 2);
        A(r, w(j + 1)) += x * J(j);
        A(r, j) += x * J(j + 1);
    }
}

}  // namespace

CDCoefficients solve_variational(const RVec& couplings, double lam, int order) {
    if (lam < 0.0 || lam > 1.0) throw std::invalid_argument("variational solve: lambda outside [0,1]");
    if (order != 1 && order != 2) throw std::invalid_argument("variational solve: order must be 1 or 2");
    if (couplings.size() < 3) throw std::invalid_argument("variational solve: need at least 3 bonds");
    RMat A;
    RVec b;
    variational_system(couplings, lam, order, A, b);
    Eigen::FullPivLU<RMat> lu(A);
    if (!lu.isInvertible())
        throw std::runtime_error("variational solve: singular system at lambda = " + std::to_string(lam));
    const RVec x = lu.solve(b);
    const int L = static_cast<int>(couplings.size());
    CDCoefficients c;
    c.order = order;
    c.lambda = lam;
    c.alpha = x.head(L);
    if (order == 2) c.beta = x.tail(L);
    return c;
}

CDCoefficients solve_variational_first(const ModelParams& p, double lam) {
    return solve_variational(build_couplings(p).plain, lam, 1);
}

CDCoefficients solve_variational_second(const ModelParams& p, double lam) {
    return solve_variational(build_couplings(p).plain, lam, 2);
}

double variational_residual(const ModelParams& p, const CDCoefficients& c) {
    RMat A;
    RVec b;
    variational_system(build_couplings(p).plain, c.lambda, c.order, A, b);
    RVec x(A.cols());
    x.head(p.L()) = c.alpha;
    if (c.order == 2) x.tail(p.L()) = c.beta;
    return (A * x - b).cwiseAbs().maxCoeff();
}

CMat build_variational_gamma(const CDCoefficients& c) {
    const int L = static_cast<int>(c.alpha.size());
    const int ell = (L - 1) / 2;
    const cplx I(0.0, 1.0);
    CMat A = CMat::Zero(L, L);
    // t(i, j, v) adds v to the coefficient of G+_i G-_j (1-based)
    auto t = [&A](int i, int j, cplx v) { A(i - 1, j - 1) += v; };
    auto hop = [&](int i, int j, double v) {
        t(i, j, I * v);
        t(j, i, -I * v);
    };
    RVec at = c.alpha;
    at(L - 1) = -at(L - 1);
    for (int j = 1; j <= ell; ++j) hop(2 * j + 1, 2 * j - 1, at(j - 1));
    for (int j = 1; j <= ell - 1; ++j) hop(2 * j, 2 * j + 2, at(j - 1));
    hop(2 * ell, 2 * ell + 1, at(ell - 1));
    hop(1, 2, at(L - 1));
    if (c.order == 2) {
        RVec bt = c.beta;
        bt(L - 2) = -bt(L - 2);
        bt(L - 1) = -bt(L - 1);
        for (int j = 1; j <= ell - 1; ++j) hop(2 * j + 3, 2 * j - 1, bt(j - 1));
        for (int j = 1; j <= ell - 2; ++j) hop(2 * j, 2 * j + 4, bt(j - 1));
        hop(2 * ell - 2, 2 * ell + 1, bt(ell - 2));
        hop(2 * ell, 2 * ell - 1, bt(ell - 1));
        hop(1, 4, bt(L - 2));
        hop(3, 2, bt(L - 1));
    }
    return A;
}

BdGMatrix build_variational_bdg(const CDCoefficients& c) {
    const int L = static_cast<int>(c.alpha.size());
    const cplx I(0.0, 1.0);
    BdGMatrix m = BdGMatrix::zero(L);
    // -2i a~_j (c_j^dag c_{j+r}^dag + c_j c_{j+r}); bonds wrapping past site L flip sign
    auto add = [&](int range, const RVec& coef) {
        for (int j = 0; j < L; ++j) {
            const int k = (j + range) % L;
            const double a = (j + range >= L) ? -coef(j) : coef(j);
            m.hpp(j, k) -= I * a;
            m.hpp(k, j) += I * a;
        }
    };
    add(1, c.alpha);
    if (c.order == 2) add(2, c.beta);
    return m;
}

CMat exact_agp_single_particle(const ModelParams& p, double lam, double degeneracy_tol) {
    const SpectrumData s = eigendecompose_sorted(build_hopping_matrix(p, lam));
    const CMat& U = s.eigenvectors;
    const CMat d = U.adjoint() * hopping_derivative(p).cast<cplx>() * U;
    const int n = static_cast<int>(s.eigenvalues.size());
    CMat a = CMat::Zero(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            if (m == k) continue;
            const double gap = s.eigenvalues(k) - s.eigenvalues(m);
            if (std::abs(gap) < degeneracy_tol)
                throw std::runtime_error("exact_agp_single_particle: near-degenerate pair at lambda = " +
                                         std::to_string(lam));
            a(m, k) = cplx(0.0, 1.0) * d(m, k) / gap;
        }
    const CMat A = U * a * U.adjoint();
    // small denominators near lambda = 0 amplify rounding in the two triangles
    return 0.5 * (A + A.adjoint());
}

namespace {

struct EdgeTerms {
    double e1, e2, e3, e4, bnd;  // shared exponential factors of the two sandwiches
};

EdgeTerms edge_terms(const ModelParams& p, double lam, QbcdForm form) {
    const CrossingData c = analytic_crossing(p);
    const double k = c.kappa_c, mu = c.mu, ell = p.ell;
    const double B = (1.0 - lam) / lam;
    EdgeTerms t{};
    t.e1 = std::exp(-(ell - 1.0) * k - mu);
    t.e2 = std::exp(-ell * k - mu);
    t.e3 = std::exp(-(ell - 1.0) * k) * (1.0 + std::exp(-2.0 * mu));
    t.e4 = std::exp(-ell * k - 2.0 * mu) + std::exp(-(ell - 2.0) * k);
    // boundary coupling of the last entries: linear in J B / J' from the direct contraction
    const double f = form == QbcdForm::closed_squared ? p.J * std::pow(p.J * B / p.Jp, 2) : p.J * p.J * B / p.Jp;
    t.bnd = f * std::exp(-ell * k - mu) * (1.0 + std::exp(k));
    return t;
}

}  // namespace

double qbcd_matrix_element(const ModelParams& p, double lam, QbcdForm form) {
    if (form == QbcdForm::numeric) {
        const EdgeStates e = build_edge_states(p);
        return e.rawR.dot(hopping_derivative(p) * e.rawL);
    }
    const EdgeTerms t = edge_terms(p, lam, form);
    const double B = (1.0 - lam) / lam;
    const double r = p.J * B / p.Jp;
    return p.Jp * t.e1 + r * r * t.e2 + p.ell * t.e3 + (p.ell - 1.0) * t.e4 + t.bnd;
}

double qbcd_gap_estimate(const ModelParams& p, double lam, QbcdForm form) {
    if (form == QbcdForm::numeric) {
        const EdgeStates e = build_edge_states(p);
        return e.rawR.dot(build_hopping_matrix(p, lam) * e.rawL);
    }
    const EdgeTerms t = edge_terms(p, lam, form);
    const double B = (1.0 - lam) / lam;
    const double r = p.J * B / p.Jp;
    return p.Jp * lam * t.e1 + (lam - 1.0) * r * r * t.e2 + (lam - 1.0) * p.ell * t.e3 + (p.ell - 1.0) * lam * t.e4 +
           lam * t.bnd;
}

QBCDTerm build_qbcd(const ModelParams& p, QbcdForm form) {
    QBCDTerm q;
    q.lambda_c = analytic_crossing(p).lambda_c;
    q.edges = build_edge_states(p);
    q.matrix_element = qbcd_matrix_element(p, q.lambda_c, form);
    q.gap_estimate = qbcd_gap_estimate(p, q.lambda_c, form);
    if (q.gap_estimate == 0.0) throw std::runtime_error("build_qbcd: vanishing gap estimate");
    const CVec L = q.edges.psiL.cast<cplx>(), R = q.edges.psiR.cast<cplx>();
    q.gamma_matrix = cplx(0.0, q.matrix_element / q.gap_estimate) * (R * L.adjoint() - L * R.adjoint());
    return q;
}

double hs_cost(const CMat& m) { return m.cwiseAbs2().sum(); }

double time_averaged_cost(const std::function<CMat(double s)>& gen, int n_steps) {
    if (n_steps < 100) throw std::invalid_argument("time_averaged_cost: need at least 100 steps");
    double acc = 0.0;
    for (int k = 0; k < n_steps; ++k) acc += hs_cost(gen((k + 0.5) / n_steps));
    return acc / n_steps;
}

}  // namespace bcd
