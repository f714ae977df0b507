#include "bcd/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bcd {

SpectrumData eigendecompose_sorted(const CMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigendecompose_sorted: matrix must be square");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eigendecompose_sorted: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose_sorted: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

SpectrumData eigendecompose_sorted(const RMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigendecompose_sorted: matrix must be square");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("eigendecompose_sorted: matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<RMat> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecompose_sorted: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
}

namespace {

RVec hopping_eigenvalues(const ModelParams& p, double lam) {
    Eigen::SelfAdjointEigenSolver<RMat> es(build_hopping_matrix(p, lam), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

double ground_state_energy(const ModelParams& p, double lam) {
    const RVec m = hopping_eigenvalues(p, lam);
    return 2.0 * m.head(p.ell + 1).sum() + hopping_constant(p, lam);
}

double first_excited_energy(const ModelParams& p, double lam) {
    const RVec m = hopping_eigenvalues(p, lam);
    return ground_state_energy(p, lam) + 2.0 * (m(p.ell + 1) - m(p.ell));
}

CrossingData analytic_crossing(const ModelParams& p) {
    p.validate();
    const double J2 = p.J * p.J, Jp = p.Jp, Jp2 = Jp * Jp;
    CrossingData c;
    c.B_c = (1.0 - J2) * (J2 - Jp2) / (Jp * (1.0 - 2.0 * J2 + Jp2));
    c.lambda_c = 1.0 / (1.0 + c.B_c);
    c.eps_c = (Jp2 - J2 * J2) / (Jp * (1.0 - 2.0 * J2 + Jp2));
    c.kappa_c = std::log(Jp * (1.0 - J2) / (J2 - Jp2));
    c.mu = std::log((J2 - Jp2) / (1.0 - J2));
    c.alpha = 0.5 * c.kappa_c;
    if (!(c.kappa_c > 0.0)) throw std::invalid_argument("analytic_crossing: no localized crossing (kappa_c <= 0)");
    return c;
}

EdgeStates build_edge_states(const ModelParams& p) {
    const CrossingData c = analytic_crossing(p);
    const int L = p.L(), ell = p.ell;
    const double k = c.kappa_c, mu = c.mu, B = c.B_c;
    EdgeStates e;
    e.kappa = k;
    e.mu = mu;
    e.rawL = RVec::Zero(L);
    e.rawR = RVec::Zero(L);
    for (int m = 0; m < ell; ++m) {
        e.rawL(2 * m) = std::exp(-m * k - mu);
        e.rawL(2 * m + 1) = std::exp(-m * k);
        const int q = ell - 1 - m;
        e.rawR(2 * m) = std::exp(-q * k);
        e.rawR(2 * m + 1) = std::exp(-q * k - mu);
    }
    e.rawL(L - 1) = p.J * B * std::exp(-ell * k) / p.Jp;
    e.rawR(L - 1) = p.J * B * std::exp(-mu) / p.Jp;
    e.psiL = e.rawL.normalized();
    e.psiR = e.rawR.normalized();
    return e;
}

double edge_gap(const CMat& h, const EdgeStates& e) {
    // real generators (bare path) take the cheaper real solver
    const SpectrumData s =
        h.imag().cwiseAbs().maxCoeff() == 0.0 ? eigendecompose_sorted(RMat(h.real())) : eigendecompose_sorted(h);
    const int n = static_cast<int>(s.eigenvalues.size());
    const CMat basis = (RMat(n, 2) << e.psiL, e.psiR).finished().cast<cplx>();
    // weight of each mode on span{psiL, psiR}; the edge vectors are nearly orthogonal,
    // so orthonormalize before projecting
    const Eigen::HouseholderQR<CMat> qr(basis);
    const CMat Q = qr.householderQ() * CMat::Identity(n, 2);
    const RVec w = (Q.adjoint() * s.eigenvectors).cwiseAbs2().colwise().sum().transpose();
    int a = 0;
    w.maxCoeff(&a);
    int b;
    if (a == 0) b = 1;
    else if (a == n - 1) b = n - 2;
    else b = w(a - 1) >= w(a + 1) ? a - 1 : a + 1;
    return 2.0 * std::abs(s.eigenvalues(std::max(a, b)) - s.eigenvalues(std::min(a, b)));
}

std::pair<double, double> default_gap_window(const ModelParams& p) {
    const double lc = analytic_crossing(p).lambda_c;
    return {std::max(0.0, lc - 0.2), std::min(1.0, lc + 0.2)};
}

GapResult min_gap_scan(const ModelParams& p, const HoppingGenerator& gen, double lo, double hi, int grid_points,
                       double rel_tol) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) throw std::invalid_argument("min_gap_scan: window must lie in [0,1]");
    if (grid_points < 3) throw std::invalid_argument("min_gap_scan: need at least 3 grid points");
    const EdgeStates e = build_edge_states(p);
    auto f = [&](double lam) { return edge_gap(gen(lam), e); };

    std::vector<double> xs(grid_points), fs(grid_points);
    for (int i = 0; i < grid_points; ++i) {
        xs[i] = lo + (hi - lo) * i / (grid_points - 1);
        fs[i] = f(xs[i]);
    }
    const int i0 = static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    double a = xs[std::max(0, i0 - 1)], b = xs[std::min(grid_points - 1, i0 + 1)];
    GapResult best{fs[i0], xs[i0]};

    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > rel_tol * std::max(std::abs(0.5 * (a + b)), 1e-3)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if (fc < best.delta_min) best = {fc, c};
    if (fd < best.delta_min) best = {fd, d};
    return best;
}

GapResult bare_min_gap(const ModelParams& p) {
    const auto [lo, hi] = default_gap_window(p);
    return min_gap_scan(p, [&p](double lam) { return CMat(build_hopping_matrix(p, lam).cast<cplx>()); }, lo, hi);
}

double schedule_inverse(double lam) {
    if (lam < 0.0 || lam > 1.0) throw std::invalid_argument("schedule_inverse: lambda outside [0,1]");
    // with s = 1/2 + sin(phi): lam - 1/2 = sin(3 phi)/2
    return 0.5 + std::sin(std::asin(2.0 * lam - 1.0) / 3.0);
}

}  // namespace bcd
