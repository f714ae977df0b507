#include "bcd/ed.hpp"

#include "bcd/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcd::ed {

namespace {

using Index = std::size_t;

inline double zsign(Index b, int j) { return (b >> j) & 1U ? -1.0 : 1.0; }

void check_size(int L) {
    if (L > max_sites) throw std::invalid_argument("ed: L = " + std::to_string(L) + " exceeds " + std::to_string(max_sites));
}

// Matrix-free action of H[lam] + ldot H1 on a state vector.
struct SpinGenerator {
    int L;
    RVec diag;      // -lam sum J Z Z
    double hx = 0;  // -(1 - lam)
    RVec alpha, beta;

    void apply(const CVec& x, CVec& y) const {
        const Index n = x.size();
        const cplx I(0.0, 1.0);
        y = x.cwiseProduct(diag.cast<cplx>());
        for (Index b = 0; b < n; ++b) {
            const cplx v = x(b);
            if (v == cplx(0.0)) continue;
            for (int j = 0; j < L; ++j) y(b ^ (Index{1} << j)) += hx * v;
            // Y_j|b> = i z_j |b ^ e_j>, with z the Z eigenvalue before the flip
            for (int j = 0; j < alpha.size(); ++j) {
                const int k = (j + 1) % L;
                const double zj = zsign(b, j), zk = zsign(b, k);
                y(b ^ (Index{1} << j)) += alpha(j) * I * zj * zk * v;  // Y_j Z_k
                y(b ^ (Index{1} << k)) += alpha(j) * I * zj * zk * v;  // Z_j Y_k
            }
            for (int j = 0; j < beta.size(); ++j) {
                const int k = (j + 1) % L, m = (j + 2) % L;
                const double zj = zsign(b, j), zm = zsign(b, m);
                y(b ^ (Index{1} << j) ^ (Index{1} << k)) += beta(j) * I * zj * zm * v;  // Y_j X_k Z_m
                y(b ^ (Index{1} << k) ^ (Index{1} << m)) += beta(j) * I * zj * zm * v;  // Z_j X_k Y_m
            }
        }
    }

    double norm_bound() const {
        return diag.cwiseAbs().maxCoeff() + L * std::abs(hx) + 2.0 * alpha.cwiseAbs().sum() + 2.0 * beta.cwiseAbs().sum();
    }
};

RVec zz_diagonal(const RVec& K, int L) {
    const Index n = Index{1} << L;
    RVec d = RVec::Zero(n);
    for (Index b = 0; b < n; ++b)
        for (int j = 0; j < L; ++j) d(b) += K(j) * zsign(b, j) * zsign(b, (j + 1) % L);
    return d;
}

CVec expm_apply(const SpinGenerator& g, double h, CVec y) {
    const int sub = std::max(1, static_cast<int>(std::ceil(g.norm_bound() * h / 0.5)));
    const double hs = h / sub;
    CVec term, next;
    for (int s = 0; s < sub; ++s) {
        term = y;
        for (int k = 1; k < 60; ++k) {
            g.apply(term, next);
            term = next * cplx(0.0, -hs / k);
            y += term;
            if (term.norm() <= 1e-17 * y.norm()) break;
        }
    }
    return y;
}

}  // namespace

CMat spin_hamiltonian(const RVec& couplings, double lam) {
    const int L = static_cast<int>(couplings.size());
    check_size(L);
    const Index n = Index{1} << L;
    const RVec d = zz_diagonal(couplings, L);
    CMat H = CMat::Zero(n, n);
    for (Index b = 0; b < n; ++b) {
        H(b, b) = -lam * d(b);
        for (int j = 0; j < L; ++j) H(b ^ (Index{1} << j), b) += -(1.0 - lam);
    }
    return H;
}

namespace {

// Parity sector basis (|b> + s|~b>)/sqrt2 over b with its top bit clear (L odd, so b != ~b)
CMat parity_basis(int L, double sign) {
    const Index n = Index{1} << L, all = n - 1;
    CMat B = CMat::Zero(n, n / 2);
    Index c = 0;
    for (Index b = 0; b < n; ++b) {
        if ((b >> (L - 1)) & 1U) continue;
        B(b, c) = 1.0 / std::sqrt(2.0);
        B(b ^ all, c) = sign / std::sqrt(2.0);
        ++c;
    }
    return B;
}

RVec sector_spectrum(const RVec& K, double lam, double sign) {
    const int L = static_cast<int>(K.size());
    const CMat B = parity_basis(L, sign);
    Eigen::SelfAdjointEigenSolver<CMat> es(B.adjoint() * spin_hamiltonian(K, lam) * B, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

RVec chiral_spectrum(const ModelParams& p, double lam) {
    check_size(p.L());
    const CouplingSet c = build_couplings(p);
    const RVec even = sector_spectrum(c.plain, lam, +1.0);
    const RVec odd = sector_spectrum(c.parity_flipped, lam, -1.0);
    RVec all(even.size() + odd.size());
    all << even, odd;
    std::sort(all.data(), all.data() + all.size());
    return all;
}

double even_sector_ground_energy(const ModelParams& p, double lam) {
    check_size(p.L());
    return sector_spectrum(build_couplings(p).plain, lam, +1.0)(0);
}

DriveResult evolve(const DriveSpec& spec, int n_samples) {
    const ModelParams& p = spec.params;
    p.validate();
    const int L = p.L();
    check_size(L);
    if (spec.cd_mode != CdMode::bare && spec.cd_mode != CdMode::var1 && spec.cd_mode != CdMode::var2)
        throw std::invalid_argument("ed: cd mode " + to_string(spec.cd_mode) + " has no spin-local form");
    const CouplingSet c = build_couplings(p);
    const Index dim = Index{1} << L;
    const RVec zz = zz_diagonal(c.plain, L);
    RVec kink_diag = RVec::Zero(dim), dw_diag = RVec::Zero(dim);
    for (Index b = 0; b < dim; ++b)
        for (int j = 0; j < L; ++j) {
            const double zz_j = zsign(b, j) * zsign(b, (j + 1) % L);
            kink_diag(b) += 0.5 * (1.0 - c.kink_signs(j) * zz_j);
            dw_diag(b) += 0.5 * (1.0 - zz_j);
        }

    auto observe = [&](const CVec& psi, double t, double lam) {
        const RVec w = psi.cwiseAbs2();
        SpinGenerator h{L, -lam * zz, -(1.0 - lam), RVec(), RVec()};
        CVec hp;
        h.apply(psi, hp);
        return Observation{t, lam, w.dot(kink_diag), w.dot(dw_diag), psi.dot(hp).real()};
    };

    const int n = spec.n_steps();
    const double T = spec.schedule.T;
    const double dt = T / n;
    CVec psi = CVec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));

    DriveResult res;
    res.steps = n;
    std::size_t next = 0;
    for (int k = 0; k < n; ++k) {
        const auto [lam, ldot] = spec.schedule.eval((k + 0.5) / n);
        SpinGenerator g{L, -lam * zz, -(1.0 - lam), RVec(), RVec()};
        if (spec.cd_mode == CdMode::var1) g.alpha = ldot * solve_variational_first(p, lam).alpha;
        if (spec.cd_mode == CdMode::var2) {
            const CDCoefficients cc = solve_variational_second(p, lam);
            g.alpha = ldot * cc.alpha;
            g.beta = ldot * cc.beta;
        }
        psi = expm_apply(g, dt, psi);
        while (n_samples > 0 && next < static_cast<std::size_t>(n_samples) &&
               std::llround(static_cast<double>(next + 1) * n / n_samples) == k + 1) {
            const double s = static_cast<double>(k + 1) / n;
            res.series.push_back(observe(psi, s * T, spec.schedule.eval(s).first));
            ++next;
        }
    }
    res.final_state = observe(psi, T, 1.0);
    res.unitarity_drift = std::abs(psi.norm() - 1.0);
    res.excess_energy = res.final_state.energy - even_sector_ground_energy(p, 1.0);
    return res;
}

}  // namespace bcd::ed
