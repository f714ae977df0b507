#include "bcd/dynamics.hpp"

#include "bcd/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace bcd {

std::string to_string(CdMode m) {
    switch (m) {
        case CdMode::bare: return "bare";
        case CdMode::var1: return "var1";
        case CdMode::var2: return "var2";
        case CdMode::qbcd: return "qbcd";
        case CdMode::exact_agp: return "exact_agp";
    }
    return "unknown";
}

CdMode cd_mode_from_string(const std::string& s) {
    if (s == "bare") return CdMode::bare;
    if (s == "var1") return CdMode::var1;
    if (s == "var2") return CdMode::var2;
    if (s == "qbcd") return CdMode::qbcd;
    if (s == "exact_agp") return CdMode::exact_agp;
    throw std::invalid_argument("unknown cd mode '" + s + "' (expected bare, var1, var2, qbcd, exact_agp)");
}

std::string to_string(Stepper s) {
    switch (s) {
        case Stepper::automatic: return "auto";
        case Stepper::bdg: return "bdg";
        case Stepper::gamma: return "gamma";
    }
    return "unknown";
}

Stepper stepper_from_string(const std::string& s) {
    if (s == "auto") return Stepper::automatic;
    if (s == "bdg") return Stepper::bdg;
    if (s == "gamma") return Stepper::gamma;
    throw std::invalid_argument("unknown stepper '" + s + "' (expected auto, bdg, gamma)");
}

double DriveSpec::effective_dt() const {
    const double T = schedule.T;
    const double d = dt > 0.0 ? dt : std::min(0.01, T / 1000.0);
    if (d >= T) throw std::invalid_argument("DriveSpec: dt must be smaller than T");
    return d;
}

int DriveSpec::n_steps() const { return static_cast<int>(std::ceil(schedule.T / effective_dt() - 1e-9)); }

double unitarity_drift(const CMat& V) {
    return (V.adjoint() * V - CMat::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
}

// ---------- observables ----------

CMat correlations_from_propagator(const CMat& V) {
    const int L = static_cast<int>(V.rows()) / 2;
    // <c_i c_i^dag> = 1 in the initial vacuum
    return V.leftCols(L) * V.rightCols(L).transpose();
}

CMat correlations_from_orbitals(const CMat& phi) {
    const int L = static_cast<int>(phi.rows());
    const CMat W = gamma_creation_map(L);
    CMat U2(2 * L, 2 * L);
    U2.topRows(L) = W;
    // G- = conj(W) S Psi
    U2.bottomRows(L).leftCols(L) = W.conjugate().rightCols(L);
    U2.bottomRows(L).rightCols(L) = W.conjugate().leftCols(L);
    const CMat G = phi.conjugate() * phi.transpose();  // <G+_i G-_j>
    CMat C = CMat::Zero(2 * L, 2 * L);
    C.topRightCorner(L, L) = G;
    C.bottomLeftCorner(L, L) = CMat::Identity(L, L) - G.transpose();
    return U2.adjoint() * C * U2.conjugate();
}

double bond_contraction(const CMat& R, const RVec& signs) {
    const int L = static_cast<int>(R.rows()) / 2;
    double acc = 0.0;
    for (int j = 0; j < L; ++j) {
        const int k = (j + 1) % L;
        const cplx t = R(L + j, L + k) + R(L + j, k) - R(j, L + k) - R(j, k);
        acc += signs(j) * t.real();
    }
    return acc;
}

namespace {

// The fermionic bond operator of the last bond carries an extra sign relative to
// Z_L Z_1 in the even-parity sector.
RVec parity_signs(const CouplingSet& c) {
    return c.parity_flipped.cwiseQuotient(c.plain);
}

}  // namespace

double kink_number(const CMat& R, const CouplingSet& c) {
    const int L = static_cast<int>(R.rows()) / 2;
    return 0.5 * L - 0.5 * bond_contraction(R, c.kink_signs.cwiseProduct(parity_signs(c)));
}

double domain_wall_number(const CMat& R, const CouplingSet& c) {
    const int L = static_cast<int>(R.rows()) / 2;
    return 0.5 * L - 0.5 * bond_contraction(R, parity_signs(c));
}

double energy_expectation(const CMat& R, const ModelParams& p, double lam) {
    const int L = p.L();
    const CouplingSet c = build_couplings(p);
    double n = 0.0;
    for (int j = 0; j < L; ++j) n += R(L + j, j).real();
    return -lam * bond_contraction(R, c.parity_flipped) + 2.0 * (1.0 - lam) * n - (1.0 - lam) * L;
}

double kink_number(const Propagator& V, const CouplingSet& c) {
    return kink_number(correlations_from_propagator(V.V), c);
}

double energy_expectation(const Propagator& V, const ModelParams& p, double lam) {
    return energy_expectation(correlations_from_propagator(V.V), p, lam);
}

double excess_energy(const Propagator& V, const ModelParams& p) {
    return energy_expectation(V, p, 1.0) - ground_state_energy(p, 1.0);
}

// ---------- generators ----------

namespace {

struct StepContext {
    const DriveSpec& spec;
    std::optional<QBCDTerm> qbcd;
    CMat qbcd_bdg;  // full 2L x 2L Dirac form of the fixed QBCD term

    explicit StepContext(const DriveSpec& s) : spec(s) {
        if (s.cd_mode == CdMode::qbcd) {
            qbcd = build_qbcd(s.params, s.qbcd_form);
            qbcd_bdg = gamma_to_bdg(qbcd->gamma_matrix).full();
        }
    }

    // Dirac matrix M with H + lambda_dot H1 = Psi^dag M Psi
    CMat bdg_generator(double lam, double ldot) const {
        CMat M = build_bdg_hamiltonian(spec.params, lam).full();
        switch (spec.cd_mode) {
            case CdMode::bare: break;
            case CdMode::var1:
                M += ldot * build_variational_bdg(solve_variational_first(spec.params, lam)).full();
                break;
            case CdMode::var2:
                M += ldot * build_variational_bdg(solve_variational_second(spec.params, lam)).full();
                break;
            case CdMode::qbcd: M += ldot * qbcd_bdg; break;
            case CdMode::exact_agp:
                M += ldot * gamma_to_bdg(exact_agp_single_particle(spec.params, lam)).full();
                break;
        }
        return M;
    }
};

// Single-particle Gamma generator G = banded + dense + U V^dag.
struct GammaGenerator {
    int bw = 0;
    CMat band;    // band(i, bw + k) = G(i, i + k)
    CMat D;       // may be empty
    CMat Ul, Vl;  // may be empty

    void set_banded(const CMat& G) {
        const int L = static_cast<int>(G.rows());
        bw = 0;
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                if (G(i, j) != cplx(0.0)) bw = std::max(bw, std::abs(i - j));
        band = CMat::Zero(L, 2 * bw + 1);
        for (int i = 0; i < L; ++i)
            for (int k = -bw; k <= bw; ++k)
                if (i + k >= 0 && i + k < L) band(i, bw + k) = G(i, i + k);
    }

    void apply(const CMat& x, CMat& y) const {
        const int L = static_cast<int>(x.rows());
        y.noalias() = band.col(bw).asDiagonal() * x;
        for (int k = 1; k <= bw; ++k) {
            y.topRows(L - k).noalias() += band.col(bw + k).head(L - k).asDiagonal() * x.bottomRows(L - k);
            y.bottomRows(L - k).noalias() += band.col(bw - k).tail(L - k).asDiagonal() * x.topRows(L - k);
        }
        if (D.size()) y.noalias() += D * x;
        if (Ul.size()) y.noalias() += Ul * (Vl.adjoint() * x);
    }

    double norm_bound() const {
        double b = band.cwiseAbs().rowwise().sum().maxCoeff();
        if (D.size()) b += D.cwiseAbs().rowwise().sum().maxCoeff();
        for (int k = 0; k < Ul.cols(); ++k) b += Ul.col(k).norm() * Vl.col(k).norm();
        return b;
    }
};

GammaGenerator gamma_generator(const StepContext& ctx, double lam, double ldot) {
    const ModelParams& p = ctx.spec.params;
    CMat G = 2.0 * build_hopping_matrix(p, lam).cast<cplx>();
    GammaGenerator g;
    switch (ctx.spec.cd_mode) {
        case CdMode::bare: break;
        case CdMode::var1:
            G += 2.0 * ldot * build_variational_gamma(solve_variational_first(p, lam));
            break;
        case CdMode::var2:
            G += 2.0 * ldot * build_variational_gamma(solve_variational_second(p, lam));
            break;
        case CdMode::qbcd: {
            // i r (|R><L| - |L><R|) as a rank-2 product
            const QBCDTerm& q = *ctx.qbcd;
            const double r = ldot * q.matrix_element / q.gap_estimate;
            const int L = p.L();
            g.Ul.resize(L, 2);
            g.Vl.resize(L, 2);
            g.Ul.col(0) = cplx(0.0, r) * q.edges.psiR.cast<cplx>();
            g.Ul.col(1) = cplx(0.0, -r) * q.edges.psiL.cast<cplx>();
            g.Vl.col(0) = q.edges.psiL.cast<cplx>();
            g.Vl.col(1) = q.edges.psiR.cast<cplx>();
            break;
        }
        case CdMode::exact_agp: g.D = ldot * exact_agp_single_particle(p, lam); break;
    }
    g.set_banded(G);
    return g;
}

// exp(-i G h) x by Taylor series, substepped so each series sees ||G h|| <= 1/2
void taylor_expm_apply(const GammaGenerator& g, double h, CMat& y, CMat& term, CMat& next) {
    const int sub = std::max(1, static_cast<int>(std::ceil(g.norm_bound() * h / 0.5)));
    const double hs = h / sub;
    for (int s = 0; s < sub; ++s) {
        term = y;
        for (int k = 1; k < 60; ++k) {
            g.apply(term, next);
            term = next * cplx(0.0, -hs / k);
            y += term;
            if (term.norm() <= 1e-17 * y.norm()) break;
        }
    }
}

std::vector<int> sample_steps(int n, int n_samples) {
    std::vector<int> out;
    for (int k = 1; k <= n_samples; ++k) out.push_back(static_cast<int>(std::llround(static_cast<double>(k) * n / n_samples)));
    return out;
}

Stepper resolve(const DriveSpec& spec) {
    if (spec.stepper != Stepper::automatic) return spec.stepper;
    return spec.params.L() <= 25 ? Stepper::bdg : Stepper::gamma;
}

Observation observe(const CMat& R, const ModelParams& p, const CouplingSet& c, double t, double lam) {
    return {t, lam, kink_number(R, c), domain_wall_number(R, c), energy_expectation(R, p, lam)};
}

}  // namespace

Propagator propagate(const DriveSpec& spec) {
    spec.params.validate();
    const StepContext ctx(spec);
    const int n = spec.n_steps();
    const double dt = spec.schedule.T / n;
    const int L2 = 2 * spec.params.L();
    Propagator out{CMat::Identity(L2, L2), spec.schedule.T, n};
    for (int k = 0; k < n; ++k) {
        const auto [lam, ldot] = spec.schedule.eval((k + 0.5) / n);
        Eigen::SelfAdjointEigenSolver<CMat> es(ctx.bdg_generator(lam, ldot));
        const CVec ph = (es.eigenvalues() * (-2.0 * dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
        out.V = es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * out.V));
    }
    return out;
}

DriveResult run_drive(const DriveSpec& spec, int n_samples) {
    spec.params.validate();
    const StepContext ctx(spec);
    const ModelParams& p = spec.params;
    const CouplingSet c = build_couplings(p);
    const int n = spec.n_steps();
    const double T = spec.schedule.T;
    const double dt = T / n;
    const std::vector<int> marks = sample_steps(n, n_samples);
    std::size_t next = 0;

    DriveResult res;
    res.steps = n;
    res.stepper_used = resolve(spec);

    if (res.stepper_used == Stepper::bdg) {
        const int L2 = 2 * p.L();
        CMat V = CMat::Identity(L2, L2);
        for (int k = 0; k < n; ++k) {
            const auto [lam, ldot] = spec.schedule.eval((k + 0.5) / n);
            Eigen::SelfAdjointEigenSolver<CMat> es(ctx.bdg_generator(lam, ldot));
            const CVec ph = (es.eigenvalues() * (-2.0 * dt)).unaryExpr([](double a) { return std::polar(1.0, a); });
            V = es.eigenvectors() * (ph.asDiagonal() * (es.eigenvectors().adjoint() * V));
            while (next < marks.size() && marks[next] == k + 1) {
                const double s = static_cast<double>(k + 1) / n;
                res.series.push_back(observe(correlations_from_propagator(V), p, c, s * T, spec.schedule.eval(s).first));
                ++next;
            }
        }
        res.final_state = observe(correlations_from_propagator(V), p, c, T, 1.0);
        res.unitarity_drift = unitarity_drift(V);
    } else {
        const SpectrumData s0 = eigendecompose_sorted(build_hopping_matrix(p, 0.0));
        CMat phi = s0.eigenvectors.leftCols(p.ell + 1);
        CMat tbuf, nbuf;
        for (int k = 0; k < n; ++k) {
            const auto [lam, ldot] = spec.schedule.eval((k + 0.5) / n);
            taylor_expm_apply(gamma_generator(ctx, lam, ldot), dt, phi, tbuf, nbuf);
            while (next < marks.size() && marks[next] == k + 1) {
                const double s = static_cast<double>(k + 1) / n;
                res.series.push_back(observe(correlations_from_orbitals(phi), p, c, s * T, spec.schedule.eval(s).first));
                ++next;
            }
        }
        res.final_state = observe(correlations_from_orbitals(phi), p, c, T, 1.0);
        res.unitarity_drift = unitarity_drift(phi);
    }
    res.excess_energy = res.final_state.energy - ground_state_energy(p, 1.0);
    return res;
}

DriveResult run_drive_converged(const DriveSpec& spec, int n_samples, double tol, double* shift) {
    const DriveResult coarse = run_drive(spec, n_samples);
    DriveSpec fine_spec = spec;
    fine_spec.dt = 0.5 * spec.schedule.T / spec.n_steps();
    const DriveResult fine = run_drive(fine_spec, n_samples);
    const double d = std::max({std::abs(coarse.final_state.kinks - fine.final_state.kinks),
                               std::abs(coarse.final_state.domain_walls - fine.final_state.domain_walls),
                               std::abs(coarse.final_state.energy - fine.final_state.energy)});
    if (shift) *shift = d;
    if (d > tol)
        throw std::runtime_error("run_drive_converged: halving dt moved the final observables by " + std::to_string(d) +
                                 " (T = " + std::to_string(spec.schedule.T) + ", dt = " + std::to_string(spec.effective_dt()) + ")");
    return fine;
}

}  // namespace bcd
