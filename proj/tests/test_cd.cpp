#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcd/cd.hpp"
#include "bcd/spectrum.hpp"

#include <cmath>
#include <random>

using namespace bcd;

namespace {

double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

const ModelParams ref(20, 0.5, 0.27);

CDCoefficients symbolic(int L, int order) {
    CDCoefficients c;
    c.order = order;
    c.alpha = RVec::LinSpaced(L, 1.0, L);               // alpha_j = j
    if (order == 2) c.beta = RVec::LinSpaced(L, 11.0, 10.0 + L);  // beta_j = 10 + j
    return c;
}

}  // namespace

TEST_CASE("first-order coefficients at lambda = 0") {
    const CDCoefficients c = solve_variational_first(ref, 0.0);
    const RVec J = build_couplings(ref).plain;
    for (int j = 0; j < ref.L(); ++j) CHECK(c.alpha(j) == doctest::Approx(-J(j) / 8.0).epsilon(1e-14));
    CHECK(c.alpha(0) == doctest::Approx(-0.125));
    CHECK(c.alpha(ref.ell - 1) == doctest::Approx(-0.0625));
    CHECK(c.alpha(ref.ell) == doctest::Approx(-0.0625));
    CHECK(c.alpha(ref.L() - 1) == doctest::Approx(0.03375));
}

TEST_CASE("uniform chain reduces to a single coefficient") {
    for (double J : {0.3, 0.8, 1.0})
        for (double lam : {0.0, 0.2, 0.5, 0.9, 1.0}) {
            const CDCoefficients c = solve_variational(RVec::Constant(11, J), lam, 1);
            const double want = -J / (8.0 * ((1 - lam) * (1 - lam) + lam * lam * J * J));
            for (int j = 0; j < 11; ++j) CHECK(c.alpha(j) == doctest::Approx(want).epsilon(1e-12));
        }
}

TEST_CASE("second-order coefficients at the endpoints") {
    for (double lam : {0.0, 1.0}) {
        const CDCoefficients c2 = solve_variational_second(ref, lam);
        const CDCoefficients c1 = solve_variational_first(ref, lam);
        CHECK(c2.beta.cwiseAbs().maxCoeff() < 1e-14);
        CHECK((c2.alpha - c1.alpha).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("variational residuals and exchange symmetry at random lambda") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const ModelParams& p : {ModelParams(3, 0.5, 0.27), ref, ModelParams(7, 0.7, 0.6)})
        for (int k = 0; k < 50; ++k) {
            const double lam = u(rng);
            const int L = p.L();
            const CDCoefficients c1 = solve_variational_first(p, lam);
            const CDCoefficients c2 = solve_variational_second(p, lam);
            CHECK(variational_residual(p, c1) < 1e-10);
            CHECK(variational_residual(p, c2) < 1e-10);
            // alpha_j = alpha_{L-j}, j = 1..L-1
            for (int j = 1; j < L; ++j) {
                CHECK(std::abs(c1.alpha(j - 1) - c1.alpha(L - j - 1)) < 1e-10);
                CHECK(std::abs(c2.alpha(j - 1) - c2.alpha(L - j - 1)) < 1e-10);
            }
            // beta_j = beta_{L-j-1}, j = 1..L-2, and beta_{L-1} = beta_L
            for (int j = 1; j <= L - 2; ++j) CHECK(std::abs(c2.beta(j - 1) - c2.beta(L - j - 2)) < 1e-10);
            CHECK(std::abs(c2.beta(L - 2) - c2.beta(L - 1)) < 1e-10);
        }
}

TEST_CASE("variational solve input checks") {
    CHECK_THROWS_AS(solve_variational_first(ref, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(solve_variational_second(ref, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(solve_variational(RVec::Constant(7, 1.0), 0.5, 3), std::invalid_argument);
}

TEST_CASE("variational solution is isolated") {
    // single-coefficient perturbations leave a residual of the same order
    const CDCoefficients c = solve_variational_second(ref, 0.53);
    for (int j : {0, 5, 19, 20, 40}) {
        CDCoefficients d = c;
        d.alpha(j) += 1e-3;
        CHECK(variational_residual(ref, d) > 1e-5);
        CDCoefficients e = c;
        e.beta(j) += 1e-3;
        CHECK(variational_residual(ref, e) > 1e-5);
    }
}

TEST_CASE("first-order Gamma matrix matches the seven-site display") {
    const cplx I(0.0, 1.0);
    const CDCoefficients c = symbolic(7, 1);
    auto a = [&](int j) { return c.alpha(j - 1); };
    CMat want = CMat::Zero(7, 7);
    auto set = [&](int i, int j, cplx v) { want(i - 1, j - 1) = v; };
    set(1, 2, -I * a(7));
    set(1, 3, -I * a(1));
    set(2, 1, I * a(7));
    set(2, 4, I * a(1));
    set(3, 1, I * a(1));
    set(3, 5, -I * a(2));
    set(4, 2, -I * a(1));
    set(4, 6, I * a(2));
    set(5, 3, I * a(2));
    set(5, 7, -I * a(3));
    set(6, 4, -I * a(2));
    set(6, 7, I * a(3));
    set(7, 5, I * a(3));
    set(7, 6, -I * a(3));
    CHECK(max_abs(build_variational_gamma(c) - want) == 0.0);
}

TEST_CASE("second-order Gamma matrix matches the seven-site display") {
    const cplx I(0.0, 1.0);
    CDCoefficients c = symbolic(7, 2);
    c.alpha.setZero();
    auto b = [&](int j) { return c.beta(j - 1); };
    CMat want = CMat::Zero(7, 7);
    auto set = [&](int i, int j, cplx v) { want(i - 1, j - 1) = v; };
    set(1, 4, -I * b(6));
    set(1, 5, -I * b(1));
    set(2, 3, I * b(7));
    set(2, 6, I * b(1));
    set(3, 2, -I * b(7));
    set(3, 7, -I * b(2));
    set(4, 1, I * b(6));
    set(4, 7, I * b(2));
    set(5, 1, I * b(1));
    set(5, 6, -I * b(3));
    set(6, 2, -I * b(1));
    set(6, 5, I * b(3));
    set(7, 3, I * b(2));
    set(7, 4, -I * b(2));
    CHECK(max_abs(build_variational_gamma(c) - want) == 0.0);
}

TEST_CASE("variational Gamma matrices are Hermitian and purely imaginary") {
    for (int order : {1, 2}) {
        const CDCoefficients zero = [&] {
            CDCoefficients z = symbolic(9, order);
            z.alpha.setZero();
            if (order == 2) z.beta.setZero();
            return z;
        }();
        CHECK(max_abs(build_variational_gamma(zero)) == 0.0);
        CHECK(max_abs(build_variational_bdg(zero).full()) == 0.0);
        const CMat A = build_variational_gamma(order == 1 ? solve_variational_first(ref, 0.4)
                                                          : solve_variational_second(ref, 0.4));
        CHECK(max_abs(A - A.adjoint()) == 0.0);
        CHECK(A.real().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("variational BdG blocks") {
    const cplx I(0.0, 1.0);
    const CDCoefficients c1 = symbolic(5, 1);
    const BdGMatrix m1 = build_variational_bdg(c1);
    CHECK(max_abs(m1.hpm) == 0.0);
    CHECK(max_abs(m1.hpp + m1.hpp.transpose()) == 0.0);
    for (int j = 0; j < 4; ++j) CHECK(m1.hpp(j, j + 1) == -I * c1.alpha(j));
    CHECK(m1.hpp(0, 4) == -I * c1.alpha(4));  // corner (1, L)

    const CDCoefficients c2 = symbolic(7, 2);
    const BdGMatrix m2 = build_variational_bdg(c2);
    for (int j = 0; j < 5; ++j) CHECK(m2.hpp(j, j + 2) == -I * c2.beta(j));
    CHECK(m2.hpp(0, 5) == -I * c2.beta(5));  // corner (1, L-1)
    CHECK(m2.hpp(1, 6) == -I * c2.beta(6));  // corner (2, L)
    CHECK(m2.hpp(0, 6) == -I * c2.alpha(6));
}

TEST_CASE("BdG and Gamma forms of the variational term agree") {
    for (int ell : {2, 3, 8})
        for (double lam : {0.1, 0.5, 0.9}) {
            const ModelParams p(ell, 0.5, 0.27);
            for (const CDCoefficients& c : {solve_variational_first(p, lam), solve_variational_second(p, lam)}) {
                double constant = 1.0;
                const BdGMatrix via = gamma_to_bdg(2.0 * build_variational_gamma(c), &constant);
                const BdGMatrix direct = build_variational_bdg(c);
                CHECK(max_abs(via.hpm - direct.hpm) < 1e-14);
                CHECK(max_abs(via.hpp - direct.hpp) < 1e-14);
                CHECK(std::abs(constant) < 1e-14);
            }
        }
}

TEST_CASE("exact single-particle gauge potential") {
    const ModelParams p(8, 0.5, 0.27);
    for (double lam : {1e-3, 0.3, 0.538, 0.8, 1.0 - 1e-3}) {
        const CMat A = exact_agp_single_particle(p, lam);
        CHECK(max_abs(A - A.adjoint()) < 1e-12);
        const SpectrumData s = eigendecompose_sorted(build_hopping_matrix(p, lam));
        const CMat a = s.eigenvectors.adjoint() * A * s.eigenvectors;
        const CMat d = s.eigenvectors.adjoint() * hopping_derivative(p).cast<cplx>() * s.eigenvectors;
        for (int m = 0; m < p.L(); ++m) {
            CHECK(std::abs(a(m, m)) < 1e-10);
            for (int n = 0; n < p.L(); ++n)
                if (m != n)
                    CHECK(std::abs(a(m, n) * (s.eigenvalues(n) - s.eigenvalues(m)) - cplx(0, 1) * d(m, n)) < 1e-10);
        }
    }
    // both endpoint spectra are degenerate (decoupled dimers), so the denominators vanish
    CHECK_THROWS_AS(exact_agp_single_particle(p, 0.0), std::runtime_error);
    CHECK_THROWS_AS(exact_agp_single_particle(p, 1.0), std::runtime_error);
    CHECK_THROWS_AS(exact_agp_single_particle(p, 0.5, 10.0), std::runtime_error);
}

TEST_CASE("exact gauge potential generates parallel transport") {
    // d/dlam |n> = -i A |n> up to phase: compare the finite-difference eigenprojector derivative
    const ModelParams p(6, 0.5, 0.27);
    const double lam = 0.4, h = 1e-5;
    const SpectrumData a = eigendecompose_sorted(build_hopping_matrix(p, lam - h));
    const SpectrumData b = eigendecompose_sorted(build_hopping_matrix(p, lam + h));
    const CMat A = exact_agp_single_particle(p, lam);
    for (int n = 0; n < p.L(); ++n) {
        const CMat Pa = a.eigenvectors.col(n) * a.eigenvectors.col(n).adjoint();
        const CMat Pb = b.eigenvectors.col(n) * b.eigenvectors.col(n).adjoint();
        const CMat dP = (Pb - Pa) / (2 * h);
        const SpectrumData s = eigendecompose_sorted(build_hopping_matrix(p, lam));
        const CMat P = s.eigenvectors.col(n) * s.eigenvectors.col(n).adjoint();
        const CMat comm = cplx(0, -1) * (A * P - P * A);
        CHECK(max_abs(dP - comm) < 1e-6);
    }
}

TEST_CASE("QBCD term structure") {
    for (QbcdForm form : {QbcdForm::closed, QbcdForm::numeric}) {
        const QBCDTerm q = build_qbcd(ModelParams(20, 0.5, 0.27), form);
        const CMat& G = q.gamma_matrix;
        CHECK(max_abs(G - G.adjoint()) < 1e-14);
        Eigen::SelfAdjointEigenSolver<CMat> es(G);
        int nonzero = 0;
        for (int k = 0; k < G.rows(); ++k)
            if (std::abs(es.eigenvalues()(k)) > 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff()) ++nonzero;
        CHECK(nonzero == 2);
        const double r = q.matrix_element / q.gap_estimate;
        const CVec L = q.edges.psiL.cast<cplx>(), R = q.edges.psiR.cast<cplx>();
        const double ov = q.edges.psiL.dot(q.edges.psiR);
        const CVec GL = G * L;
        CHECK((GL - cplx(0, r) * R).norm() <= std::abs(r) * std::abs(ov) * (1 + 1e-12));
        CHECK(hs_cost(G) == doctest::Approx(2 * r * r * (1 - ov * ov)).epsilon(1e-12));
        CHECK(hs_cost(G) == doctest::Approx(2 * r * r).epsilon(0.05));
        CHECK(q.lambda_c == analytic_crossing(ModelParams(20, 0.5, 0.27)).lambda_c);
        // built once: repeated construction is bit-identical
        const QBCDTerm again = build_qbcd(ModelParams(20, 0.5, 0.27), form);
        CHECK((again.gamma_matrix.array() == G.array()).all());
    }
}

TEST_CASE("QBCD closed forms agree with the direct sandwiches") {
    for (int ell : {20, 30, 40, 80}) {
        const ModelParams p(ell, 0.5, 0.27);
        const double lc = analytic_crossing(p).lambda_c;
        const double mc = qbcd_matrix_element(p, lc, QbcdForm::closed);
        const double mn = qbcd_matrix_element(p, lc, QbcdForm::numeric);
        const double gc = qbcd_gap_estimate(p, lc, QbcdForm::closed);
        const double gn = qbcd_gap_estimate(p, lc, QbcdForm::numeric);
        CHECK(mc == doctest::Approx(mn).epsilon(1e-10));
        CHECK(gc == doctest::Approx(gn).scale(std::abs(mn)).epsilon(1e-10));
        if (ell == 30) CHECK(std::abs(mc - mn) < 5e-4 * std::abs(mn));
    }
    // the variant with the squared boundary factor departs from the sandwich
    const ModelParams p(30, 0.5, 0.27);
    const double lc = analytic_crossing(p).lambda_c;
    CHECK(std::abs(qbcd_matrix_element(p, lc, QbcdForm::closed_squared) - qbcd_matrix_element(p, lc, QbcdForm::numeric)) >
          1e-3 * std::abs(qbcd_matrix_element(p, lc, QbcdForm::numeric)));
}

TEST_CASE("Hilbert-Schmidt costs") {
    CHECK(hs_cost(CMat::Zero(5, 5)) == 0.0);
    CHECK(time_averaged_cost([](double) { return CMat(CMat::Zero(3, 3)); }, 100) == 0.0);
    CHECK_THROWS_AS(time_averaged_cost([](double) { return CMat(CMat::Zero(3, 3)); }, 99), std::invalid_argument);
    // midpoint rule on a quadratic integrand: int_0^1 (s)^2 ds with n points
    const double avg = time_averaged_cost([](double s) { return CMat(CMat::Constant(1, 1, s)); }, 200);
    CHECK(avg == doctest::Approx(1.0 / 3.0 - 1.0 / (12.0 * 200 * 200)).epsilon(1e-12));

    // first order at lambda = 0: alpha_j = -J_j / 8
    const RVec J = build_couplings(ref).plain;
    double want = 0.0;
    for (int n = 0; n < ref.ell; ++n) want += 4.0 * std::pow(J(n) / 8.0, 2);
    want += 2.0 * std::pow(J(ref.L() - 1) / 8.0, 2);
    CHECK(hs_cost(build_variational_gamma(solve_variational_first(ref, 0.0))) == doctest::Approx(want).epsilon(1e-12));

    // the count is exact at every lambda
    for (double lam : {0.2, 0.5, 0.7}) {
        const CDCoefficients c = solve_variational_first(ref, lam);
        double w = 2.0 * c.alpha(ref.L() - 1) * c.alpha(ref.L() - 1);
        for (int n = 0; n < ref.ell; ++n) w += 4.0 * c.alpha(n) * c.alpha(n);
        CHECK(hs_cost(build_variational_gamma(c)) == doctest::Approx(w).epsilon(1e-12));
    }

    // linear growth in L at fixed lambda
    for (int order : {1, 2}) {
        auto cost = [&](int ell) {
            const ModelParams p(ell, 0.5, 0.27);
            return hs_cost(build_variational_gamma(order == 1 ? solve_variational_first(p, 0.5)
                                                              : solve_variational_second(p, 0.5)));
        };
        CHECK(cost(80) / cost(40) == doctest::Approx(2.0).epsilon(0.05));
    }
}
