#include "fujita/closed_forms.hpp"
#include "fujita/initial_data.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fujita;

TEST_CASE("majorant examples")
{
    CHECK(majorant_value(MajorantSpec<double>{2.0, 1.0}, 0.0) == doctest::Approx(1.0));
    CHECK(majorant_value(MajorantSpec<double>{2.0, 1.0}, 0.5) == doctest::Approx(2.0));
    CHECK(MajorantSpec<double>{1.4, 1.0}.t0() == doctest::Approx(2.5));
    CHECK_THROWS_AS(majorant_value(MajorantSpec<double>{2.0, 1.0}, 1.0), BlowUpDomainError);
    CHECK_THROWS_AS(majorant_value(MajorantSpec<double>{1.0, 1.0}, 0.1), DomainError);
}

TEST_CASE("majorant solves z' = z^p")
{
    const MajorantSpec<long double> spec{2.5L, 0.8L};
    const long double h = 1e-6L;
    for (long double t : {0.1L, 0.3L, 0.6L, 0.9L}) {
        const long double dz = (majorant_value(spec, t + h) - majorant_value(spec, t - h)) / (2 * h);
        CHECK(oracle::relative_error(dz, std::pow(majorant_value(spec, t), spec.p)) < 1e-8);
        CHECK(oracle::relative_error(majorant_value(spec, t), oracle::majorant(spec.p, spec.z0, t)) < 1e-15);
    }
}

TEST_CASE("barrier constants")
{
    const auto c33 = supersolution_constants(3, 3.0);
    CHECK(c33.A == doctest::Approx(0.5));
    CHECK(c33.gamma == doctest::Approx(0.5));
    const auto c32 = supersolution_constants(3, 2.0);
    CHECK(c32.A == doctest::Approx(0.25));
    CHECK(c32.gamma == doctest::Approx(1.0));
    const auto c14 = supersolution_constants(1, 4.0);
    CHECK(c14.gamma == doctest::Approx(1.0 / 3.0));
    CHECK(c14.A == doctest::Approx(0.27517).epsilon(1e-4));
    CHECK_THROWS_AS(supersolution_constants(3, 1.5), UnsupportedExponent);
    CHECK_THROWS_AS(supersolution_constants(2, 2.0), UnsupportedExponent);
    CHECK_THROWS_AS(supersolution_constants(1, 3.0), UnsupportedExponent);
}

TEST_CASE("U evaluation examples")
{
    const auto U = UBarrier<double>::make(3, 3.0, Eigen::Vector3d(0.3, -0.2, 1.0));
    CHECK(eval_U(U, Eigen::VectorXd(-U.mu), 0.0) == doctest::Approx(U.A));
    const auto U0 = UBarrier<double>::make(3, 3.0);
    CHECK(eval_U(U0, Eigen::VectorXd(Eigen::Vector3d(2.0, 0.0, 0.0)), 0.0) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(eval_U(U0, Eigen::VectorXd(Eigen::Vector3d(2.0, 0.0, 0.0)), 0.0) == doctest::Approx(0.183940).epsilon(1e-6));
}

TEST_CASE("U derivative formulas match long double finite differences")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coord(-4.0, 4.0), time(0.0, 10.0);
    for (auto [N, p] : {std::pair{1, 4.0}, std::pair{2, 2.5}, std::pair{3, 3.0}}) {
        Eigen::VectorXd mu(N);
        for (int j = 0; j < N; ++j)
            mu[j] = coord(rng) / 4.0;
        const auto U = UBarrier<double>::make(N, p, mu);
        const auto UL = oracle::widen(U);
        for (int k = 0; k < 20; ++k) {
            Eigen::VectorXd x(N), nu(N);
            for (int j = 0; j < N; ++j) {
                x[j] = coord(rng);
                nu[j] = coord(rng);
            }
            nu.normalize();
            const double t = time(rng);
            const oracle::LVec xl = x.cast<long double>();
            const long double tl = t;
            CHECK(oracle::relative_error(oracle::fd_time(UL, xl, tl), eval_U_time_derivative(UL, xl, tl)) < 1e-6);
            CHECK(oracle::relative_error(oracle::fd_laplacian(UL, xl, tl), eval_U_laplacian(UL, xl, tl)) < 1e-6);
            const oracle::LVec nul = nu.cast<long double>();
            CHECK(oracle::relative_error(oracle::fd_directional(UL, xl, nul, tl),
                                         eval_U_normal_derivative(UL, xl, nul, tl)) < 1e-6);
        }
    }
}

TEST_CASE("heat-operator identity for U")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coord(-6.0, 6.0), time(0.0, 50.0);
    const auto U = UBarrier<double>::make(3, 2.0, Eigen::Vector3d(0.1, 0.2, -0.3));
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector3d x(coord(rng), coord(rng), coord(rng));
        const double t = time(rng);
        const double lhs = eval_U_time_derivative(U, Eigen::VectorXd(x), t) - eval_U_laplacian(U, Eigen::VectorXd(x), t);
        const double rhs = (U.N - 2.0 * U.gamma) / (2.0 * (t + 1.0)) * eval_U(U, Eigen::VectorXd(x), t);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("interior residual examples")
{
    const auto U = UBarrier<double>::make(3, 3.0);
    CHECK(interior_residual_U(U, Eigen::VectorXd(Eigen::Vector3d::Zero()), 0.0) == doctest::Approx(0.375));
    const double far = interior_residual_U(U, Eigen::VectorXd(Eigen::Vector3d(30.0, 0.0, 0.0)), 0.0);
    CHECK(far >= 0.0);
    CHECK(far < 1e-90);
}

TEST_CASE("boundary normal derivative and residual on the unit ball")
{
    const auto U = UBarrier<double>::make(3, 3.0);
    const Eigen::VectorXd x = Eigen::Vector3d(1.0, 0.0, 0.0);
    const Eigen::VectorXd nu = outward_normal(RadialExterior{3, 1.0}, x);
    CHECK(eval_U_normal_derivative(U, x, nu, 0.0) == doctest::Approx(0.5 * eval_U(U, x, 0.0)));
    CHECK(boundary_residual_U(U, x, nu, 0.0, 0.0) == doctest::Approx(eval_U_normal_derivative(U, x, nu, 0.0)));

    // sigma = 0.2 satisfies (x+mu).nu = -1 < -0.6; the residual keeps its sign for all t
    CHECK(mu_admissible<double>(x, nu, U.mu, 0.2, 3));
    for (int k = 0; k <= 1000; ++k)
        CHECK(boundary_residual_U(U, x, nu, 0.2, 0.1 * k) >= 0.0);
    // sigma = 0.5 fails the predicate: -1 > -1.5
    CHECK_FALSE(mu_admissible<double>(x, nu, U.mu, 0.5, 3));
    CHECK_THROWS_AS(boundary_residual_U(U, x, nu, -0.1, 0.0), DomainError);
}

TEST_CASE("admissibility predicates")
{
    const Eigen::VectorXd y = Eigen::Vector3d(1.0, 0.0, 0.0);
    const Eigen::VectorXd nu = Eigen::Vector3d(-1.0, 0.0, 0.0);
    const Eigen::VectorXd mu = Eigen::Vector3d::Zero();
    CHECK(mu_admissible<double>(y, nu, mu, 0.2, 3));
    CHECK_FALSE(mu_admissible<double>(y, nu, mu, 0.5, 3));
    CHECK(mu_admissible<double>(y, nu, mu, 0.0, 3));
    CHECK_THROWS_AS(mu_admissible<double>(y, Eigen::VectorXd(2.0 * nu), mu, 0.2, 3), DomainError);

    CHECK(ball_admissible(4.0, 1.0, 3));
    CHECK_FALSE(ball_admissible(3.0, 1.0, 3));
    CHECK(ball_admissible(0.1, 0.0, 3));

    CHECK(dim1_admissible(-1.0, 1.0, 0.7, -0.7, 0.3));
    CHECK(dim1_admissible(-1.0, 1.0, 0.0, 0.0, 0.0));
    CHECK_FALSE(dim1_admissible(-1.0, 1.0, 0.8, -0.7, 0.3));

    const auto report = admissibility_report({Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)},
                                             {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)},
                                             Eigen::VectorXd::Constant(1, 0.8), 0.3, 1);
    CHECK(report.pointwise == std::vector<bool>{false, true});
    CHECK(report.admissible == std::vector<std::size_t>{1});
    CHECK_FALSE(report.all);
}

TEST_CASE("two-ray barrier")
{
    const auto V = VBarrier<double>::make(-1.0, 1.0, 0.7, -0.7, 4.0);
    CHECK_THROWS_AS(eval_V(V, 0.0, 0.0), DomainError);
    CHECK(eval_V(V, -1.0, 0.0) == doctest::Approx(V.A * std::exp(-0.09 / 4.0)));
    CHECK(eval_V(V, 1.0, 0.0) == doctest::Approx(V.A * std::exp(-0.09 / 4.0)));
    for (int k = 0; k <= 200; ++k) {
        const double t = 0.5 * k;
        CHECK(boundary_residual_V(V, -1.0, 0.3, t) >= 0.0);
        CHECK(boundary_residual_V(V, 1.0, 0.3, t) >= 0.0);
        CHECK(interior_residual_V(V, -1.0 - 0.1 * k, t) >= 0.0);
    }
    CHECK_THROWS_AS(VBarrier<double>::make(-1.0, 1.0, 0.0, 0.0, 3.0), UnsupportedExponent);
}

TEST_CASE("psi hypotheses")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 1000);
    SUBCASE("zero passes")
    {
        const Field zero{Eigen::VectorXd::Zero(g.size()), 0.0};
        const auto r = check_psi_hypotheses(zero, g, 3.0);
        CHECK(r.pass);
        CHECK(r.min_residual == 0.0);
    }
    SUBCASE("c/r holds on un-ramped interior nodes but pushes flux out of the boundary")
    {
        const Field psi = make_initial_field(HarmonicData{1.0}, g, 3.0);
        const auto r = check_psi_hypotheses(psi, g, 3.0);
        for (Eigen::Index i = 1; i < g.size() - 1; ++i)
            if (g.distance(i + 1) <= 0.9 * g.length())
                CHECK(r.residual[i] >= 0.0);
        CHECK_FALSE(r.boundary_compatible);
        CHECK_FALSE(r.pass);
    }
    SUBCASE("steep Gaussian bump fails on its flanks")
    {
        const Field psi = make_initial_field(GaussianData{1.0, 0.3, 3.0}, g, 3.0);
        const auto r = check_psi_hypotheses(psi, g, 3.0);
        CHECK_FALSE(r.interior_pass);
        CHECK_FALSE(r.violations.empty());
    }
    SUBCASE("Lane-Emden profile passes")
    {
        const Field psi = make_initial_field(LaneEmdenData{1.0, 0.5}, g, 3.0);
        const auto r = check_psi_hypotheses(psi, g, 3.0);
        CHECK(r.pass);
        CHECK(r.min_boundary_flux >= -1e-12);
    }
    CHECK_THROWS_AS(check_psi_hypotheses(Field{Eigen::VectorXd::Constant(g.size(), -1.0), 0.0}, g, 3.0), DomainError);
}
