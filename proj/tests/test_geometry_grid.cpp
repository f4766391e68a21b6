#include "fujita/domain.hpp"

#include <doctest.h>

#include <cmath>

using namespace fujita;

TEST_CASE("radial grid covers [R0, R0 + L] with M + 1 nodes")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 100);
    CHECK(g.size() == 101);
    CHECK(g.segment_count() == 1);
    CHECK(g.spacing() == doctest::Approx(0.1));
    CHECK(g.coordinate(0) == doctest::Approx(1.0));
    CHECK(g.coordinate(100) == doctest::Approx(11.0));
    CHECK(g.is_boundary_node(0));
    CHECK(g.is_cap_node(100));
    CHECK(g.distance(37) == doctest::Approx(3.7));
}

TEST_CASE("two-ray grid mirrors both rays")
{
    const Grid g = build_grid(TwoRays{-1.0, 1.0}, 5.0, 50);
    REQUIRE(g.segment_count() == 2);
    CHECK(g.size() == 102);
    CHECK(g.spacing() == doctest::Approx(0.1));
    // segment 0 runs from a outward to a - L, segment 1 from b to b + L
    CHECK(g.coordinate(0) == doctest::Approx(-1.0));
    CHECK(g.coordinate(50) == doctest::Approx(-6.0));
    CHECK(g.coordinate(51) == doctest::Approx(1.0));
    CHECK(g.coordinate(101) == doctest::Approx(6.0));
    CHECK(g.is_boundary_node(51));
    CHECK(g.is_cap_node(50));
    CHECK(g.distance(60) == doctest::Approx(0.9));
}

TEST_CASE("grid preconditions")
{
    CHECK_THROWS_AS(build_grid(RadialExterior{2, 2.0}, 0.0, 100), DomainError);
    CHECK_THROWS_AS(build_grid(RadialExterior{3, 1.0}, 10.0, kMinIntervals - 1), DomainError);
    CHECK_THROWS_AS(build_grid(RadialExterior{3, -1.0}, 10.0, 100), DomainError);
    CHECK_THROWS_AS(build_grid(TwoRays{1.0, -1.0}, 10.0, 100), DomainError);
    CHECK_THROWS_AS(build_grid(RadialExterior{0, 1.0}, 10.0, 100), DomainError);
}

TEST_CASE("outward normals")
{
    const DomainSpec rays = TwoRays{-1.0, 1.0};
    CHECK(outward_normal(rays, Eigen::VectorXd::Constant(1, -1.0))[0] == 1.0);
    CHECK(outward_normal(rays, Eigen::VectorXd::Constant(1, 1.0))[0] == -1.0);
    CHECK_THROWS_AS(outward_normal(rays, Eigen::VectorXd::Constant(1, 0.0)), DomainError);

    const DomainSpec ball = RadialExterior{3, 2.0};
    const Eigen::Vector3d nu = outward_normal(ball, Eigen::Vector3d(2.0, 0.0, 0.0));
    CHECK(nu[0] == doctest::Approx(-1.0));
    CHECK(nu[1] == 0.0);
    CHECK(nu[2] == 0.0);
    CHECK_THROWS_AS(outward_normal(ball, Eigen::Vector3d(3.0, 0.0, 0.0)), DomainError);
}

TEST_CASE("truncation of zero data is zero")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 100);
    const Field f = truncate_initial_data([](double) { return 0.0; }, g);
    CHECK(sup_norm(f) == 0.0);
}

TEST_CASE("truncation leaves data supported in the inner 90% untouched")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 100);
    auto bump = [](double r) { return r < 5.0 ? (5.0 - r) * (r - 1.0) : 0.0; };
    const Field f = truncate_initial_data(bump, g);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        CHECK(f.values[i] == bump(g.coordinate(i)));
}

TEST_CASE("truncation of exp(-r) is sandwiched on the ramp")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 100);
    auto phi = [](double r) { return std::exp(-r); };
    const Field f = truncate_initial_data(phi, g);
    CHECK(f.values[100] == 0.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double r = g.coordinate(i);
        if (r <= 10.0 + 1e-12)
            CHECK(f.values[i] == phi(r));
        CHECK(f.values[i] >= 0.0);
        CHECK(f.values[i] <= phi(r));
    }
}

TEST_CASE("truncated data increase with L on shared nodes")
{
    auto phi = [](double r) { return 1.0 / r; };
    const double h = 0.05;
    const Field small = truncate_initial_data(phi, build_grid(RadialExterior{3, 1.0}, 10.0, static_cast<int>(10.0 / h)));
    const Field large = truncate_initial_data(phi, build_grid(RadialExterior{3, 1.0}, 20.0, static_cast<int>(20.0 / h)));
    for (Eigen::Index i = 0; i < small.values.size(); ++i)
        CHECK(small.values[i] <= large.values[i]);
}

TEST_CASE("truncation weight is a monotone C1 ramp")
{
    CHECK(truncation_weight(0.0, 10.0) == 1.0);
    CHECK(truncation_weight(9.0, 10.0) == 1.0);
    CHECK(truncation_weight(10.0, 10.0) == 0.0);
    CHECK(truncation_weight(9.5, 10.0) == doctest::Approx(0.5));
    double previous = 1.0;
    for (int k = 0; k <= 100; ++k) {
        const double w = truncation_weight(9.0 + k * 0.01, 10.0);
        CHECK(w <= previous);
        previous = w;
    }
}

TEST_CASE("truncation rejects negative or non-finite data")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 100);
    CHECK_THROWS_AS(truncate_initial_data([](double) { return -1.0; }, g), DomainError);
    CHECK_THROWS_AS(truncate_initial_data([](double) { return std::nan(""); }, g), DomainError);
    CHECK_THROWS_AS(truncate_initial_data(Eigen::VectorXd::Ones(5), g), DomainError);
}
