#include "fujita/experiments.hpp"

#include <doctest.h>

#include <cmath>

using namespace fujita;

namespace {

ProblemSetup small_setup()
{
    ProblemSetup s;
    s.domain = RadialExterior{3, 1.0};
    s.L = 10.0;
    s.M = 500;
    s.p = 3.0;
    s.solver.t_end = 1.0;
    return s;
}

}  // namespace

TEST_CASE("exhaustion with zero data is trivially monotone")
{
    ProblemSetup s = small_setup();
    s.L = 5.0;
    s.M = 100;
    const auto report = exhaustion_study(s, {5.0, 10.0, 20.0});
    CHECK(report.pass);
    CHECK(report.worst_violation == 0.0);
    CHECK(report.metrics.at("tail_difference") == 0.0);
}

TEST_CASE("exhaustion preconditions")
{
    const ProblemSetup s = small_setup();
    CHECK_THROWS_AS(exhaustion_study(s, {20.0, 10.0, 5.0}), DomainError);
    CHECK_THROWS_AS(exhaustion_study(s, {5.0, 10.0}), DomainError);
    CHECK_THROWS_AS(exhaustion_study(s, {5.0, 10.001, 20.0}), DomainError);
}

TEST_CASE("exhaustion with small Gaussian data is monotone in L")
{
    ProblemSetup s = small_setup();
    s.L = 5.0;
    s.M = 250;
    s.init = GaussianData{0.2, 1.0};
    const auto report = exhaustion_study(s, {5.0, 10.0, 20.0});
    CHECK(report.worst_violation <= 1e-8);
    CHECK(report.metrics.at("sup_difference_0") >= report.metrics.at("sup_difference_1"));
    CHECK(report.pass);
}

TEST_CASE("comparison of identical Neumann problems")
{
    ProblemSetup s = small_setup();
    s.sigma = SigmaModel::constant(0.0);
    const auto report = comparison_study(s, LaneEmdenData{}, LaneEmdenData{});
    CHECK(report.worst_violation <= 1e-10);
    CHECK(report.pass);
    CHECK(report.parameters.at("monotonicity_subcheck") == "passed");
}

TEST_CASE("comparison with the truncated harmonic profile runs on ordering only")
{
    const ProblemSetup s = small_setup();
    const auto report = comparison_study(s, HarmonicData{0.5}, HarmonicData{1.0});
    CHECK(report.parameters.at("monotonicity_subcheck") == "hypothesis not met");
    CHECK(report.worst_violation <= 1e-8);
    CHECK(report.pass);
}

TEST_CASE("comparison refuses data with phi above psi")
{
    const ProblemSetup s = small_setup();
    CHECK_THROWS_AS(comparison_study(s, HarmonicData{1.0}, HarmonicData{0.5}), StudyRefused);
}

TEST_CASE("Neumann monotonicity")
{
    const ProblemSetup s = small_setup();
    SUBCASE("zero is flat")
    {
        const auto report = neumann_monotonicity_study(s, ZeroData{});
        CHECK(report.pass);
    }
    SUBCASE("Lane-Emden data increase in time")
    {
        const auto report = neumann_monotonicity_study(s, LaneEmdenData{1.0, 0.5});
        CHECK(report.pass);
        CHECK(report.metrics.at("min_dv_dt") >= -report.tolerance);
    }
    SUBCASE("a steep Gaussian is refused with its violation map")
    {
        try {
            (void)neumann_monotonicity_study(s, GaussianData{1.0, 0.3, 3.0});
            FAIL("expected a refusal");
        } catch (const StudyRefused& e) {
            CHECK_FALSE(e.details().empty());
            CHECK(e.details().front().find("residual=") != std::string::npos);
        }
    }
}

TEST_CASE("supersolution bound study")
{
    ProblemSetup s = small_setup();
    s.domain = RadialExterior{3, 4.0};
    s.L = 20.0;
    s.M = 400;
    s.solver.t_end = 5.0;
    const SupersolutionSpec U = UBarrier<double>::make(3, 3.0);
    SUBCASE("zero scale is bounded by any barrier")
    {
        const auto report = supersolution_bound_study(s, U, 0.0);
        CHECK(report.worst_violation == 0.0);
        CHECK(report.pass);
    }
    SUBCASE("half the barrier stays below the barrier")
    {
        const auto report = supersolution_bound_study(s, U, 0.5);
        CHECK(report.worst_violation == 0.0);
    }
    SUBCASE("inadmissible ball is refused")
    {
        s.domain = RadialExterior{3, 3.0};
        CHECK_THROWS_WITH_AS(supersolution_bound_study(s, U, 0.5), doctest::Contains("ball admissibility"),
                             StudyRefused);
    }
    SUBCASE("shifted barrier on a radial grid is refused")
    {
        const SupersolutionSpec shifted = UBarrier<double>::make(3, 3.0, Eigen::Vector3d(0.1, 0.0, 0.0));
        CHECK_THROWS_AS(supersolution_bound_study(s, shifted, 0.5), StudyRefused);
    }
    SUBCASE("two-ray barrier needs the matching domain")
    {
        const SupersolutionSpec V = VBarrier<double>::make(-1.0, 1.0, 0.7, -0.7, 4.0);
        CHECK_THROWS_AS(supersolution_bound_study(s, V, 0.5), StudyRefused);
    }
}

TEST_CASE("residual sampling")
{
    SUBCASE("U on an admissible ball")
    {
        const auto sampling = sample_residuals(UBarrier<double>::make(3, 3.0), RadialExterior{3, 4.0}, 1.0, 2000);
        CHECK(sampling.samples.size() == 4000);
        CHECK(sampling.min_interior >= -1e-12);
        CHECK(sampling.admissible_boundary_count == 2000);
        CHECK(sampling.min_boundary_admissible >= -1e-12);
    }
    SUBCASE("U on an inadmissible ball contributes no boundary samples")
    {
        const auto sampling = sample_residuals(UBarrier<double>::make(3, 3.0), RadialExterior{3, 1.0}, 1.0, 500);
        CHECK(sampling.admissible_boundary_count == 0);
        CHECK(sampling.min_interior >= -1e-12);
    }
    SUBCASE("sampling is deterministic")
    {
        const auto a = sample_residuals(UBarrier<double>::make(2, 2.5), RadialExterior{2, 4.0}, 1.0, 100);
        const auto b = sample_residuals(UBarrier<double>::make(2, 2.5), RadialExterior{2, 4.0}, 1.0, 100);
        for (std::size_t i = 0; i < a.samples.size(); ++i)
            CHECK(a.samples[i].residual == b.samples[i].residual);
    }
    SUBCASE("V on the two rays")
    {
        const auto sampling =
            sample_residuals(VBarrier<double>::make(-1.0, 1.0, 0.7, -0.7, 4.0), TwoRays{-1.0, 1.0}, 0.3, 1000);
        CHECK(sampling.min_interior >= -1e-12);
        CHECK(sampling.admissible_boundary_count == 1000);
        CHECK(sampling.min_boundary_admissible >= -1e-12);
    }
}

TEST_CASE("sweep records")
{
    SweepConfig cfg;
    cfg.base = small_setup();
    cfg.base.L = 20.0;
    cfg.base.M = 400;
    cfg.base.solver.t_end = 3.0;
    cfg.base.init = GaussianData{1.0};

    SUBCASE("empty grid gives an empty record list")
    {
        CHECK(fujita_sweep(cfg).empty());
    }
    SUBCASE("records are ordered and independent of the worker count")
    {
        cfg.p_values = {2.0, 1.5};
        cfg.amplitudes = {1.0, 0.0, 2.0};
        cfg.jobs = 1;
        const auto serial = fujita_sweep(cfg);
        cfg.jobs = 4;
        const auto parallel = fujita_sweep(cfg);
        REQUIRE(serial.size() == 6);
        REQUIRE(parallel.size() == 6);
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(serial[i].p == parallel[i].p);
            CHECK(serial[i].amplitude == parallel[i].amplitude);
            CHECK(serial[i].outcome == parallel[i].outcome);
            CHECK((serial[i].T_hat == parallel[i].T_hat || (std::isnan(serial[i].T_hat) && std::isnan(parallel[i].T_hat))));
        }
        CHECK(serial.front().p == 1.5);
        CHECK(serial.front().amplitude == 0.0);
        CHECK(serial.front().outcome == "GlobalUpTo");
        CHECK(serial.back().outcome == "BlowUp");
        CHECK(classification_monotone_in_amplitude(serial));
    }
}

TEST_CASE("classification monotonicity")
{
    std::vector<SweepRecord> records(3);
    records[0] = {2.0, 0.1, 1.0, "d", "GlobalUpTo", NAN, 1.0, false, ""};
    records[1] = {2.0, 0.5, 1.0, "d", "BlowUp", 1.0, 1.0, false, ""};
    records[2] = {2.0, 1.0, 1.0, "d", "BlowUp", 1.0, 1.0, false, ""};
    CHECK(classification_monotone_in_amplitude(records));
    records[2].outcome = "GlobalUpTo";
    CHECK_FALSE(classification_monotone_in_amplitude(records));
    records[2].outcome = "Inconclusive";
    CHECK(classification_monotone_in_amplitude(records));
}

TEST_CASE("with_amplitude rescales the data family")
{
    const auto g = with_amplitude(GaussianData{1.0, 2.0, 0.5}, RadialExterior{}, 2.0, 0.3);
    CHECK(std::get<GaussianData>(g).amplitude == 0.3);
    CHECK(std::get<GaussianData>(g).width == 2.0);
    const auto u = with_amplitude(ScaledBarrierData{0.5, UBarrier<double>::make(3, 3.0)}, RadialExterior{}, 2.5, 0.05);
    const auto& sb = std::get<ScaledBarrierData>(u);
    CHECK(sb.scale == 0.05);
    CHECK(std::get<UBarrier<double>>(sb.barrier).p == 2.5);
}

TEST_CASE("a scaled Lane-Emden profile lies below the full one and keeps the Neumann monotonicity")
{
    const ProblemSetup s = small_setup();
    const Grid g = s.problem().grid;
    const Field full = make_initial_field(LaneEmdenData{1.0, 0.5}, g, s.p);
    const Field half = make_initial_field(LaneEmdenData{1.0, 0.5, 0.5}, g, s.p);
    CHECK((half.values - 0.5 * full.values).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK_THROWS_AS(make_initial_field(LaneEmdenData{1.0, 0.5, -1.0}, g, s.p), DomainError);
    const auto report = comparison_study(s, LaneEmdenData{1.0, 0.5, 0.5}, LaneEmdenData{1.0, 0.5});
    CHECK(report.worst_violation <= 1e-8);
    CHECK(report.parameters.at("monotonicity_subcheck") == "passed");
    CHECK(report.pass);
}
