#include "fujita/closed_forms.hpp"
#include "fujita/integrator.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace fujita;

namespace {

// Closed uniform test problem: Neumann at the boundary and at the cap.
Problem uniform_problem(double z0, double p)
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 0.5, 50);
    auto closures = neumann_closures(g);
    closures.push_back(neumann_closure(g, 0, BoundaryClosure::Side::Cap));
    return make_problem(g, p, closures, Field{Eigen::VectorXd::Constant(g.size(), z0), 0.0});
}

Trace ode_trace(double p, double z0, double top)
{
    Trace trace;
    const double t0 = MajorantSpec<double>{p, z0}.t0();
    for (int k = 0;; ++k) {
        const double z = z0 * std::pow(1.05, k);
        if (z > top)
            break;
        // invert z(t) = (z0^(1-p) - (p-1) t)^(-1/(p-1))
        const double t = (std::pow(z0, 1.0 - p) - std::pow(z, 1.0 - p)) / (p - 1.0);
        trace.t.push_back(std::min(t, t0));
        trace.dt.push_back(0.0);
        trace.sup_norm.push_back(z);
        trace.u_inner_boundary.push_back(z);
        trace.u_cap.push_back(z);
    }
    return trace;
}

}  // namespace

TEST_CASE("zero is a fixed point of the step")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 200);
    const auto op = assemble_laplacian(g, 3);
    const auto closures = physical_closures(g, SigmaModel::constant(1.0));
    const Field next = step(Field{Eigen::VectorXd::Zero(g.size()), 0.0}, op, closures, 2.7, 0.01);
    CHECK(next.values.isZero(0.0));
    CHECK(next.time == doctest::Approx(0.01));
}

TEST_CASE("uniform data follow the ODE to first order in dt")
{
    for (double dt : {1e-2, 1e-3}) {
        const Problem problem = uniform_problem(1.0, 2.0);
        SolverConfig cfg;
        cfg.dt_init = cfg.dt_min = cfg.dt_max = dt;
        cfg.t_end = 0.5;
        double worst = 0.0;
        RunOptions options;
        options.observer = [&](std::size_t, const Field&, const Field& next, double) {
            const double z = static_cast<double>(oracle::majorant(2.0L, 1.0L, next.time));
            worst = std::max(worst, (next.values.array() - z).abs().maxCoeff());
        };
        const auto result = run(problem, cfg, options);
        CHECK(std::holds_alternative<GlobalUpTo>(result.outcome));
        CHECK(result.final_state.time == doctest::Approx(0.5));
        CHECK(worst <= 5.0 * dt);
        CHECK(worst > 0.0);
    }
}

TEST_CASE("adaptive step examples")
{
    SolverConfig cfg;
    cfg.dt_max = 1.0;
    cfg.c_r = 0.1;
    const Grid g = build_grid(RadialExterior{3, 1.0}, 1.0, 16);
    auto uniform = [&](double v) { return Field{Eigen::VectorXd::Constant(g.size(), v), 0.0}; };
    CHECK(adaptive_dt(uniform(1.0), cfg, 2.0) == doctest::Approx(0.1));
    CHECK(adaptive_dt(uniform(1e3), cfg, 2.0) == doctest::Approx(1e-4));
    CHECK(adaptive_dt(uniform(1e300), cfg, 2.0) == cfg.dt_min);
    cfg.dt_max = 0.05;
    CHECK(adaptive_dt(uniform(1.0), cfg, 2.0) == 0.05);
    CHECK(adaptive_dt(uniform(0.0), cfg, 2.0) == 0.05);
}

TEST_CASE("solver configuration invariants")
{
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt_min = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = SolverConfig{};
    cfg.dt_init = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = SolverConfig{};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("blow-up time from an exact ODE trace")
{
    CHECK(estimate_blowup_time(ode_trace(2.0, 1.0, 1e10), 2.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(std::abs(estimate_blowup_time(ode_trace(1.5, 1.0, 1e10), 1.5) - 2.0) <= 1e-2);
    CHECK_THROWS_AS(estimate_blowup_time(ode_trace(2.0, 1.0, 10.0), 2.0), DomainError);
    Trace sparse;
    for (double z : {1e6, 1e8, 1e10}) {
        sparse.t.push_back(1.0 - 1.0 / z);
        sparse.sup_norm.push_back(z);
    }
    CHECK_THROWS_AS(estimate_blowup_time(sparse, 2.0), InsufficientSamples);
}

TEST_CASE("zero data stay zero and are global")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 200);
    const Problem problem = make_problem(g, 2.0, physical_closures(g, SigmaModel::constant(1.0)),
                                         Field{Eigen::VectorXd::Zero(g.size()), 0.0});
    SolverConfig cfg;
    cfg.t_end = 2.0;
    const auto result = run(problem, cfg);
    REQUIRE(std::holds_alternative<GlobalUpTo>(result.outcome));
    CHECK(std::get<GlobalUpTo>(result.outcome).t_end == 2.0);
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        CHECK(result.trace.sup_norm[i] == 0.0);
        CHECK(result.trace.u_inner_boundary[i] == 0.0);
    }
    CHECK(result.trace.t.back() == 2.0);
}

TEST_CASE("subcritical Gaussian blows up no earlier than the majorant time")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 20.0, 2000);
    const Problem problem = make_problem(g, 1.4, physical_closures(g, SigmaModel::constant(1.0)),
                                         make_initial_field(GaussianData{1.0}, g, 1.4));
    SolverConfig cfg;
    cfg.t_end = 10.0;
    double worst = 0.0;
    const double t0 = MajorantSpec<double>{1.4, 1.0}.t0();
    RunOptions options;
    options.observer = [&](std::size_t, const Field&, const Field& next, double) {
        if (next.time < t0)
            worst = std::max(worst, sup_norm(next) - majorant_value(MajorantSpec<double>{1.4, 1.0}, next.time) * (1 + 1e-6));
    };
    const auto result = run(problem, cfg, options);
    REQUIRE(std::holds_alternative<BlowUp>(result.outcome));
    const auto& b = std::get<BlowUp>(result.outcome);
    CHECK(b.t0_bound == doctest::Approx(2.5));
    CHECK(b.T_hat >= 2.5);
    CHECK(b.T_hat >= b.t_detect);
    CHECK(worst <= 0.0);
}

TEST_CASE("snapshots land exactly on the requested sample times")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 500);
    const Problem problem = make_problem(g, 3.0, physical_closures(g, SigmaModel::constant(1.0)),
                                         make_initial_field(GaussianData{0.2}, g, 3.0));
    SolverConfig cfg;
    cfg.t_end = 1.0;
    RunOptions options;
    options.sample_times = {0.25, 0.5, 0.123};
    const auto result = run(problem, cfg, options);
    REQUIRE(result.snapshots.size() == 3);
    CHECK(result.snapshots[0].time == 0.123);
    CHECK(result.snapshots[1].time == 0.25);
    CHECK(result.snapshots[2].time == 0.5);
}

TEST_CASE("lockstep members with identical data evolve identically")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 500);
    const Problem problem = make_problem(g, 2.0, physical_closures(g, SigmaModel::constant(1.0)),
                                         make_initial_field(GaussianData{0.3}, g, 2.0));
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const std::vector<Problem> pair{problem, problem};
    const auto results = run_lockstep(pair, cfg);
    CHECK(results[0].final_state.values == results[1].final_state.values);
    const auto single = run(problem, cfg);
    CHECK(single.final_state.values == results[0].final_state.values);
}

TEST_CASE("trace stride thins the record")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 200);
    const Problem problem = make_problem(g, 3.0, physical_closures(g, SigmaModel::constant(1.0)),
                                         make_initial_field(GaussianData{0.1}, g, 3.0));
    SolverConfig cfg;
    cfg.t_end = 1.0;
    const auto full = run(problem, cfg);
    cfg.trace_stride = 5;
    const auto thin = run(problem, cfg);
    CHECK(thin.trace.size() < full.trace.size());
    CHECK(thin.trace.t.back() == 1.0);
    CHECK(thin.final_state.values == full.final_state.values);
}

TEST_CASE("step budget exhaustion is inconclusive")
{
    const Grid g = build_grid(RadialExterior{3, 1.0}, 10.0, 200);
    const Problem problem = make_problem(g, 3.0, physical_closures(g, SigmaModel::constant(1.0)),
                                         make_initial_field(GaussianData{0.1}, g, 3.0));
    SolverConfig cfg;
    cfg.max_steps = 3;
    const auto result = run(problem, cfg);
    CHECK(std::holds_alternative<Inconclusive>(result.outcome));
}
