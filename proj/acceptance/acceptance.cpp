// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "fujita/experiments.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fujita;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string sci(double v)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3g", v);
    return buffer;
}

// Largest amount by which |u(t)| exceeds z(t)(1 + 1e-6) for t < t0, over every step of a run.
struct MajorantWatch {
    double p = 0.0;
    double z0 = 0.0;
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t checked = 0;

    StepObserver observer()
    {
        return [this](std::size_t, const Field&, const Field& next, double) {
            if (!(z0 > 0.0))
                return;
            const double t0 = MajorantSpec<double>{p, z0}.t0();
            if (next.time >= t0)
                return;
            const double z = majorant_value(MajorantSpec<double>{p, z0}, next.time);
            worst = std::max(worst, sup_norm(next) - z * (1.0 + 1e-6));
            ++checked;
        };
    }
};

ProblemSetup subcritical_setup(double p)
{
    ProblemSetup s;
    s.domain = RadialExterior{3, 1.0};
    s.L = 20.0;
    s.M = 2000;
    s.p = p;
    s.sigma = SigmaModel::constant(1.0);
    s.init = GaussianData{1.0};
    s.solver.t_end = 10.0;
    return s;
}

ProblemSetup ball_barrier_setup()
{
    ProblemSetup s;
    s.domain = RadialExterior{3, 4.0};
    s.L = 60.0;
    s.M = 3000;
    s.p = 3.0;
    s.sigma = SigmaModel::constant(1.0);
    s.solver.t_end = 100.0;
    return s;
}

ProblemSetup two_ray_setup()
{
    ProblemSetup s;
    s.domain = TwoRays{-1.0, 1.0};
    s.L = 60.0;
    s.M = 3000;
    s.p = 4.0;
    s.sigma = SigmaModel::constant(0.3);
    s.solver.t_end = 100.0;
    return s;
}

const SupersolutionSpec two_ray_barrier = VBarrier<double>::make(-1.0, 1.0, 0.7, -0.7, 4.0);

Verdict criterion1()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> coord(-4.0, 4.0), time(0.0, 20.0), shift(-1.0, 1.0);
    const std::vector<std::pair<int, double>> families{{1, 4.0}, {2, 2.5}, {3, 2.0}, {3, 3.0}};
    double worst_fd = 0.0, worst_identity = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto [N, p] = families[static_cast<std::size_t>(k) % families.size()];
        Eigen::VectorXd mu(N), x(N), nu(N);
        for (int j = 0; j < N; ++j) {
            mu[j] = shift(rng);
            x[j] = coord(rng);
            nu[j] = coord(rng);
        }
        nu.normalize();
        const double t = time(rng);
        const auto U = UBarrier<double>::make(N, p, mu);
        const auto UL = oracle::widen(U);
        const oracle::LVec xl = x.cast<long double>(), nul = nu.cast<long double>();
        worst_fd = std::max({worst_fd,
                             oracle::relative_error(oracle::fd_time(UL, xl, t), eval_U_time_derivative(UL, xl, (long double)t)),
                             oracle::relative_error(oracle::fd_laplacian(UL, xl, t), eval_U_laplacian(UL, xl, (long double)t)),
                             oracle::relative_error(oracle::fd_directional(UL, xl, nul, t),
                                                    eval_U_normal_derivative(UL, xl, nul, (long double)t))});
        const double lhs = eval_U_time_derivative(U, x, t) - eval_U_laplacian(U, x, t);
        const double rhs = (N - 2.0 * U.gamma) / (2.0 * (t + 1.0)) * eval_U(U, x, t);
        worst_identity = std::max(worst_identity, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return {worst_fd <= 1e-6 && worst_identity <= 1e-12,
            "max relative FD error " + sci(worst_fd) + " (limit 1e-06), identity error " + sci(worst_identity) +
                " (limit 1e-12)"};
}

Verdict criterion2()
{
    struct Case {
        std::string name;
        SupersolutionSpec spec;
        DomainSpec domain;
        double varsigma;
    };
    const std::vector<Case> cases{
        {"(3,2) R0=4", UBarrier<double>::make(3, 2.0), RadialExterior{3, 4.0}, 1.0},
        {"(3,3) R0=4", UBarrier<double>::make(3, 3.0), RadialExterior{3, 4.0}, 1.0},
        {"(3,3) R0=1 mu shifted", UBarrier<double>::make(3, 3.0, Eigen::Vector3d(0.4, 0.0, 0.0)),
         RadialExterior{3, 1.0}, 0.2},
        {"(2,2.5) R0=4", UBarrier<double>::make(2, 2.5), RadialExterior{2, 4.0}, 1.0},
        {"(1,4) U", UBarrier<double>::make(1, 4.0), TwoRays{-1.0, 1.0}, 0.3},
        {"(1,4) V", two_ray_barrier, TwoRays{-1.0, 1.0}, 0.3},
    };
    double worst_interior = std::numeric_limits<double>::infinity();
    double worst_boundary = std::numeric_limits<double>::infinity();
    std::size_t boundary_points = 0;
    std::string names;
    for (const auto& c : cases) {
        const auto sampling = sample_residuals(c.spec, c.domain, c.varsigma, 10000);
        worst_interior = std::min(worst_interior, sampling.min_interior);
        if (sampling.admissible_boundary_count)
            worst_boundary = std::min(worst_boundary, sampling.min_boundary_admissible);
        boundary_points += sampling.admissible_boundary_count;
    }
    return {worst_interior >= -1e-12 && worst_boundary >= -1e-12 && boundary_points > 0,
            "min interior residual " + sci(worst_interior) + ", min admissible boundary residual " +
                sci(worst_boundary) + " over " + std::to_string(boundary_points) + " admissible boundary samples"};
}

Verdict criterion3()
{
    // uniform data, Neumann on both ends: the solver should follow z(t) = 1/(1-t)
    double ode_ratio = 0.0;
    for (double dt : {1e-2, 1e-3}) {
        const Grid g = build_grid(RadialExterior{3, 1.0}, 0.5, 50);
        auto closures = neumann_closures(g);
        closures.push_back(neumann_closure(g, 0, BoundaryClosure::Side::Cap));
        const Problem problem = make_problem(g, 2.0, closures, Field{Eigen::VectorXd::Ones(g.size()), 0.0});
        SolverConfig cfg;
        cfg.dt_init = cfg.dt_min = cfg.dt_max = dt;
        cfg.t_end = 0.5;
        double worst = 0.0;
        RunOptions options;
        options.observer = [&](std::size_t, const Field&, const Field& next, double) {
            const double z = static_cast<double>(oracle::majorant(2.0L, 1.0L, next.time));
            worst = std::max(worst, (next.values.array() - z).abs().maxCoeff());
        };
        (void)run(problem, cfg, options);
        ode_ratio = std::max(ode_ratio, worst / dt);
    }

    // majorant bound along the simulated runs of the other criteria
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t checked = 0;
    auto watch = [&](const ProblemSetup& s) {
        const Problem problem = s.problem();
        MajorantWatch w{s.p, sup_norm(problem.initial)};
        RunOptions options;
        options.observer = w.observer();
        (void)run(problem, s.solver, options);
        worst = std::max(worst, w.worst);
        checked += w.checked;
    };
    for (double p : {1.3, 1.4, 1.5, 5.0 / 3.0})
        watch(subcritical_setup(p));
    ProblemSetup ball = ball_barrier_setup();
    ball.init = ScaledBarrierData{0.5, UBarrier<double>::make(3, 3.0)};
    watch(ball);
    ProblemSetup rays = two_ray_setup();
    rays.init = ScaledBarrierData{0.5, two_ray_barrier};
    watch(rays);
    ProblemSetup harmonic = subcritical_setup(3.0);
    harmonic.init = HarmonicData{0.5};
    harmonic.solver.t_end = 2.0;
    watch(harmonic);

    return {ode_ratio <= 5.0 && worst <= 0.0,
            "uniform-data error / dt = " + sci(ode_ratio) + " (limit 5), max |u| - z(1+1e-6) = " + sci(worst) +
                " over " + std::to_string(checked) + " steps"};
}

Verdict criterion4()
{
    const ProblemSetup s = subcritical_setup(1.4);
    const auto result = run(s.problem(), s.solver);
    const auto* b = std::get_if<BlowUp>(&result.outcome);
    const double t0 = MajorantSpec<double>{1.4, 1.0}.t0();
    if (!b)
        return {false, "outcome " + outcome_name(result.outcome)};
    return {b->T_hat >= 0.95 * t0,
            "BlowUp, T_hat = " + sci(b->T_hat) + " >= 0.95 t0 = " + sci(0.95 * t0) + ", detected at t = " +
                sci(b->t_detect)};
}

Verdict bound_verdict(const StudyReport& r, double gamma)
{
    std::ostringstream os;
    os << r.notes.front() << ", max u - bound = " << sci(r.metrics.at("max_u_minus_bound"))
       << ", decay slope " << sci(r.metrics.at("decay_slope")) << " (limit " << sci(-0.8 * gamma) << ")";
    return {r.pass, os.str()};
}

Verdict criterion5()
{
    const auto report = supersolution_bound_study(ball_barrier_setup(), UBarrier<double>::make(3, 3.0), 0.5);
    return bound_verdict(report, 0.5);
}

Verdict criterion6()
{
    const auto report = supersolution_bound_study(two_ray_setup(), two_ray_barrier, 0.5);
    return bound_verdict(report, 1.0 / 3.0);
}

Verdict criterion7()
{
    ProblemSetup s;
    s.domain = RadialExterior{3, 1.0};
    s.L = 10.0;
    s.M = 1000;
    s.p = 3.0;
    s.init = GaussianData{0.1};
    s.solver.t_end = 1.0;
    const auto r = exhaustion_study(s, {10.0, 20.0, 40.0}, 1.0, 1e-3);
    return {r.pass, "worst ordering violation " + sci(r.worst_violation) + " (limit 1e-08), sup differences " +
                        sci(r.metrics.at("sup_difference_0")) + " > " + sci(r.metrics.at("sup_difference_1")) +
                        " (final limit 1e-03)"};
}

Verdict criterion8()
{
    ProblemSetup s = subcritical_setup(3.0);
    s.solver.t_end = 2.0;
    const auto harmonic = comparison_study(s, HarmonicData{0.5}, HarmonicData{1.0});
    const auto lane = comparison_study(s, LaneEmdenData{1.0, 0.5, 0.5}, LaneEmdenData{1.0, 0.5});
    const bool pass = harmonic.pass && lane.pass &&
                      lane.parameters.at("monotonicity_subcheck") == "passed";
    return {pass, "harmonic psi: max u - v = " + sci(harmonic.metrics.at("max_u_minus_v")) + " (" +
                      harmonic.parameters.at("monotonicity_subcheck") + "); Lane-Emden psi: max u - v = " +
                      sci(lane.metrics.at("max_u_minus_v")) + ", min dv/dt = " + sci(lane.metrics.at("min_dv_dt")) +
                      " (sub-check " + lane.parameters.at("monotonicity_subcheck") + ")"};
}

Verdict criterion9()
{
    SweepConfig sub;
    sub.base = subcritical_setup(1.4);
    sub.base.solver.t_end = 50.0;
    sub.p_values = {1.3, 1.5, 5.0 / 3.0};
    sub.amplitudes = {0.5, 1.0, 2.0};
    const auto sub_records = fujita_sweep(sub);

    SweepConfig super;
    super.base = ball_barrier_setup();
    super.base.L = 40.0;
    super.base.M = 2000;
    super.base.init = ScaledBarrierData{0.05, UBarrier<double>::make(3, 3.0)};
    super.p_values = {1.9, 2.5, 3.0};
    super.amplitudes = {0.05, 0.25, 0.5};
    const auto ball_records = fujita_sweep(super);

    // the same small barrier-scaled data on criterion 4's domain
    SweepConfig near = super;
    near.base = subcritical_setup(3.0);
    near.base.solver.t_end = 50.0;
    near.base.init = ScaledBarrierData{0.05, UBarrier<double>::make(3, 3.0)};
    near.amplitudes = {0.05};
    const auto near_records = fujita_sweep(near);
    auto super_records = ball_records;
    super_records.insert(super_records.end(), near_records.begin(), near_records.end());

    std::size_t blow = 0, global = 0;
    std::string odd;
    for (const auto& r : sub_records) {
        blow += r.outcome == "BlowUp";
        if (r.outcome != "BlowUp")
            odd += " p=" + sci(r.p) + "/a=" + sci(r.amplitude) + ":" + r.outcome;
    }
    for (const auto& r : super_records) {
        global += r.outcome == "GlobalUpTo";
        if (r.outcome != "GlobalUpTo")
            odd += " p=" + sci(r.p) + "/a=" + sci(r.amplitude) + ":" + r.outcome;
    }
    const bool monotone = classification_monotone_in_amplitude(sub_records) &&
                          classification_monotone_in_amplitude(ball_records) &&
                          classification_monotone_in_amplitude(near_records);
    return {blow == sub_records.size() && global == super_records.size() && monotone,
            std::to_string(blow) + "/" + std::to_string(sub_records.size()) + " subcritical BlowUp, " +
                std::to_string(global) + "/" + std::to_string(super_records.size()) +
                " supercritical GlobalUpTo, monotone in amplitude: " + (monotone ? "yes" : "no") + odd};
}

}  // namespace

int main()
{
    struct Criterion {
        int id;
        const char* title;
        double budget_seconds;
        std::function<Verdict()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "closed-form identities", 1.0, criterion1},
        {2, "supersolution residual signs", 5.0, criterion2},
        {3, "ODE majorant bound", std::numeric_limits<double>::infinity(), criterion3},
        {4, "subcritical blow-up", 60.0, criterion4},
        {5, "supercritical small data stay below U", 120.0, criterion5},
        {6, "two-ray data stay below V", 60.0, criterion6},
        {7, "exhaustion monotone in L", std::numeric_limits<double>::infinity(), criterion7},
        {8, "comparison chain", std::numeric_limits<double>::infinity(), criterion8},
        {9, "dichotomy sweep", std::numeric_limits<double>::infinity(), criterion9},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("criterion %d [%s]: %s | %s | %.2f s%s\n", c.id, c.title, pass ? "PASS" : "FAIL", v.detail.c_str(),
                    seconds, in_time ? "" : " (over the time budget)");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
