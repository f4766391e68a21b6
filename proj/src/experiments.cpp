#include "fujita/experiments.hpp"

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <tuple>

namespace fujita {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string list(const std::vector<double>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        out += (i ? "," : "") + fmt(v[i]);
    return out + "]";
}

void describe_setup(StudyReport& report, const ProblemSetup& s)
{
    report.parameters["domain"] = describe(s.domain);
    report.parameters["L"] = fmt(s.L);
    report.parameters["M"] = std::to_string(s.M);
    report.parameters["p"] = fmt(s.p);
    report.parameters["sigma_bound"] = fmt(s.sigma.bound());
    report.parameters["t_end"] = fmt(s.solver.t_end);
}

bool is_inconclusive(const RunOutcome& o) { return std::holds_alternative<Inconclusive>(o); }

}  // namespace

Problem ProblemSetup::problem() const { return problem(init, false); }

Problem ProblemSetup::problem(const InitialData& data, bool neumann) const
{
    const Grid g = grid();
    auto closures = neumann ? neumann_closures(g) : physical_closures(g, sigma);
    return make_problem(g, p, std::move(closures), make_initial_field(data, g, p));
}

// ---------------------------------------------------------------------------

StudyReport exhaustion_study(const ProblemSetup& base, const std::vector<double>& L_list, double t_check,
                             double tail_tol)
{
    if (L_list.size() < 3)
        throw DomainError("exhaustion study needs at least three truncation lengths");
    for (std::size_t i = 1; i < L_list.size(); ++i)
        if (!(L_list[i] > L_list[i - 1]))
            throw DomainError("exhaustion truncation lengths must be strictly increasing");

    const double h = base.L / base.M;
    std::vector<Problem> problems;
    for (double L : L_list) {
        const double m = L / h;
        const int M = static_cast<int>(std::lround(m));
        if (std::abs(m - M) > 1e-9 * m)
            throw DomainError("truncation length " + fmt(L) + " is not a multiple of the base spacing");
        ProblemSetup s = base;
        s.L = L;
        s.M = M;
        problems.push_back(s.problem());
    }

    const std::size_t n = problems.size();
    std::vector<Eigen::VectorXd> latest(n);
    double worst = -std::numeric_limits<double>::infinity();

    auto shared_violation = [&](std::size_t i, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        const Grid& gl = problems[i].grid;
        const Grid& gh = problems[i + 1].grid;
        double w = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < gl.segment_count(); ++k)
            for (Eigen::Index j = 0; j < gl.nodes_per_segment(); ++j)
                w = std::max(w, lo[gl.offset(k) + j] - hi[gh.offset(k) + j]);
        return w;
    };
    auto shared_difference = [&](std::size_t i, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        const Grid& gl = problems[i].grid;
        const Grid& gh = problems[i + 1].grid;
        double d = 0.0;
        for (std::size_t k = 0; k < gl.segment_count(); ++k)
            for (Eigen::Index j = 0; j < gl.nodes_per_segment(); ++j)
                d = std::max(d, std::abs(lo[gl.offset(k) + j] - hi[gh.offset(k) + j]));
        return d;
    };

    for (std::size_t i = 0; i + 1 < n; ++i)
        worst = std::max(worst, shared_violation(i, problems[i].initial.values, problems[i + 1].initial.values));

    RunOptions options;
    if (t_check <= base.solver.t_end)
        options.sample_times = {t_check};
    options.observer = [&](std::size_t k, const Field&, const Field& next, double) {
        latest[k] = next.values;
        if (k + 1 != n)
            return;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (latest[i].size() && latest[i + 1].size())
                worst = std::max(worst, shared_violation(i, latest[i], latest[i + 1]));
        for (auto& v : latest)
            v.resize(0);
    };
    const auto results = run_lockstep(problems, base.solver, options);

    StudyReport report;
    report.kind = "exhaustion";
    describe_setup(report, base);
    report.parameters["L_list"] = list(L_list);
    report.parameters["t_check"] = fmt(t_check);
    report.tolerance = base.solver.ordering_tol;
    report.worst_violation = std::max(worst, 0.0);

    bool differences_ok = true;
    double tail = std::numeric_limits<double>::quiet_NaN();
    bool have_snapshots = true;
    for (const auto& r : results) {
        report.inconclusive = report.inconclusive || is_inconclusive(r.outcome);
        have_snapshots = have_snapshots && !r.snapshots.empty();
    }
    if (have_snapshots) {
        double previous = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double d = shared_difference(i, results[i].snapshots.front().values,
                                               results[i + 1].snapshots.front().values);
            report.metrics["sup_difference_" + std::to_string(i)] = d;
            differences_ok = differences_ok && d <= previous;
            previous = d;
            tail = d;
        }
    } else {
        report.notes.push_back("t_check not reached by every member");
        differences_ok = false;
    }
    report.metrics["tail_difference"] = tail;
    for (std::size_t i = 0; i < n; ++i)
        report.notes.push_back("L=" + fmt(L_list[i]) + ": " + outcome_name(results[i].outcome));

    report.pass = !report.inconclusive && report.worst_violation <= report.tolerance && differences_ok &&
                  tail < tail_tol;
    return report;
}

// ---------------------------------------------------------------------------

StudyReport comparison_study(const ProblemSetup& setup, const InitialData& phi, const InitialData& psi,
                             const ComparisonOptions& options)
{
    const Problem u_problem = setup.problem(phi, false);
    const Problem v_problem = setup.problem(psi, true);
    const Eigen::VectorXd gap = u_problem.initial.values - v_problem.initial.values;
    if (gap.maxCoeff() > 0.0)
        throw StudyRefused("comparison data violate phi <= psi", {"max(phi - psi) = " + fmt(gap.maxCoeff())});

    const PsiReport hyp = check_psi_hypotheses(v_problem.initial, v_problem.grid, setup.p);
    const double mono_tol = options.mono_tol_scale * std::pow(sup_norm(v_problem.initial), setup.p);

    double worst_order = gap.maxCoeff();
    double min_rate = std::numeric_limits<double>::infinity();
    Eigen::VectorXd latest_u;
    RunOptions run_options;
    run_options.observer = [&](std::size_t k, const Field& previous, const Field& next, double dt) {
        if (k == 0) {
            latest_u = next.values;
            return;
        }
        min_rate = std::min(min_rate, ((next.values - previous.values) / dt).minCoeff());
        if (latest_u.size())
            worst_order = std::max(worst_order, (latest_u - next.values).maxCoeff());
        latest_u.resize(0);
    };
    const std::vector<Problem> pair{u_problem, v_problem};
    const auto results = run_lockstep(pair, setup.solver, run_options);

    StudyReport report;
    report.kind = "comparison";
    describe_setup(report, setup);
    report.tolerance = setup.solver.ordering_tol;
    report.worst_violation = std::max(worst_order, 0.0);
    report.metrics["max_u_minus_v"] = worst_order;
    report.metrics["min_dv_dt"] = min_rate;
    report.metrics["mono_tol"] = mono_tol;
    report.metrics["psi_min_residual"] = hyp.min_residual;
    report.metrics["psi_min_boundary_flux"] = hyp.min_boundary_flux;
    report.notes.push_back("u (dynamical): " + outcome_name(results[0].outcome));
    report.notes.push_back("v (Neumann): " + outcome_name(results[1].outcome));
    report.inconclusive = is_inconclusive(results[0].outcome) || is_inconclusive(results[1].outcome);

    const bool ordered = report.worst_violation <= report.tolerance;
    bool monotone_v = true;
    if (hyp.pass) {
        monotone_v = min_rate >= -mono_tol;
        report.parameters["monotonicity_subcheck"] = monotone_v ? "passed" : "failed";
    } else {
        report.parameters["monotonicity_subcheck"] = "hypothesis not met";
        report.notes.push_back("psi fails the discrete hypotheses (" + std::to_string(hyp.violations.size()) +
                               " interior violations, boundary compatible: " +
                               (hyp.boundary_compatible ? "yes" : "no") + "); judged on ordering only");
    }
    report.pass = !report.inconclusive && ordered && monotone_v;
    return report;
}

StudyReport neumann_monotonicity_study(const ProblemSetup& setup, const InitialData& psi,
                                       const ComparisonOptions& options)
{
    const Problem problem = setup.problem(psi, true);
    const PsiReport hyp = check_psi_hypotheses(problem.initial, problem.grid, setup.p);
    if (!hyp.pass) {
        std::vector<std::string> details;
        for (auto i : hyp.violations)
            details.push_back("node " + std::to_string(i) + " x=" + fmt(problem.grid.coordinate(i)) +
                              " residual=" + fmt(hyp.residual[i]));
        if (!hyp.boundary_compatible)
            details.push_back("boundary flux -d_nu psi = " + fmt(hyp.min_boundary_flux) + " < 0");
        throw StudyRefused("psi fails the discrete hypothesis Delta psi + psi^p >= 0", std::move(details));
    }

    const double mono_tol = options.mono_tol_scale * std::pow(sup_norm(problem.initial), setup.p);
    double min_rate = std::numeric_limits<double>::infinity();
    RunOptions run_options;
    run_options.observer = [&](std::size_t, const Field& previous, const Field& next, double dt) {
        min_rate = std::min(min_rate, ((next.values - previous.values) / dt).minCoeff());
    };
    const auto result = run(problem, setup.solver, run_options);

    StudyReport report;
    report.kind = "neumann_monotonicity";
    describe_setup(report, setup);
    report.tolerance = mono_tol;
    report.worst_violation = std::max(0.0, -min_rate);
    report.metrics["min_dv_dt"] = min_rate;
    report.notes.push_back("v (Neumann): " + outcome_name(result.outcome));
    report.inconclusive = is_inconclusive(result.outcome);
    report.pass = !report.inconclusive && report.worst_violation <= report.tolerance;
    return report;
}

// ---------------------------------------------------------------------------

void require_admissible(const ProblemSetup& setup, const SupersolutionSpec& spec)
{
    const double varsigma = setup.sigma.bound();
    if (const auto* U = std::get_if<UBarrier<double>>(&spec)) {
        if (U->p != setup.p)
            throw StudyRefused("barrier exponent differs from the problem exponent");
        if (!(setup.p > 1.0 + 2.0 / U->N))
            throw StudyRefused("barrier needs p > 1 + 2/N");
        if (const auto* radial = std::get_if<RadialExterior>(&setup.domain)) {
            if (U->N != radial->dim)
                throw StudyRefused("barrier dimension differs from the domain");
            if (!U->mu.isZero())
                throw StudyRefused("radial simulation needs a radial barrier (mu = 0)");
            if (!ball_admissible(radial->R0, varsigma, radial->dim))
                throw StudyRefused("ball admissibility R0 > ςN fails",
                                   {"R0 = " + fmt(radial->R0) + ", varsigma N = " + fmt(varsigma * radial->dim)});
            return;
        }
        const auto& rays = std::get<TwoRays>(setup.domain);
        if (U->N != 1)
            throw StudyRefused("barrier dimension differs from the domain");
        const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, rays.a);
        const Eigen::VectorXd b = Eigen::VectorXd::Constant(1, rays.b);
        const auto report = admissibility_report({a, b}, {outward_normal(setup.domain, a), outward_normal(setup.domain, b)},
                                                 U->mu, varsigma, 1);
        if (!report.all)
            throw StudyRefused("admissibility (y + μ)·ν < −ςN fails at a boundary point");
        return;
    }
    const auto& V = std::get<VBarrier<double>>(spec);
    const auto* rays = std::get_if<TwoRays>(&setup.domain);
    if (!rays || rays->a != V.a || rays->b != V.b)
        throw StudyRefused("two-ray barrier needs the matching two-ray domain");
    if (V.p != setup.p)
        throw StudyRefused("barrier exponent differs from the problem exponent");
    if (!dim1_admissible(V.a, V.b, V.mu1, V.mu2, varsigma))
        throw StudyRefused("one-dimensional admissibility fails",
                           {"-(a+mu1)-varsigma = " + fmt(-(V.a + V.mu1) - varsigma),
                            "(b+mu2)-varsigma = " + fmt(V.b + V.mu2 - varsigma)});
}

StudyReport supersolution_bound_study(const ProblemSetup& setup, const SupersolutionSpec& spec, double scale)
{
    if (!(scale >= 0.0 && scale < 1.0))
        throw DomainError("barrier scale must lie in [0, 1)");
    require_admissible(setup, spec);

    const Problem problem = setup.problem(ScaledBarrierData{scale, spec}, false);
    const Grid& grid = problem.grid;
    constexpr double rel = 1e-6;
    constexpr double abs_tol = 1e-8;
    double worst = -std::numeric_limits<double>::infinity();
    auto check = [&](const Field& f) {
        for (Eigen::Index i = 0; i < grid.size(); ++i)
            worst = std::max(worst, f.values[i] - (barrier_at(spec, grid, i, f.time) * (1.0 + rel) + abs_tol));
    };
    check(problem.initial);
    RunOptions options;
    options.observer = [&](std::size_t, const Field&, const Field& next, double) { check(next); };
    const auto result = run(problem, setup.solver, options);

    const double gamma = std::visit([](const auto& b) { return b.gamma; }, spec);
    StudyReport report;
    report.kind = "supersolution_bound";
    describe_setup(report, setup);
    report.parameters["barrier"] = std::holds_alternative<UBarrier<double>>(spec) ? "U" : "V";
    report.parameters["scale"] = fmt(scale);
    report.tolerance = 0.0;
    report.worst_violation = std::max(worst, 0.0);
    report.metrics["max_u_minus_bound"] = worst;
    report.metrics["gamma"] = gamma;
    report.notes.push_back("run: " + outcome_name(result.outcome));

    const auto* global = std::get_if<GlobalUpTo>(&result.outcome);
    report.inconclusive = is_inconclusive(result.outcome);
    const double slope = global ? global->decay_slope : std::numeric_limits<double>::quiet_NaN();
    const double slope_limit = -gamma * (1.0 - 0.2);
    report.metrics["decay_slope"] = slope;
    report.metrics["decay_slope_limit"] = slope_limit;
    // a run that decays to exactly zero has no slope; it is trivially bounded
    const bool zero_run = sup_norm(result.final_state) == 0.0;
    const bool slope_ok = zero_run || slope <= slope_limit;
    report.pass = global && global->t_end >= setup.solver.t_end && report.worst_violation <= 0.0 && slope_ok;
    return report;
}

// ---------------------------------------------------------------------------

ResidualSampling sample_residuals(const SupersolutionSpec& spec, const DomainSpec& domain, double varsigma,
                                  std::size_t count, double span, double t_max)
{
    if (varsigma < 0.0)
        throw DomainError("sigma bound must be non-negative");
    ResidualSampling out;
    out.min_interior = std::numeric_limits<double>::infinity();
    out.min_boundary_admissible = std::numeric_limits<double>::infinity();

    if (const auto* U = std::get_if<UBarrier<double>>(&spec)) {
        const int N = U->N;
        double R0 = 0.0;
        if (const auto* radial = std::get_if<RadialExterior>(&domain)) {
            if (radial->dim != N)
                throw DomainError("barrier dimension differs from the domain");
            R0 = radial->R0;
        } else if (N != 1) {
            throw DomainError("barrier dimension differs from the domain");
        }
        const auto& rays = std::get_if<TwoRays>(&domain);
        boost::random::sobol qrng(static_cast<std::size_t>(N + 3));
        boost::random::uniform_01<double> uni;
        auto direction = [&](std::vector<double>& u) {
            Eigen::VectorXd d(N);
            for (int j = 0; j < N; ++j)
                d[j] = 2.0 * u[j] - 1.0;
            if (d.norm() < 1e-8)
                d = Eigen::VectorXd::Unit(N, 0);
            return Eigen::VectorXd(d.normalized());
        };
        for (std::size_t s = 0; s < count; ++s) {
            std::vector<double> u(static_cast<std::size_t>(N + 3));
            for (auto& v : u)
                v = uni(qrng);
            const double dist = span * u[static_cast<std::size_t>(N)];
            const double t = t_max * u[static_cast<std::size_t>(N + 1)];
            const double sigma = varsigma * u[static_cast<std::size_t>(N + 2)];

            Eigen::VectorXd x, bx, nu;
            if (rays) {
                const bool left = u[0] < 0.5;
                x = Eigen::VectorXd::Constant(1, left ? rays->a - dist : rays->b + dist);
                bx = Eigen::VectorXd::Constant(1, left ? rays->a : rays->b);
            } else {
                const Eigen::VectorXd d = direction(u);
                x = (R0 + dist) * d;
                bx = R0 * d;
            }
            nu = outward_normal(domain, bx);

            const double ri = interior_residual_U(*U, x, t);
            out.min_interior = std::min(out.min_interior, ri);
            out.samples.push_back({"interior", x, t, 0.0, ri, true});

            const double rb = boundary_residual_U(*U, bx, nu, sigma, t);
            const bool ok = mu_admissible<double>(bx, nu, U->mu, varsigma, N);
            if (ok) {
                out.min_boundary_admissible = std::min(out.min_boundary_admissible, rb);
                ++out.admissible_boundary_count;
            }
            out.samples.push_back({"boundary", bx, t, sigma, rb, ok});
        }
        return out;
    }

    const auto& V = std::get<VBarrier<double>>(spec);
    const bool ok = dim1_admissible(V.a, V.b, V.mu1, V.mu2, varsigma);
    boost::random::sobol qrng(4);
    boost::random::uniform_01<double> uni;
    for (std::size_t s = 0; s < count; ++s) {
        const double side = uni(qrng), u_dist = uni(qrng), u_t = uni(qrng), u_sigma = uni(qrng);
        const bool left = side < 0.5;
        const double dist = span * u_dist;
        const double t = t_max * u_t;
        const double sigma = varsigma * u_sigma;
        const double x = left ? V.a - dist : V.b + dist;
        const double bx = left ? V.a : V.b;

        const double ri = interior_residual_V(V, x, t);
        out.min_interior = std::min(out.min_interior, ri);
        out.samples.push_back({"interior", Eigen::VectorXd::Constant(1, x), t, 0.0, ri, true});

        const double rb = boundary_residual_V(V, bx, sigma, t);
        if (ok) {
            out.min_boundary_admissible = std::min(out.min_boundary_admissible, rb);
            ++out.admissible_boundary_count;
        }
        out.samples.push_back({"boundary", Eigen::VectorXd::Constant(1, bx), t, sigma, rb, ok});
    }
    return out;
}

// ---------------------------------------------------------------------------

InitialData with_amplitude(const InitialData& family, const DomainSpec& domain, double p, double amplitude)
{
    if (const auto* g = std::get_if<GaussianData>(&family)) {
        auto out = *g;
        out.amplitude = amplitude;
        return out;
    }
    if (const auto* s = std::get_if<ScaledBarrierData>(&family)) {
        SupersolutionSpec barrier;
        if (const auto* U = std::get_if<UBarrier<double>>(&s->barrier))
            barrier = UBarrier<double>::make(U->N, p, U->mu);
        else {
            const auto& V = std::get<VBarrier<double>>(s->barrier);
            barrier = VBarrier<double>::make(V.a, V.b, V.mu1, V.mu2, p);
        }
        return ScaledBarrierData{amplitude, barrier};
    }
    if (std::holds_alternative<HarmonicData>(family))
        return HarmonicData{amplitude};
    if (const auto* le = std::get_if<LaneEmdenData>(&family))
        return LaneEmdenData{amplitude, le->theta, le->scale};
    (void)domain;
    return ZeroData{};
}

std::vector<SweepRecord> fujita_sweep(const SweepConfig& config)
{
    struct Task {
        double p;
        double amplitude;
    };
    std::vector<Task> tasks;
    for (double p : config.p_values)
        for (double a : config.amplitudes)
            tasks.push_back({p, a});
    std::sort(tasks.begin(), tasks.end(),
              [](const Task& x, const Task& y) { return std::tie(x.p, x.amplitude) < std::tie(y.p, y.amplitude); });

    std::vector<SweepRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& task = tasks[i];
            SweepRecord rec;
            rec.p = task.p;
            rec.amplitude = task.amplitude;
            rec.sigma_bound = config.base.sigma.bound();
            rec.domain = describe(config.base.domain);
            rec.T_hat = std::numeric_limits<double>::quiet_NaN();
            rec.t0_bound = std::numeric_limits<double>::quiet_NaN();
            try {
                ProblemSetup s = config.base;
                s.p = task.p;
                s.init = with_amplitude(config.base.init, s.domain, task.p, task.amplitude);
                const Problem problem = s.problem();
                const double z0 = sup_norm(problem.initial);
                rec.t0_bound = z0 > 0.0 ? MajorantSpec<double>{task.p, z0}.t0()
                                        : std::numeric_limits<double>::infinity();
                const auto result = run(problem, s.solver);
                rec.outcome = outcome_name(result.outcome);
                if (const auto* b = std::get_if<BlowUp>(&result.outcome))
                    rec.T_hat = b->T_hat;
                if (const auto* inc = std::get_if<Inconclusive>(&result.outcome))
                    rec.note = inc->reason;
                if (std::holds_alternative<GlobalUpTo>(result.outcome))
                    rec.slow = z0 > 0.0 && sup_norm(result.final_state) >= z0;
            } catch (const std::exception& e) {
                rec.outcome = "Inconclusive";
                rec.note = e.what();
            }
            records[i] = std::move(rec);
        }
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
    }
    return records;
}

bool classification_monotone_in_amplitude(const std::vector<SweepRecord>& records)
{
    std::map<double, std::vector<const SweepRecord*>> by_p;
    for (const auto& r : records)
        by_p[r.p].push_back(&r);
    for (auto& [p, group] : by_p) {
        std::sort(group.begin(), group.end(), [](auto* x, auto* y) { return x->amplitude < y->amplitude; });
        bool blown = false;
        for (const auto* r : group) {
            if (r->outcome == "BlowUp")
                blown = true;
            else if (blown && r->outcome == "GlobalUpTo")
                return false;
        }
    }
    return true;
}

}  // namespace fujita
