#include "fujita/integrator.hpp"

#include "fujita/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fujita {

void SolverConfig::validate() const
{
    if (!(dt_min > 0.0))
        throw DomainError("solver: dt_min must be positive");
    if (!(dt_min <= dt_init && dt_init <= dt_max))
        throw DomainError("solver: need dt_min <= dt_init <= dt_max");
    if (!(c_r > 0.0))
        throw DomainError("solver: reaction step factor c_r must be positive");
    if (!(blowup_threshold > 1.0))
        throw DomainError("solver: blow-up threshold must exceed 1");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw DomainError("solver: t_end must be positive and finite");
    if (!(ordering_tol >= 0.0))
        throw DomainError("solver: ordering_tol must be non-negative");
    if (trace_stride == 0)
        throw DomainError("solver: trace_stride must be at least 1");
}

void Trace::record(const Field& state, double dt_taken, const Grid& grid)
{
    t.push_back(state.time);
    dt.push_back(dt_taken);
    sup_norm.push_back(fujita::sup_norm(state));
    u_inner_boundary.push_back(state.values[0]);
    u_cap.push_back(state.values[grid.nodes_per_segment() - 1]);
}

std::string outcome_name(const RunOutcome& outcome)
{
    if (std::holds_alternative<GlobalUpTo>(outcome))
        return "GlobalUpTo";
    if (std::holds_alternative<BlowUp>(outcome))
        return "BlowUp";
    return "Inconclusive";
}

Problem make_problem(const Grid& grid, double p, std::vector<BoundaryClosure> closures, Field initial,
                     Reaction reaction)
{
    if (!(p > 1.0))
        throw DomainError("exponent p must exceed 1");
    if (initial.values.size() != grid.size())
        throw DomainError("initial field does not match the grid");
    if (!initial.values.allFinite() || (initial.values.array() < 0.0).any())
        throw DomainError("initial data must be finite and non-negative");
    auto op = assemble_laplacian(grid, grid.dim());
    return {grid, p, std::move(op), std::move(closures), std::move(initial), reaction};
}

Field step(const Field& state, const SpatialOperator& op, std::span<const BoundaryClosure> closures, double p, double dt,
           Reaction reaction)
{
    if (!(dt > 0.0))
        throw DomainError("time step must be positive");
    Eigen::VectorXd rhs = state.values;
    if (reaction == Reaction::On)
        rhs.array() += dt * state.values.array().max(0.0).pow(p);
    const auto system = assemble_implicit(op, closures, rhs, state.values, dt, state.time + dt);
    return {solve_tridiagonal(system), state.time + dt};
}

double adaptive_dt(const Field& state, const SolverConfig& cfg, double p)
{
    const double norm = sup_norm(state);
    const double raw = cfg.c_r * std::pow(norm, 1.0 - p);
    if (std::isnan(raw))
        return cfg.dt_min;
    return std::clamp(raw, cfg.dt_min, cfg.dt_max);
}

double estimate_blowup_time(const Trace& trace, double p, double regime_floor)
{
    std::size_t end = trace.size();
    while (end > 0 && !std::isfinite(trace.sup_norm[end - 1]))
        --end;
    if (end == 0 || trace.sup_norm[end - 1] < regime_floor)
        throw DomainError("trace does not end in the blow-up regime");

    const double top = trace.sup_norm[end - 1];
    const double lower = std::max(regime_floor, top / 10.0);
    std::size_t begin = end - 1;
    while (begin > 0 && std::isfinite(trace.sup_norm[begin - 1]) && trace.sup_norm[begin - 1] >= lower)
        --begin;
    // widen to the last five samples of the growth phase when the final decade is crossed in fewer steps
    while (end - begin < 5 && begin > 0 && std::isfinite(trace.sup_norm[begin - 1]) &&
           trace.sup_norm[begin - 1] > 0.0 && trace.sup_norm[begin - 1] < trace.sup_norm[begin])
        --begin;
    const std::size_t n = end - begin;
    if (n < 5)
        throw InsufficientSamples("fewer than 5 samples in the final growth phase");

    double mt = 0.0, mw = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        mt += trace.t[i];
        mw += std::pow(trace.sup_norm[i], 1.0 - p);
    }
    mt /= static_cast<double>(n);
    mw /= static_cast<double>(n);
    double stt = 0.0, stw = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double dt = trace.t[i] - mt;
        stt += dt * dt;
        stw += dt * (std::pow(trace.sup_norm[i], 1.0 - p) - mw);
    }
    if (!(stt > 0.0))
        throw InsufficientSamples("blow-up samples share one time stamp");
    const double slope = stw / stt;
    if (!(slope < 0.0))
        throw InsufficientSamples("w = |u|^(1-p) is not decreasing over the fit window");
    const double root = mt - mw / slope;
    return std::max(root, trace.t[end - 1]);
}

double decay_slope(const Trace& trace, double t_from)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace.t[i] < t_from || !(trace.sup_norm[i] > 0.0) || !std::isfinite(trace.sup_norm[i]))
            continue;
        const double x = std::log1p(trace.t[i]);
        const double y = std::log(trace.sup_norm[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const double dn = static_cast<double>(n);
    const double denom = sxx - sx * sx / dn;
    if (!(denom > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return (sxy - sx * sy / dn) / denom;
}

namespace {

struct Member {
    const Problem* problem;
    Field state;
    RunResult result;
    std::size_t since_record = 0;
    bool finished = false;
};

double majorant_t0(const Problem& problem)
{
    const double z0 = sup_norm(problem.initial);
    if (!(z0 > 0.0))
        return std::numeric_limits<double>::infinity();
    return MajorantSpec<double>{problem.p, z0}.t0();
}

}  // namespace

std::vector<RunResult> run_lockstep(std::span<const Problem> problems, const SolverConfig& cfg,
                                    const RunOptions& options)
{
    cfg.validate();
    if (problems.empty())
        return {};

    double floor = cfg.dt_min;
    for (const auto& pr : problems)
        floor = std::max(floor, monotone_dt_floor(pr.op) * (1.0 + 1e-9));
    if (floor > cfg.dt_max)
        throw DomainError("solver: dt_max is below the grid's monotone floor h^2/2; refine the grid or raise dt_max");

    std::vector<double> samples = options.sample_times;
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    samples.erase(std::remove_if(samples.begin(), samples.end(), [&](double s) { return !(s > 0.0) || s > cfg.t_end; }),
                  samples.end());
    double previous_target = 0.0;
    for (double s : samples) {
        if (s - previous_target < 2.0 * floor)
            throw DomainError("solver: sample times closer than twice the dt floor");
        previous_target = s;
    }
    if (cfg.t_end - previous_target < 2.0 * floor && cfg.t_end != previous_target)
        throw DomainError("solver: last sample time too close to t_end");

    const double regime = std::sqrt(cfg.blowup_threshold);
    std::vector<Member> members;
    members.reserve(problems.size());
    for (const auto& pr : problems) {
        Member m{&pr, pr.initial, {}, 0, false};
        m.state.time = 0.0;
        m.result.trace.record(m.state, 0.0, pr.grid);
        members.push_back(std::move(m));
    }

    std::size_t next_sample = 0;
    double t = 0.0;
    std::size_t steps = 0;
    bool first = true;
    auto finish_all = [&](double t_stop) {
        for (auto& m : members) {
            if (m.finished)
                continue;
            if (m.result.trace.t.back() != m.state.time)
                m.result.trace.record(m.state, 0.0, m.problem->grid);
            m.result.outcome = GlobalUpTo{t_stop, decay_slope(m.result.trace, 0.1 * t_stop)};
            m.finished = true;
        }
    };

    while (true) {
        if (t >= cfg.t_end) {
            finish_all(cfg.t_end);
            break;
        }
        if (steps >= cfg.max_steps) {
            for (auto& m : members)
                if (!m.finished)
                    m.result.outcome = Inconclusive{"step budget exhausted"};
            break;
        }

        double dt = cfg.dt_max;
        std::vector<double> own(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
            own[k] = adaptive_dt(members[k].state, cfg, members[k].problem->p);
            dt = std::min(dt, own[k]);
        }
        if (first)
            dt = std::min(dt, cfg.dt_init);
        dt = std::max(dt, floor);

        const double target = next_sample < samples.size() ? samples[next_sample] : cfg.t_end;
        const double remaining = target - t;
        bool hits_target = false;
        if (dt >= remaining) {
            dt = remaining;
            hits_target = true;
        } else if (remaining - dt < floor) {
            dt = remaining >= 2.0 * floor ? 0.5 * remaining : remaining;
            hits_target = dt == remaining;
        }

        bool stop = false;
        for (std::size_t k = 0; k < members.size(); ++k) {
            auto& m = members[k];
            const Problem& pr = *m.problem;
            Field next = step(m.state, pr.op, pr.closures, pr.p, dt, pr.reaction);
            next.time = hits_target ? target : t + dt;
            const double norm = sup_norm(next);
            if (!std::isfinite(norm)) {
                const double before = sup_norm(m.state);
                m.result.trace.record(next, dt, pr.grid);
                if (before > cfg.blowup_threshold) {
                    double T_hat = std::numeric_limits<double>::quiet_NaN();
                    try {
                        T_hat = estimate_blowup_time(m.result.trace, pr.p, regime);
                        m.result.outcome = BlowUp{m.state.time, std::max(T_hat, m.state.time), majorant_t0(pr)};
                    } catch (const InsufficientSamples& e) {
                        m.result.outcome = Inconclusive{std::string("overflow; ") + e.what()};
                    }
                } else {
                    m.result.outcome = Inconclusive{"non-finite state below the blow-up threshold"};
                }
                m.finished = true;
                stop = true;
                continue;
            }
            if (options.observer)
                options.observer(k, m.state, next, dt);
            m.state = std::move(next);

            ++m.since_record;
            const bool in_regime = norm >= regime;
            if (m.since_record >= cfg.trace_stride || in_regime || hits_target) {
                m.result.trace.record(m.state, dt, pr.grid);
                m.since_record = 0;
            }
            if (hits_target && next_sample < samples.size() && target == samples[next_sample])
                m.result.snapshots.push_back(m.state);

            const double own_next = adaptive_dt(m.state, cfg, pr.p);
            if (norm > cfg.blowup_threshold && std::max(own_next, floor) <= floor) {
                if (m.result.trace.t.back() != m.state.time)
                    m.result.trace.record(m.state, dt, pr.grid);
                try {
                    const double T_hat = estimate_blowup_time(m.result.trace, pr.p, regime);
                    m.result.outcome = BlowUp{m.state.time, T_hat, majorant_t0(pr)};
                } catch (const InsufficientSamples& e) {
                    m.result.outcome = Inconclusive{e.what()};
                }
                m.finished = true;
                stop = true;
            }
        }
        t = hits_target ? target : t + dt;
        if (hits_target && next_sample < samples.size() && target == samples[next_sample])
            ++next_sample;
        ++steps;
        first = false;
        if (stop) {
            finish_all(t);
            break;
        }
    }

    std::vector<RunResult> out;
    out.reserve(members.size());
    for (auto& m : members) {
        m.result.final_state = m.state;
        out.push_back(std::move(m.result));
    }
    return out;
}

RunResult run(const Problem& problem, const SolverConfig& cfg, const RunOptions& options)
{
    auto results = run_lockstep(std::span<const Problem>(&problem, 1), cfg, options);
    return std::move(results.front());
}

}  // namespace fujita
