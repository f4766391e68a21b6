#pragma once

#include "fujita/discretization.hpp"
#include "fujita/domain.hpp"
#include "fujita/initial_data.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fujita {

struct SolverConfig {
    double dt_init = 1e-2;
    double dt_min = 1e-12;
    double dt_max = 1e-2;
    double c_r = 0.1;              // reaction step factor
    double blowup_threshold = 1e10;
    double t_end = 10.0;
    double ordering_tol = 1e-8;
    std::size_t trace_stride = 1;  // record every k-th step (plus first, last and the blow-up regime)
    std::size_t max_steps = 50'000'000;

    /// Throws DomainError listing the first violated invariant.
    void validate() const;
};

/// Time series of a run. Every record is one accepted state.
struct Trace {
    std::vector<double> t;
    std::vector<double> dt;  // step that produced the record (0 for the initial state)
    std::vector<double> sup_norm;
    std::vector<double> u_inner_boundary;
    std::vector<double> u_cap;

    std::size_t size() const { return t.size(); }
    void record(const Field& state, double dt_taken, const Grid& grid);
};

struct GlobalUpTo {
    double t_end;
    double decay_slope;  // slope of log sup-norm against log(t+1) over the late trace; NaN if undefined
};
struct BlowUp {
    double t_detect;
    double T_hat;
    double t0_bound;
};
struct Inconclusive {
    std::string reason;
};
using RunOutcome = std::variant<GlobalUpTo, BlowUp, Inconclusive>;

std::string outcome_name(const RunOutcome& outcome);

enum class Reaction { On, Off };

/// Everything a run needs: grid, operator, closures, data, exponent.
struct Problem {
    Grid grid;
    double p;
    SpatialOperator op;
    std::vector<BoundaryClosure> closures;
    Field initial;
    Reaction reaction = Reaction::On;
};

Problem make_problem(const Grid& grid, double p, std::vector<BoundaryClosure> closures, Field initial,
                     Reaction reaction = Reaction::On);

/**
 * One IMEX step: u^p explicit, diffusion backward Euler, boundary nodes advanced
 * by their closure inside the same tridiagonal solve. Throws AssemblyError for dt
 * below the operator's monotone floor. A non-finite result is returned as-is;
 * callers treat it as overflow.
 */
Field step(const Field& state, const SpatialOperator& op, std::span<const BoundaryClosure> closures, double p, double dt,
           Reaction reaction = Reaction::On);

/// clamp(c_r * |u|_inf^(1-p), dt_min, dt_max).
double adaptive_dt(const Field& state, const SolverConfig& cfg, double p);

/// Thrown when a trace holds too few samples in the blow-up regime.
class InsufficientSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Blow-up time from the last decade of sup-norm growth: least-squares line
 * through w = |u|^(1-p) against t, T_hat = root, never earlier than the last
 * sample. When the decade holds fewer than five samples the window reaches
 * back along the strictly increasing tail of the trace. Requires the final
 * sup-norm to reach `regime_floor`.
 */
double estimate_blowup_time(const Trace& trace, double p, double regime_floor = 1e5);

/// Called after every accepted step of member `index` with the previous and new state.
using StepObserver = std::function<void(std::size_t index, const Field& previous, const Field& next, double dt)>;

struct RunOptions {
    std::vector<double> sample_times;  // snapshots are taken exactly at these times
    StepObserver observer;
};

struct RunResult {
    RunOutcome outcome;
    Trace trace;
    std::vector<Field> snapshots;  // one per reached sample time
    Field final_state;
};

RunResult run(const Problem& problem, const SolverConfig& cfg, const RunOptions& options = {});

/**
 * Integrates several problems on a common time grid: each step uses the smallest
 * adaptive dt of the members and the largest monotone floor. The ensemble stops
 * as soon as one member blows up or fails. The others are then reported as
 * GlobalUpTo at the stopping time.
 */
std::vector<RunResult> run_lockstep(std::span<const Problem> problems, const SolverConfig& cfg,
                                    const RunOptions& options = {});

/// Least-squares slope of log y against log(t+1) over samples with t >= t_from and y > 0.
double decay_slope(const Trace& trace, double t_from);

}  // namespace fujita
