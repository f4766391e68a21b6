#pragma once

#include "fujita/closed_forms.hpp"
#include "fujita/discretization.hpp"
#include "fujita/initial_data.hpp"
#include "fujita/integrator.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fujita {

/// A study declined to run because its hypotheses or admissibility conditions fail.
class StudyRefused : public std::runtime_error {
public:
    StudyRefused(const std::string& what, std::vector<std::string> details = {})
        : std::runtime_error(what), details_(std::move(details))
    {
    }
    const std::vector<std::string>& details() const { return details_; }

private:
    std::vector<std::string> details_;
};

/// Domain, truncation, exponent, boundary coefficient, data and solver settings of one run.
struct ProblemSetup {
    DomainSpec domain = RadialExterior{};
    double L = 20.0;
    int M = 2000;
    double p = 3.0;
    SigmaModel sigma = SigmaModel::constant(1.0);
    InitialData init = ZeroData{};
    SolverConfig solver;

    Grid grid() const { return build_grid(domain, L, M); }
    /// The problem with the dynamical closure for sigma (Neumann if sigma is zero).
    Problem problem() const;
    Problem problem(const InitialData& data, bool neumann) const;
};

struct StudyReport {
    std::string kind;
    std::map<std::string, std::string> parameters;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
    std::vector<std::string> artifacts;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    bool inconclusive = false;
    bool pass = false;
};

/**
 * Runs the same problem at increasing truncation lengths with a common spacing
 * and a common time grid. Checks that the solutions increase with L on shared
 * nodes at every step. Checks that the sup-differences between consecutive
 * solutions at t_check do not increase, and that the last one is below tail_tol.
 */
StudyReport exhaustion_study(const ProblemSetup& base, const std::vector<double>& L_list, double t_check = 1.0,
                             double tail_tol = 1e-3);

struct ComparisonOptions {
    double mono_tol_scale = 1e-6;  // monotonicity tolerance = scale * |psi|^p
};

/**
 * u with data phi under the dynamical closure against v with data psi under
 * Neumann, stepped together. Requires phi <= psi nodewise. The monotonicity
 * sub-check (v non-decreasing in time) is enforced only when psi passes
 * check_psi_hypotheses.
 */
StudyReport comparison_study(const ProblemSetup& setup, const InitialData& phi, const InitialData& psi,
                             const ComparisonOptions& options = {});

/// Neumann run from psi; refuses (StudyRefused) if psi fails check_psi_hypotheses.
StudyReport neumann_monotonicity_study(const ProblemSetup& setup, const InitialData& psi,
                                       const ComparisonOptions& options = {});

/**
 * Run from scale * barrier(., 0) and check u <= barrier (1 + 1e-6) + 1e-8 after
 * every step. Also fits the decay slope of log|u| against log(t+1) and checks it
 * against -gamma (1 - 0.2). Refuses when the barrier is not admissible for the
 * domain and sigma bound.
 */
StudyReport supersolution_bound_study(const ProblemSetup& setup, const SupersolutionSpec& spec, double scale);

/// Throws StudyRefused unless the barrier is admissible on every simulated boundary point.
void require_admissible(const ProblemSetup& setup, const SupersolutionSpec& spec);

struct ResidualSample {
    std::string kind;  // "interior" or "boundary"
    Eigen::VectorXd x;
    double t = 0.0;
    double sigma = 0.0;
    double residual = 0.0;
    bool admissible = true;
};

struct ResidualSampling {
    std::vector<ResidualSample> samples;
    double min_interior = 0.0;
    double min_boundary_admissible = 0.0;
    std::size_t admissible_boundary_count = 0;
};

/**
 * Sobol samples of the closed-form residuals. Interior points cover distances
 * [0, span] from the boundary and t in [0, t_max]. Boundary points carry
 * sigma in [0, varsigma]. Boundary residuals count toward the minimum only
 * where the admissibility predicate holds.
 */
ResidualSampling sample_residuals(const SupersolutionSpec& spec, const DomainSpec& domain, double varsigma,
                                  std::size_t count, double span = 20.0, double t_max = 100.0);

struct SweepConfig {
    ProblemSetup base;               // init kind selects the data family; its amplitude is overridden
    std::vector<double> p_values;
    std::vector<double> amplitudes;
    unsigned jobs = 1;
};

struct SweepRecord {
    double p = 0.0;
    double amplitude = 0.0;
    double sigma_bound = 0.0;
    std::string domain;
    std::string outcome;
    double T_hat = 0.0;     // NaN unless BlowUp
    double t0_bound = 0.0;  // majorant blow-up time for the run's initial sup-norm
    bool slow = false;      // GlobalUpTo whose sup-norm did not decay over the horizon
    std::string note;
};

std::vector<SweepRecord> fujita_sweep(const SweepConfig& config);

/// At fixed p, no amplitude above a blowing-up one may be classified GlobalUpTo.
bool classification_monotone_in_amplitude(const std::vector<SweepRecord>& records);

/// Data family of `base.init` rescaled to `amplitude` for exponent p.
InitialData with_amplitude(const InitialData& family, const DomainSpec& domain, double p, double amplitude);

}  // namespace fujita
