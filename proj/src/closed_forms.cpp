#include "fujita/closed_forms.hpp"

#include "fujita/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fujita {

AdmissibilityReport admissibility_report(const std::vector<Eigen::VectorXd>& boundary_points,
                                         const std::vector<Eigen::VectorXd>& normals, const Eigen::VectorXd& mu,
                                         double varsigma, int N)
{
    if (boundary_points.size() != normals.size())
        throw DomainError("need one normal per boundary point");
    AdmissibilityReport report;
    report.all = true;
    for (std::size_t i = 0; i < boundary_points.size(); ++i) {
        const bool ok = mu_admissible<double>(boundary_points[i], normals[i], mu, varsigma, N);
        report.pointwise.push_back(ok);
        if (ok)
            report.admissible.push_back(i);
        report.all = report.all && ok;
    }
    return report;
}

double barrier_at(const SupersolutionSpec& spec, const Grid& grid, Eigen::Index i, double t)
{
    const double x = grid.coordinate(i);
    if (const auto* U = std::get_if<UBarrier<double>>(&spec)) {
        if (U->N != grid.dim())
            throw DomainError("barrier dimension does not match the grid");
        Eigen::VectorXd point = Eigen::VectorXd::Zero(U->N);
        point[0] = x;
        return eval_U(*U, point, t);
    }
    const auto& V = std::get<VBarrier<double>>(spec);
    if (!std::holds_alternative<TwoRays>(grid.domain()))
        throw DomainError("two-ray barrier needs the two-ray domain");
    return eval_V(V, x, t);
}

Eigen::VectorXd sample_barrier(const SupersolutionSpec& spec, const Grid& grid, double t)
{
    Eigen::VectorXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        out[i] = barrier_at(spec, grid, i, t);
    return out;
}

PsiReport check_psi_hypotheses(const Field& psi, const Grid& grid, double p, double tol_scale)
{
    const Eigen::VectorXd& v = psi.values;
    if (v.size() != grid.size())
        throw DomainError("psi does not match the grid");
    if ((v.array() < 0.0).any())
        throw DomainError("psi must be non-negative");
    if (!v.allFinite())
        throw DomainError("psi must be finite");

    const auto op = assemble_laplacian(grid, grid.dim());
    const double h = grid.spacing();
    const double norm = sup_norm(psi);

    PsiReport report;
    report.tolerance = tol_scale * std::pow(norm, p);
    report.residual = apply(op, v);
    report.min_residual = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        if (grid.is_boundary_node(i) || grid.is_cap_node(i))
            continue;
        report.residual[i] += std::pow(v[i], p);
        report.min_residual = std::min(report.min_residual, report.residual[i]);
        if (report.residual[i] < -report.tolerance)
            report.violations.push_back(i);
        const double second = std::abs(v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
        report.max_second_difference = std::max(report.max_second_difference, second);
    }
    report.interior_pass = report.violations.empty();

    // d_s psi at each physical boundary; -d_nu psi = d_s psi
    const double flux_tol = 64.0 * std::numeric_limits<double>::epsilon() * norm / h;
    report.min_boundary_flux = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.segment_count(); ++k) {
        const Eigen::Index b = grid.offset(k);
        const double ds = (-3.0 * v[b] + 4.0 * v[b + 1] - v[b + 2]) / (2.0 * h);
        report.min_boundary_flux = std::min(report.min_boundary_flux, ds);
    }
    report.boundary_compatible = report.min_boundary_flux >= -flux_tol;
    report.pass = report.interior_pass && report.boundary_compatible && std::isfinite(report.max_second_difference);
    return report;
}

}  // namespace fujita
