#include "fujita/initial_data.hpp"

#include "fujita/discretization.hpp"

#include <cmath>

namespace fujita {

namespace {

Eigen::VectorXd lane_emden_profile(const LaneEmdenData& data, const Grid& grid, double p)
{
    if (!(data.amplitude > 0.0))
        throw DomainError("lane_emden amplitude must be positive");
    if (!(data.theta >= 0.0 && data.theta < 1.0))
        throw DomainError("lane_emden theta must lie in [0, 1)");

    const auto op = assemble_laplacian(grid, grid.dim());
    const Eigen::Index per = grid.nodes_per_segment();
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(grid.size());
    const double c = data.amplitude;

    for (std::size_t k = 0; k < grid.segment_count(); ++k) {
        const Eigen::Index b = grid.offset(k);
        psi[b] = c;

        // Row 1 with psi2 = 4 psi1 - 3 psi0 substituted; g is increasing with g(0) < 0 < g(c).
        const double lin = 4.0 * op.super[b + 1] + op.diag[b + 1];
        const double rhs = c * (3.0 * op.super[b + 1] - op.sub[b + 1]);
        auto g = [&](double x) { return lin * x + data.theta * std::pow(x, p) - rhs; };
        double lo = 0.0, hi = c;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi)
                break;
            (g(mid) < 0.0 ? lo : hi) = mid;
        }
        psi[b + 1] = hi;
        psi[b + 2] = 4.0 * psi[b + 1] - 3.0 * psi[b];

        Eigen::Index last = b + 1;
        if (psi[b + 2] > 0.0) {
            last = b + 2;
            for (Eigen::Index i = b + 2; i < b + per - 2; ++i) {
                const double next =
                    (-data.theta * std::pow(psi[i], p) - op.sub[i] * psi[i - 1] - op.diag[i] * psi[i]) / op.super[i];
                if (!(next > 0.0))
                    break;
                psi[i + 1] = next;
                last = i + 1;
            }
        } else {
            psi[b + 2] = 0.0;
        }
        if (last >= b + per - 2 || grid.distance(last) > 0.9 * grid.length())
            throw DomainError("lane_emden profile does not vanish inside the untruncated 90% of the grid; "
                              "increase L or the amplitude");
    }
    return psi;
}

double distance_from_boundary(const Grid& grid, double x)
{
    if (const auto* radial = std::get_if<RadialExterior>(&grid.domain()))
        return x - radial->R0;
    const auto& rays = std::get<TwoRays>(grid.domain());
    return x <= rays.a ? rays.a - x : x - rays.b;
}

}  // namespace

Eigen::VectorXd sample_initial_data(const InitialData& data, const Grid& grid, double p)
{
    if (const auto* le = std::get_if<LaneEmdenData>(&data)) {
        if (!(le->scale >= 0.0))
            throw DomainError("lane_emden scale must be non-negative");
        return le->scale * lane_emden_profile(*le, grid, p);
    }

    Eigen::VectorXd out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = grid.coordinate(i);
        double value = 0.0;
        if (const auto* g = std::get_if<GaussianData>(&data)) {
            if (!(g->width > 0.0))
                throw DomainError("gaussian width must be positive");
            const double z = (distance_from_boundary(grid, x) - g->offset) / g->width;
            value = g->amplitude * std::exp(-z * z);
        } else if (const auto* s = std::get_if<ScaledBarrierData>(&data)) {
            value = s->scale * barrier_at(s->barrier, grid, i, 0.0);
        } else if (const auto* hd = std::get_if<HarmonicData>(&data)) {
            const int N = grid.dim();
            if (const auto* radial = std::get_if<RadialExterior>(&grid.domain()); radial && N >= 3)
                value = hd->amplitude * std::pow(radial->R0 / x, N - 2);
            else
                value = hd->amplitude;
        }
        out[i] = value;
    }
    return out;
}

Field make_initial_field(const InitialData& data, const Grid& grid, double p)
{
    return truncate_initial_data(sample_initial_data(data, grid, p), grid);
}

}  // namespace fujita
