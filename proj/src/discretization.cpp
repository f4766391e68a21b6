#include "fujita/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fujita {

SigmaModel::SigmaModel(Constant c) : model_(c)
{
    if (!(c.value >= 0.0) || !std::isfinite(c.value))
        throw DomainError("dissipativity violated: sigma must be non-negative");
}

SigmaModel::SigmaModel(Profile profile)
{
    if (profile.times.empty() || profile.times.size() != profile.values.size())
        throw DomainError("sigma profile needs matching, non-empty time and value tables");
    if (!std::is_sorted(profile.times.begin(), profile.times.end()) ||
        std::adjacent_find(profile.times.begin(), profile.times.end()) != profile.times.end())
        throw DomainError("sigma profile times must be strictly increasing");
    for (double v : profile.values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw DomainError("dissipativity violated: sigma must be non-negative");
        if (v > profile.bound)
            throw DomainError("sigma bound violated: sigma exceeds its bound");
    }
    model_ = std::move(profile);
}

double SigmaModel::value(double t) const
{
    if (const auto* c = std::get_if<Constant>(&model_))
        return c->value;
    const auto& prof = std::get<Profile>(model_);
    if (t <= prof.times.front())
        return prof.values.front();
    if (t >= prof.times.back())
        return prof.values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(prof.times.begin(), prof.times.end(), t) -
                                             prof.times.begin());
    const auto lo = hi - 1;
    const double w = (t - prof.times[lo]) / (prof.times[hi] - prof.times[lo]);
    return (1.0 - w) * prof.values[lo] + w * prof.values[hi];
}

double SigmaModel::bound() const
{
    if (const auto* c = std::get_if<Constant>(&model_))
        return c->value;
    return std::get<Profile>(model_).bound;
}

bool SigmaModel::is_zero() const
{
    if (const auto* c = std::get_if<Constant>(&model_))
        return c->value == 0.0;
    const auto& v = std::get<Profile>(model_).values;
    return std::all_of(v.begin(), v.end(), [](double s) { return s == 0.0; });
}

namespace {

std::array<double, 3> one_sided_weights(double h)
{
    return {-3.0 / (2.0 * h), 4.0 / (2.0 * h), -1.0 / (2.0 * h)};
}

void check_segment(const Grid& grid, std::size_t segment)
{
    if (segment >= grid.segment_count())
        throw DomainError("unknown boundary id: segment " + std::to_string(segment));
}

}  // namespace

BoundaryClosure dynamical_closure(const SigmaModel& sigma, const Grid& grid, std::size_t segment,
                                  BoundaryClosure::Side side)
{
    check_segment(grid, segment);
    if (side == BoundaryClosure::Side::Cap)
        throw DomainError("dynamical closure applies to the physical boundary, not the Dirichlet cap");
    return {BoundaryClosure::Kind::Dynamical, side, segment, sigma, one_sided_weights(grid.spacing())};
}

BoundaryClosure neumann_closure(const Grid& grid, std::size_t segment, BoundaryClosure::Side side)
{
    check_segment(grid, segment);
    return {BoundaryClosure::Kind::Neumann, side, segment, SigmaModel::constant(0.0),
            one_sided_weights(grid.spacing())};
}

BoundaryClosure dirichlet_closure(const Grid& grid, std::size_t segment, BoundaryClosure::Side side)
{
    check_segment(grid, segment);
    return {BoundaryClosure::Kind::DirichletZero, side, segment, SigmaModel::constant(0.0), {}};
}

std::vector<BoundaryClosure> physical_closures(const Grid& grid, const SigmaModel& sigma)
{
    std::vector<BoundaryClosure> out;
    for (std::size_t k = 0; k < grid.segment_count(); ++k)
        out.push_back(sigma.is_zero() ? neumann_closure(grid, k) : dynamical_closure(sigma, grid, k));
    return out;
}

std::vector<BoundaryClosure> neumann_closures(const Grid& grid)
{
    std::vector<BoundaryClosure> out;
    for (std::size_t k = 0; k < grid.segment_count(); ++k)
        out.push_back(neumann_closure(grid, k));
    return out;
}

SpatialOperator assemble_laplacian(const Grid& grid, int N)
{
    if (N < 1)
        throw DomainError("dimension must be at least 1");
    if (N != grid.dim())
        throw DomainError("operator dimension does not match the domain");

    const double h = grid.spacing();
    const Eigen::Index n = grid.size();
    SpatialOperator op{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), h,
                       grid.nodes_per_segment()};
    const bool radial = std::holds_alternative<RadialExterior>(grid.domain());

    for (Eigen::Index i = 0; i < n; ++i) {
        if (grid.is_boundary_node(i) || grid.is_cap_node(i))
            continue;
        const double k = radial ? (N - 1) / grid.coordinate(i) : 0.0;
        const double advect = k / (2.0 * h);
        if (k * h / 2.0 >= 1.0)
            throw DomainError("grid too coarse: (N-1)h/(2r) >= 1 breaks the monotone sign pattern");
        op.sub[i] = 1.0 / (h * h) - advect;
        op.diag[i] = -2.0 / (h * h);
        op.super[i] = 1.0 / (h * h) + advect;
    }
    return op;
}

Eigen::VectorXd apply(const SpatialOperator& op, const Eigen::VectorXd& u)
{
    const Eigen::Index n = op.diag.size();
    if (u.size() != n)
        throw DomainError("field does not match the operator");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        if (op.diag[i] == 0.0)
            continue;
        out[i] = op.sub[i] * u[i - 1] + op.diag[i] * u[i] + op.super[i] * u[i + 1];
    }
    return out;
}

double monotone_dt_floor(const SpatialOperator& op)
{
    double floor = 0.0;
    for (Eigen::Index first = 1; first < op.diag.size(); first += op.nodes_per_segment) {
        const double denom = 4.0 * op.super[first] + op.diag[first];
        floor = std::max(floor, 1.0 / denom);
    }
    return floor;
}

Eigen::VectorXd solve_tridiagonal(const TridiagonalSystem& s)
{
    const Eigen::Index n = s.diag.size();
    Eigen::VectorXd c(n), d(n), x(n);
    double denom = s.diag[0];
    c[0] = n > 1 ? s.upper[0] / denom : 0.0;
    d[0] = s.rhs[0] / denom;
    for (Eigen::Index i = 1; i < n; ++i) {
        denom = s.diag[i] - s.lower[i] * c[i - 1];
        c[i] = i + 1 < n ? s.upper[i] / denom : 0.0;
        d[i] = (s.rhs[i] - s.lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (Eigen::Index i = n - 2; i >= 0; --i)
        x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

TridiagonalSystem assemble_implicit(const SpatialOperator& op, std::span<const BoundaryClosure> closures,
                                    const Eigen::VectorXd& explicit_rhs, const Eigen::VectorXd& previous, double dt,
                                    double t_new)
{
    const Eigen::Index n = op.diag.size();
    const Eigen::Index per = op.nodes_per_segment;
    if (!(dt > 0.0))
        throw DomainError("time step must be positive");
    if (explicit_rhs.size() != n || previous.size() != n)
        throw DomainError("field does not match the operator");

    TridiagonalSystem sys{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), explicit_rhs};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (op.diag[i] == 0.0)
            continue;
        sys.lower[i] = -dt * op.sub[i];
        sys.diag[i] = 1.0 - dt * op.diag[i];
        sys.upper[i] = -dt * op.super[i];
    }

    std::size_t physical = 0;
    for (const auto& closure : closures)
        physical += closure.side == BoundaryClosure::Side::Physical;
    if (static_cast<Eigen::Index>(physical) * per != n)
        throw DomainError("need exactly one physical closure per segment");
    for (Eigen::Index cap = per - 1; cap < n; cap += per) {
        sys.lower[cap] = 0.0;
        sys.diag[cap] = 1.0;
        sys.upper[cap] = 0.0;
        sys.rhs[cap] = 0.0;
    }

    auto install = [&](Eigen::Index row, double c0, double c1, double rhs, bool at_cap) {
        const double scale = 1.0 / op.h;
        if (c1 > 1e-12 * scale || !(c0 > std::abs(c1)))
            throw AssemblyError("boundary row is not an M-matrix row: dt below the monotone floor " +
                                std::to_string(monotone_dt_floor(op)));
        sys.diag[row] = c0;
        (at_cap ? sys.lower[row] : sys.upper[row]) = std::min(c1, 0.0);
        sys.rhs[row] = rhs;
    };

    for (const auto& closure : closures) {
        const Eigen::Index b = static_cast<Eigen::Index>(closure.segment) * per;
        const Eigen::Index cap = b + per - 1;
        if (closure.side == BoundaryClosure::Side::Cap) {
            if (closure.kind == BoundaryClosure::Kind::DirichletZero)
                continue;
            if (closure.kind != BoundaryClosure::Kind::Neumann)
                throw DomainError("the cap takes a Dirichlet or Neumann closure only");
            // (3u_M - 4u_{M-1} + u_{M-2}) / (2h) = 0, u_{M-2} eliminated against row M-1
            const auto& w = closure.weights;
            const double f = -w[2] / sys.lower[cap - 1];
            install(cap, -w[0] - f * sys.upper[cap - 1], -w[1] - f * sys.diag[cap - 1], -f * sys.rhs[cap - 1],
                    true);
            continue;
        }

        sys.lower[b] = 0.0;
        if (closure.kind == BoundaryClosure::Kind::DirichletZero) {
            sys.diag[b] = 1.0;
            sys.upper[b] = 0.0;
            sys.rhs[b] = 0.0;
            continue;
        }

        const double sigma = closure.kind == BoundaryClosure::Kind::Dynamical ? closure.sigma.value(t_new) : 0.0;
        const auto& w = closure.weights;
        double c0 = sigma / dt - w[0];
        double c1 = -w[1];
        const double c2 = -w[2];
        double rhs = sigma / dt * previous[b];

        // eliminate the u2 entry against the interior row at b+1
        const double f = c2 / sys.upper[b + 1];
        c0 -= f * sys.lower[b + 1];
        c1 -= f * sys.diag[b + 1];
        rhs -= f * sys.rhs[b + 1];
        install(b, c0, c1, rhs, false);
    }
    return sys;
}

}  // namespace fujita
