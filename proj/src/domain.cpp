#include "fujita/domain.hpp"

#include <cmath>
#include <sstream>

namespace fujita {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const DomainSpec& domain)
{
    std::visit(overloaded{
                   [](const RadialExterior& d) {
                       if (d.dim < 2)
                           throw DomainError("radial exterior domain needs N >= 2");
                       if (!(d.R0 > 0.0) || !std::isfinite(d.R0))
                           throw DomainError("radial exterior domain needs R0 > 0");
                   },
                   [](const TwoRays& d) {
                       if (!(d.a < d.b) || !std::isfinite(d.a) || !std::isfinite(d.b))
                           throw DomainError("two-ray domain needs a < b");
                   },
               },
               domain);
}

int dimension(const DomainSpec& domain)
{
    if (const auto* radial = std::get_if<RadialExterior>(&domain))
        return radial->dim;
    return 1;
}

std::string describe(const DomainSpec& domain)
{
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const RadialExterior& d) { os << "radial(N=" << d.dim << ";R0=" << d.R0 << ")"; },
                   [&](const TwoRays& d) { os << "two_rays(a=" << d.a << ";b=" << d.b << ")"; },
               },
               domain);
    return os.str();
}

Grid::Grid(DomainSpec domain, double L, int M) : domain_(std::move(domain)), L_(L), M_(M), h_(L / M)
{
    validate(domain_);
    if (!(L > 0.0) || !std::isfinite(L))
        throw DomainError("truncation length L must be positive");
    if (M < kMinIntervals)
        throw DomainError("node count M must be at least " + std::to_string(kMinIntervals));

    auto make_segment = [&](double boundary, int direction) {
        Segment seg{boundary, direction, Eigen::VectorXd(M + 1)};
        for (int i = 0; i <= M; ++i)
            seg.coords[i] = boundary + direction * (i * h_);
        // pin the cap exactly at distance L
        seg.coords[M] = boundary + direction * L;
        return seg;
    };

    if (const auto* radial = std::get_if<RadialExterior>(&domain_)) {
        segments_.push_back(make_segment(radial->R0, +1));
    } else {
        const auto& rays = std::get<TwoRays>(domain_);
        segments_.push_back(make_segment(rays.a, -1));
        segments_.push_back(make_segment(rays.b, +1));
    }
}

double Grid::coordinate(Eigen::Index i) const
{
    const auto per = nodes_per_segment();
    return segments_[static_cast<std::size_t>(i / per)].coords[i % per];
}

double Grid::distance(Eigen::Index i) const
{
    const auto local = i % nodes_per_segment();
    return local == M_ ? L_ : static_cast<double>(local) * h_;
}

Grid build_grid(const DomainSpec& domain, double L, int M)
{
    return Grid(domain, L, M);
}

Eigen::VectorXd outward_normal(const DomainSpec& domain, const Eigen::VectorXd& boundary_point)
{
    if (const auto* radial = std::get_if<RadialExterior>(&domain)) {
        if (boundary_point.size() != radial->dim)
            throw DomainError("boundary point has the wrong dimension");
        const double r = boundary_point.norm();
        if (std::abs(r - radial->R0) > 1e-12 * std::max(1.0, radial->R0))
            throw DomainError("point is not on the sphere |x| = R0");
        return -boundary_point / radial->R0;
    }
    const auto& rays = std::get<TwoRays>(domain);
    if (boundary_point.size() != 1)
        throw DomainError("boundary point of the two-ray domain is a 1-vector");
    const double x = boundary_point[0];
    if (x == rays.a)
        return Eigen::VectorXd::Constant(1, +1.0);
    if (x == rays.b)
        return Eigen::VectorXd::Constant(1, -1.0);
    throw DomainError("unknown boundary point: expected a or b");
}

double sup_norm(const Field& field)
{
    return field.values.size() == 0 ? 0.0 : field.values.cwiseAbs().maxCoeff();
}

double truncation_weight(double distance, double L)
{
    const double xi = (distance / L - 0.9) / 0.1;
    if (xi <= 0.0)
        return 1.0;
    if (xi >= 1.0)
        return 0.0;
    return 1.0 - xi * xi * (3.0 - 2.0 * xi);
}

Field truncate_initial_data(const Eigen::VectorXd& sampled, const Grid& grid)
{
    if (sampled.size() != grid.size())
        throw DomainError("sampled profile does not match the grid");
    Field out{Eigen::VectorXd(grid.size()), 0.0};
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double v = sampled[i];
        if (!std::isfinite(v))
            throw DomainError("initial data must be finite");
        if (v < 0.0)
            throw DomainError("initial data must be non-negative");
        out.values[i] = grid.is_cap_node(i) ? 0.0 : truncation_weight(grid.distance(i), grid.length()) * v;
    }
    return out;
}

Field truncate_initial_data(const std::function<double(double)>& profile, const Grid& grid)
{
    Eigen::VectorXd sampled(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        sampled[i] = profile(grid.coordinate(i));
    return truncate_initial_data(sampled, grid);
}

}  // namespace fujita
