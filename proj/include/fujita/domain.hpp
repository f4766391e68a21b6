#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fujita {

/// Raised when an operation's precondition on its inputs is violated.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exterior of the ball B(0, R0) in R^N, simulated under radial symmetry.
struct RadialExterior {
    int dim = 3;
    double R0 = 1.0;
};

/// R \ [a, b]: two disconnected rays (-inf, a] and [b, inf).
struct TwoRays {
    double a = -1.0;
    double b = 1.0;
};

using DomainSpec = std::variant<RadialExterior, TwoRays>;

void validate(const DomainSpec& domain);

/// Spatial dimension N of the domain (1 for the two-ray domain).
int dimension(const DomainSpec& domain);

std::string describe(const DomainSpec& domain);

/**
 * One connected piece of a truncated domain.
 *
 * Node 0 sits on the physical boundary, node M on the Dirichlet cap. The
 * distance from the boundary grows with the index, so s_i = i*h, and the
 * physical coordinate is boundary + direction*s_i.
 */
struct Segment {
    double boundary = 0.0;
    int direction = +1;
    Eigen::VectorXd coords;
};

/**
 * Uniform grid on the truncated domain. The truncation length L stands in for the
 * exhaustion index: the radial grid covers [R0, R0+L], the two-ray grid covers
 * [a-L, a] and [b, b+L].
 *
 * All segments share the node count M+1 and are laid out contiguously in a
 * Field, segment k occupying [k*(M+1), (k+1)*(M+1)).
 */
class Grid {
public:
    Grid(DomainSpec domain, double L, int M);

    const DomainSpec& domain() const { return domain_; }
    double length() const { return L_; }
    int intervals() const { return M_; }
    double spacing() const { return h_; }
    int dim() const { return dimension(domain_); }

    std::size_t segment_count() const { return segments_.size(); }
    const Segment& segment(std::size_t k) const { return segments_[k]; }
    Eigen::Index nodes_per_segment() const { return M_ + 1; }
    Eigen::Index size() const { return nodes_per_segment() * static_cast<Eigen::Index>(segments_.size()); }
    Eigen::Index offset(std::size_t k) const { return static_cast<Eigen::Index>(k) * nodes_per_segment(); }

    /// Physical coordinate of global node i (radius for the radial domain).
    double coordinate(Eigen::Index i) const;
    /// Distance of global node i from the physical boundary of its segment.
    double distance(Eigen::Index i) const;

    bool is_boundary_node(Eigen::Index i) const { return i % nodes_per_segment() == 0; }
    bool is_cap_node(Eigen::Index i) const { return i % nodes_per_segment() == M_; }

private:
    DomainSpec domain_;
    double L_;
    int M_;
    double h_;
    std::vector<Segment> segments_;
};

inline constexpr int kMinIntervals = 16;

Grid build_grid(const DomainSpec& domain, double L, int M);

/**
 * Outward unit normal of Omega at a boundary point.
 *
 * For the exterior of a ball the normal points toward the origin, nu(x) = -x/R0.
 * For the two-ray domain the point is the 1-vector (a) or (b), with nu(a) = +1
 * and nu(b) = -1. Throws DomainError if the point is not on the boundary.
 */
Eigen::VectorXd outward_normal(const DomainSpec& domain, const Eigen::VectorXd& boundary_point);

/// Discrete solution snapshot. Values are laid out as described in Grid.
struct Field {
    Eigen::VectorXd values;
    double time = 0.0;
};

double sup_norm(const Field& field);

/// Cubic C^1 cut-off weight: 1 for s <= 0.9L, 0 at s = L, monotone in between.
double truncation_weight(double distance, double L);

/**
 * Discrete truncated data phi_L: phi times the cut-off weight on every node.
 *
 * The profile maps a physical coordinate (radius, or x on the line) to phi.
 * Throws DomainError on negative or non-finite profile values.
 */
Field truncate_initial_data(const std::function<double(double)>& profile, const Grid& grid);
Field truncate_initial_data(const Eigen::VectorXd& sampled, const Grid& grid);

}  // namespace fujita
