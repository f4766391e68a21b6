#pragma once

#include "fujita/domain.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace fujita {

/// Boundary coefficient sigma, constant on each boundary component.
class SigmaModel {
public:
    struct Constant {
        double value = 0.0;
    };
    /// Piecewise-linear sigma(t) through (times[i], values[i]), held constant outside.
    struct Profile {
        std::vector<double> times;
        std::vector<double> values;
        double bound = 0.0;
    };

    SigmaModel() = default;
    SigmaModel(Constant c);
    SigmaModel(Profile profile);

    static SigmaModel constant(double value) { return SigmaModel(Constant{value}); }

    double value(double t) const;
    /// The dissipativity bound varsigma with 0 <= sigma <= varsigma.
    double bound() const;
    bool is_zero() const;

private:
    std::variant<Constant, Profile> model_{Constant{}};
};

/// Sign-checked implicit assembly failure (the M-matrix property does not hold).
class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BoundaryClosure {
    enum class Kind { Dynamical, Neumann, DirichletZero };
    enum class Side { Physical, Cap };

    Kind kind = Kind::Neumann;
    Side side = Side::Physical;
    std::size_t segment = 0;
    SigmaModel sigma;
    /// One-sided derivative weights along the segment, d_s u ~ w0 u0 + w1 u1 + w2 u2.
    std::array<double, 3> weights{};
};

/**
 * sigma du0/dt = -d_nu u = d_s u at the physical boundary of a segment.
 *
 * On every simulated boundary the outward normal points back along the
 * segment, so d_nu = -d_s with s the distance from the boundary. With sigma = 0
 * the closure degenerates to the algebraic Neumann row.
 */
BoundaryClosure dynamical_closure(const SigmaModel& sigma, const Grid& grid, std::size_t segment,
                                  BoundaryClosure::Side side = BoundaryClosure::Side::Physical);
/// Neumann row. On the cap side it replaces the Dirichlet cap (used for closed test problems).
BoundaryClosure neumann_closure(const Grid& grid, std::size_t segment,
                                BoundaryClosure::Side side = BoundaryClosure::Side::Physical);
BoundaryClosure dirichlet_closure(const Grid& grid, std::size_t segment,
                                  BoundaryClosure::Side side = BoundaryClosure::Side::Physical);

/// One closure per physical boundary: dynamical for sigma, Neumann when sigma is identically zero.
std::vector<BoundaryClosure> physical_closures(const Grid& grid, const SigmaModel& sigma);
std::vector<BoundaryClosure> neumann_closures(const Grid& grid);

/**
 * Second-order Laplacian on the truncated grid,
 *   (u_{i-1} - 2u_i + u_{i+1})/h^2 + ((N-1)/r_i)(u_{i+1} - u_{i-1})/(2h),
 * in tridiagonal form. Rows of boundary and cap nodes are zero; their
 * behaviour comes from the closures and the Dirichlet cap.
 */
struct SpatialOperator {
    Eigen::VectorXd sub;
    Eigen::VectorXd diag;
    Eigen::VectorXd super;
    double h = 0.0;
    Eigen::Index nodes_per_segment = 0;
};

SpatialOperator assemble_laplacian(const Grid& grid, int N);

/// Op u on interior nodes; zero on boundary and cap nodes.
Eigen::VectorXd apply(const SpatialOperator& op, const Eigen::VectorXd& u);

/// Smallest dt for which the implicit boundary row keeps the M-matrix sign pattern.
double monotone_dt_floor(const SpatialOperator& op);

struct TridiagonalSystem {
    Eigen::VectorXd lower;  // lower[i] multiplies x[i-1]
    Eigen::VectorXd diag;
    Eigen::VectorXd upper;  // upper[i] multiplies x[i+1]
    Eigen::VectorXd rhs;
};

Eigen::VectorXd solve_tridiagonal(const TridiagonalSystem& system);

/**
 * Backward-Euler system (I - dt Op) u_new = explicit_rhs with the closures.
 *
 * Interior rows take explicit_rhs; boundary rows take their closure ODE, using
 * `previous` for the sigma du0/dt term; cap rows enforce 0. The second-order
 * boundary stencil's u2 entry is eliminated against row 1, so the result is
 * tridiagonal. A Neumann closure on the cap side replaces the Dirichlet cap of
 * its segment. Throws AssemblyError if the reduced matrix is not strictly
 * diagonally dominant with non-positive off-diagonals.
 */
TridiagonalSystem assemble_implicit(const SpatialOperator& op, std::span<const BoundaryClosure> closures,
                                    const Eigen::VectorXd& explicit_rhs, const Eigen::VectorXd& previous, double dt,
                                    double t_new);

}  // namespace fujita
