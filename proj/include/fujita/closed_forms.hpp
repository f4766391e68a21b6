#pragma once

// Closed-form objects of the exterior Fujita problem: the spatially uniform ODE
// majorant, the Gaussian barriers U (any N) and V (two rays), their exact
// derivatives and residuals, and the geometric admissibility predicates under
// which the barriers are supersolutions. Everything here is templated on the
// scalar so the finite-difference oracles in the tests can run in long double.

#include "fujita/domain.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <variant>
#include <vector>

namespace fujita {

class BlowUpDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

class UnsupportedExponent : public DomainError {
public:
    using DomainError::DomainError;
};

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// ---------------------------------------------------------------------------
// ODE majorant  z' = z^p,  z(0) = z0

template <typename Scalar = double>
struct MajorantSpec {
    Scalar p;
    Scalar z0;

    /// Maximal existence time 1 / ((p-1) z0^(p-1)).
    Scalar t0() const { return Scalar(1) / ((p - Scalar(1)) * std::pow(z0, p - Scalar(1))); }
};

template <typename Scalar>
Scalar majorant_value(const MajorantSpec<Scalar>& spec, Scalar t)
{
    if (!(spec.p > Scalar(1)) || !(spec.z0 > Scalar(0)))
        throw DomainError("majorant needs p > 1 and z0 > 0");
    if (t < Scalar(0))
        throw DomainError("majorant evaluated at negative time");
    const Scalar base = std::pow(spec.z0, Scalar(1) - spec.p) - (spec.p - Scalar(1)) * t;
    if (!(base > Scalar(0)))
        throw BlowUpDomainError("majorant evaluated at or beyond its blow-up time t0");
    return std::pow(base, Scalar(-1) / (spec.p - Scalar(1)));
}

// ---------------------------------------------------------------------------
// Barrier constants

template <typename Scalar = double>
struct SupersolutionConstants {
    Scalar A;
    Scalar gamma;
};

/// gamma = 1/(p-1), A = (1/2) (N/2 - 1/(p-1))^(1/(p-1)); requires p > 1 + 2/N.
template <typename Scalar>
SupersolutionConstants<Scalar> supersolution_constants(int N, Scalar p)
{
    if (N < 1)
        throw DomainError("dimension must be at least 1");
    if (!(p > Scalar(1)))
        throw UnsupportedExponent("exponent must exceed 1");
    const Scalar gamma = Scalar(1) / (p - Scalar(1));
    const Scalar base = Scalar(N) / Scalar(2) - gamma;
    if (!(p > Scalar(1) + Scalar(2) / Scalar(N)) || !(base > Scalar(0)))
        throw UnsupportedExponent("barrier constants need p > 1 + 2/N");
    return {Scalar(0.5) * std::pow(base, gamma), gamma};
}

// ---------------------------------------------------------------------------
// Shifted Gaussian barrier U(x,t) = A (t+1)^(-gamma) exp(-|x+mu|^2 / (4(t+1)))

template <typename Scalar = double>
struct UBarrier {
    int N = 3;
    Scalar p = 3;
    VectorX<Scalar> mu;
    Scalar A = 0;
    Scalar gamma = 0;

    static UBarrier make(int N, Scalar p, VectorX<Scalar> mu)
    {
        if (mu.size() != N)
            throw DomainError("shift mu must have N components");
        const auto c = supersolution_constants<Scalar>(N, p);
        return {N, p, std::move(mu), c.A, c.gamma};
    }
    static UBarrier make(int N, Scalar p) { return make(N, p, VectorX<Scalar>::Zero(N)); }
};

template <typename Scalar>
Scalar eval_U(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, Scalar t)
{
    const Scalar tau = t + Scalar(1);
    return U.A * std::pow(tau, -U.gamma) * std::exp(-(x + U.mu).squaredNorm() / (Scalar(4) * tau));
}

template <typename Scalar>
Scalar eval_U_time_derivative(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, Scalar t)
{
    const Scalar tau = t + Scalar(1);
    const Scalar q = (x + U.mu).squaredNorm();
    return (-U.gamma / tau + q / (Scalar(4) * tau * tau)) * eval_U(U, x, t);
}

template <typename Scalar>
Scalar eval_U_laplacian(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, Scalar t)
{
    const Scalar tau = t + Scalar(1);
    const Scalar q = (x + U.mu).squaredNorm();
    return (-Scalar(U.N) / (Scalar(2) * tau) + q / (Scalar(4) * tau * tau)) * eval_U(U, x, t);
}

template <typename Scalar>
Scalar eval_U_normal_derivative(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, const VectorX<Scalar>& nu,
                                Scalar t)
{
    const Scalar tau = t + Scalar(1);
    return (-(x + U.mu).dot(nu) / (Scalar(2) * tau)) * eval_U(U, x, t);
}

/// d_t U - Delta U - U^p, using d_t U - Delta U = ((N - 2 gamma) / (2(t+1))) U.
template <typename Scalar>
Scalar interior_residual_U(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, Scalar t)
{
    const Scalar u = eval_U(U, x, t);
    return (Scalar(U.N) - Scalar(2) * U.gamma) / (Scalar(2) * (t + Scalar(1))) * u - std::pow(u, U.p);
}

/// sigma d_t U + d_nu U at a boundary point with outward normal nu.
template <typename Scalar>
Scalar boundary_residual_U(const UBarrier<Scalar>& U, const VectorX<Scalar>& x, const VectorX<Scalar>& nu,
                           Scalar sigma, Scalar t)
{
    if (sigma < Scalar(0))
        throw DomainError("boundary coefficient sigma must be non-negative");
    const Scalar tau = t + Scalar(1);
    const VectorX<Scalar> y = x + U.mu;
    const Scalar factor = (-Scalar(2) * sigma * U.gamma - y.dot(nu)) / (Scalar(2) * tau) +
                          sigma * y.squaredNorm() / (Scalar(4) * tau * tau);
    return factor * eval_U(U, x, t);
}

// ---------------------------------------------------------------------------
// Two-ray barrier V: U with shift mu1 on x <= a and mu2 on x >= b (N = 1)

template <typename Scalar = double>
struct VBarrier {
    Scalar a = -1;
    Scalar b = 1;
    Scalar mu1 = 0;
    Scalar mu2 = 0;
    Scalar p = 4;
    Scalar A = 0;
    Scalar gamma = 0;

    static VBarrier make(Scalar a, Scalar b, Scalar mu1, Scalar mu2, Scalar p)
    {
        if (!(a < b))
            throw DomainError("two-ray barrier needs a < b");
        if (!(p > Scalar(3)))
            throw UnsupportedExponent("two-ray barrier needs p > 3");
        const auto c = supersolution_constants<Scalar>(1, p);
        return {a, b, mu1, mu2, p, c.A, c.gamma};
    }

    /// Shift of the branch containing x; throws for x inside (a, b).
    Scalar shift_at(Scalar x) const
    {
        if (x <= a)
            return mu1;
        if (x >= b)
            return mu2;
        throw DomainError("point lies inside the removed interval (a, b)");
    }

    UBarrier<Scalar> branch(Scalar x) const
    {
        return {1, p, VectorX<Scalar>::Constant(1, shift_at(x)), A, gamma};
    }
};

template <typename Scalar>
Scalar eval_V(const VBarrier<Scalar>& V, Scalar x, Scalar t)
{
    const VectorX<Scalar> point = VectorX<Scalar>::Constant(1, x);
    return eval_U(V.branch(x), point, t);
}

template <typename Scalar>
Scalar interior_residual_V(const VBarrier<Scalar>& V, Scalar x, Scalar t)
{
    const VectorX<Scalar> point = VectorX<Scalar>::Constant(1, x);
    return interior_residual_U(V.branch(x), point, t);
}

/// sigma d_t V + d_nu V at x = a (nu = +1) or x = b (nu = -1).
template <typename Scalar>
Scalar boundary_residual_V(const VBarrier<Scalar>& V, Scalar x, Scalar sigma, Scalar t)
{
    Scalar nu;
    if (x == V.a)
        nu = Scalar(1);
    else if (x == V.b)
        nu = Scalar(-1);
    else
        throw DomainError("two-ray boundary residual needs x = a or x = b");
    const VectorX<Scalar> point = VectorX<Scalar>::Constant(1, x);
    const VectorX<Scalar> normal = VectorX<Scalar>::Constant(1, nu);
    return boundary_residual_U(V.branch(x), point, normal, sigma, t);
}

// ---------------------------------------------------------------------------
// Admissibility

/// (y + mu) . nu(y) < -varsigma N. The normal must have unit length.
template <typename Scalar>
bool mu_admissible(const VectorX<Scalar>& y, const VectorX<Scalar>& nu_y, const VectorX<Scalar>& mu, Scalar varsigma,
                   int N)
{
    using std::abs;
    if (abs(nu_y.norm() - Scalar(1)) > Scalar(1e-10))
        throw DomainError("normal vector must have unit length");
    if (varsigma < Scalar(0))
        throw DomainError("sigma bound must be non-negative");
    return (y + mu).dot(nu_y) < -varsigma * Scalar(N);
}

/// Exterior of a ball with mu = 0: every boundary point is admissible iff R0 > varsigma N.
template <typename Scalar>
bool ball_admissible(Scalar R0, Scalar varsigma, int N)
{
    if (!(R0 > Scalar(0)))
        throw DomainError("ball radius must be positive");
    if (varsigma < Scalar(0))
        throw DomainError("sigma bound must be non-negative");
    return R0 > varsigma * Scalar(N);
}

/// -(a + mu1) - varsigma >= 0 and (b + mu2) - varsigma >= 0.
template <typename Scalar>
bool dim1_admissible(Scalar a, Scalar b, Scalar mu1, Scalar mu2, Scalar varsigma)
{
    if (!(a < b))
        throw DomainError("two-ray domain needs a < b");
    return -(a + mu1) - varsigma >= Scalar(0) && (b + mu2) - varsigma >= Scalar(0);
}

struct AdmissibilityReport {
    std::vector<bool> pointwise;
    std::vector<std::size_t> admissible;  // indices forming the discrete neighbourhood N_y
    bool all = false;
};

AdmissibilityReport admissibility_report(const std::vector<Eigen::VectorXd>& boundary_points,
                                         const std::vector<Eigen::VectorXd>& normals, const Eigen::VectorXd& mu,
                                         double varsigma, int N);

using SupersolutionSpec = std::variant<UBarrier<double>, VBarrier<double>>;

/// Barrier value at global grid node i (radial U is evaluated at r e_1).
double barrier_at(const SupersolutionSpec& spec, const Grid& grid, Eigen::Index i, double t);
Eigen::VectorXd sample_barrier(const SupersolutionSpec& spec, const Grid& grid, double t);

// ---------------------------------------------------------------------------
// Hypotheses on the Neumann comparison data psi

struct PsiReport {
    Eigen::VectorXd residual;              // Delta_h psi + psi^p on interior nodes, 0 elsewhere
    std::vector<Eigen::Index> violations;  // interior nodes below -tolerance
    double min_residual = 0.0;
    double tolerance = 0.0;
    bool interior_pass = true;
    double min_boundary_flux = 0.0;        // min over physical boundaries of -d_nu psi (one-sided)
    bool boundary_compatible = true;
    double max_second_difference = 0.0;    // C^2 proxy
    bool pass = true;
};

/**
 * Discrete form of  Delta psi + psi^p >= 0  on the truncated grid.
 *
 * Uses the interior stencil of assemble_laplacian. Besides the interior
 * inequality, the report checks that psi does not push flux out through the
 * physical boundary (-d_nu psi >= -tol with the one-sided stencil). That is the
 * discrete condition under which the Neumann run starting from psi is
 * non-decreasing in time.
 */
PsiReport check_psi_hypotheses(const Field& psi, const Grid& grid, double p, double tol_scale = 1e-10);

}  // namespace fujita
