#pragma once

#include "fujita/closed_forms.hpp"
#include "fujita/domain.hpp"

#include <variant>

namespace fujita {

struct ZeroData {};

/// amplitude * exp(-((s - offset)/width)^2), s = distance from the physical boundary.
struct GaussianData {
    double amplitude = 1.0;
    double width = 4.0;
    double offset = 0.0;
};

/// scale * barrier(., 0) for the U or V barrier of the run's (N, p).
struct ScaledBarrierData {
    double scale = 0.5;
    SupersolutionSpec barrier;
};

/// amplitude * (R0/r)^(N-2) for N >= 3, the constant amplitude otherwise.
struct HarmonicData {
    double amplitude = 1.0;
};

/**
 * Grid profile with  Delta_h psi = -theta psi^p  on its support, a
 * Neumann-compatible first row (-3psi0 + 4psi1 - psi2 = 0), psi0 = amplitude,
 * and psi = 0 from its first zero onward. For theta in [0, 1) it satisfies
 * the discrete  Delta psi + psi^p >= 0  with margin (1 - theta) psi^p.
 */
struct LaneEmdenData {
    double amplitude = 1.0;
    double theta = 0.5;
    double scale = 1.0;  // multiplies the finished profile, so scale < 1 gives a fraction of the same shape
};

using InitialData = std::variant<ZeroData, GaussianData, ScaledBarrierData, HarmonicData, LaneEmdenData>;

/// Evaluates the untruncated data on the grid (p is used by LaneEmdenData only).
Eigen::VectorXd sample_initial_data(const InitialData& data, const Grid& grid, double p);

/// Sampled data passed through truncate_initial_data.
Field make_initial_field(const InitialData& data, const Grid& grid, double p);

}  // namespace fujita
