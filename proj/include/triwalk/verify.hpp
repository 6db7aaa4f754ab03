#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "triwalk/exact.hpp"
#include "triwalk/kernel.hpp"

namespace triwalk {

struct VerifyCheck {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass() const { return value <= threshold; }
};

/// Full verification battery for a built kernel: structural audits,
/// row uniformity over n steps, Green function agreement, intertwining
/// and the reflection-angle identity.
inline std::vector<VerifyCheck> verify_kernel(const WalkKernel& kernel, int steps) {
    const WedgeGeometry& g = kernel.geom;
    const int m_row = kernel.absorbing_row;
    std::vector<VerifyCheck> checks;

    const KernelAudit audit = audit_kernel(kernel);
    checks.push_back({"row-stochastic", audit.max_row_sum_dev, 1e-14});
    checks.push_back({"step-geometry", audit.max_step_mismatch, 1e-12});
    checks.push_back({"condition-1",
                      std::max({audit.max_incoming_above, audit.max_incoming_apex,
                                audit.max_incoming_below}),
                      1e-13});
    checks.push_back({"condition-2", audit.max_incoming_same, 1e-13});
    checks.push_back({"condition-3", audit.max_band_step_dev, 1e-13});

    RowDistribution dist = initial_distribution(kernel);
    double uniformity = 0.0;
    for (int n = 0; n < steps; ++n) {
        dist = propagate_step(kernel, dist);
        uniformity = std::max(uniformity, uniformity_deviation(dist));
    }
    checks.push_back({"uniformity", uniformity, 1e-10});
    checks.push_back({"mass-conservation", std::abs(dist.total() - 1.0), 1e-12});

    const GreenTable green = green_solve(chain1d(g, m_row));
    double green_dev = 0.0;
    for (int k = 0; k < m_row; ++k)
        green_dev = std::max(green_dev, std::abs(green_closed(k, m_row, g) - green.visits[k]));
    checks.push_back({"green", green_dev, 1e-10});

    checks.push_back({"intertwining",
                      intertwining_residual(kernel, chain1d(g, m_row), std::min(steps, 100)),
                      1e-12});

    const auto [theta_l, theta_r] = reflection_angles(kernel);
    checks.push_back({"reflection-angles",
                      std::max(std::abs(theta_l - g.angles.alpha),
                               std::abs(theta_r - g.angles.beta)),
                      1e-10});
    return checks;
}

}  // namespace triwalk
