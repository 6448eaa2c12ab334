#pragma once

#include "rismec/types.hpp"

#include <stdexcept>

namespace rismec {

struct CommSolverSettings {
    double kkt_tol = 1e-6;
    int max_iters = 200;
    double fixed_point_damping = 0.5;

    void validate() const;

    bool operator==(const CommSolverSettings&) const = default;
};

/// Raised when every subcarrier has zero CNR, so no rate can be bought.
class NoUsableSubcarrier : public std::runtime_error {
public:
    NoUsableSubcarrier() : std::runtime_error("no usable subcarrier") {}
};

/**
 * Minimizer of V gamma f^3 + (y + z) w_l / f over [f_l_min, f_l_max]:
 * the stationary point ((y+z) w_l / (3 V gamma))^(1/4), clamped.
 */
double solve_local_cpu(double w_l, double y, double z, double v, const SystemConfig& cfg);

/// p_b = max(0, level - 1/alpha_b); bins with alpha_b = 0 get nothing.
Vec waterfill_at_level(const Vec& cnr, double level);

/// Water level whose allocation spends exactly `total` watts.
double waterfill_level(const Vec& cnr, double total);

/// V sum(p) + (y + z) a_bits / R(p). Infinite when R = 0 and y + z > 0.
double comm_objective(const Vec& p_bins, const Vec& cnr, double a_bits, double y, double z, double v,
                      double spacing);

struct PowerAllocation {
    Vec p_bins;
    double level = 0.0;
    int iterations = 0;
    bool converged = false;
    enum class Bound { interior, lower, upper } bound = Bound::interior;
};

/**
 * Optimal subcarrier powers for a fixed CNR profile.
 *
 * The optimum is a water-filling allocation whose level mu solves
 *   mu = (y+z) a_bits W / (V ln2 R(mu)^2)
 * unless the total-power box [p_min, p_max] binds first. The level is found
 * by a damped fixed-point iteration safeguarded by bisection on the bracket
 * spanned by the two total-power bounds.
 *
 * Throws NoUsableSubcarrier if every CNR is zero.
 */
PowerAllocation solve_power_allocation_detailed(const Vec& cnr, double a_bits, double y, double z, double v,
                                                const SystemConfig& cfg, const CommSolverSettings& settings = {});

inline Vec solve_power_allocation(const Vec& cnr, double a_bits, double y, double z, double v,
                                  const SystemConfig& cfg, const CommSolverSettings& settings = {}) {
    return solve_power_allocation_detailed(cnr, a_bits, y, z, v, cfg, settings).p_bins;
}

/**
 * Largest normalized violation of the KKT system of the power subproblem at
 * a feasible `p_bins`: stationarity on active bins, dual feasibility on idle
 * bins, and the sign of the total-power multiplier implied by which bound is
 * active. Gradients are divided by V plus the largest delay-gradient
 * magnitude, so the value is dimensionless and zero at the optimum.
 */
double kkt_residual(const Vec& p_bins, const Vec& cnr, double a_bits, double y, double z, double v,
                    const SystemConfig& cfg);

}  // namespace rismec
