#pragma once

#include "rismec/types.hpp"

#include <cmath>
#include <stdexcept>

namespace rismec {

template <typename Scalar>
struct LocalCost {
    Scalar delay;  ///< s
    Scalar power;  ///< W
};

/// Local execution delay w_l / f_l and CPU power gamma f_l^3.
template <typename Scalar>
LocalCost<Scalar> eval_local(Scalar w_l, Scalar f_l, Scalar gamma) {
    if (!(w_l > Scalar(0)) || !(f_l > Scalar(0)) || !(gamma > Scalar(0)))
        throw std::invalid_argument("eval_local: w_l, f_l and gamma must be positive");
    return {w_l / f_l, gamma * f_l * f_l * f_l};
}

/// Shannon sum rate W * sum_b log2(1 + alpha_b p_b), bits/s.
template <typename Derived1, typename Derived2>
typename Derived1::Scalar eval_rate(const Eigen::MatrixBase<Derived1>& p_bins,
                                    const Eigen::MatrixBase<Derived2>& cnr,
                                    typename Derived1::Scalar spacing) {
    using Scalar = typename Derived1::Scalar;
    if (p_bins.size() != cnr.size())
        throw std::invalid_argument("eval_rate: power and CNR vectors differ in length");
    Scalar acc(0);
    for (Eigen::Index b = 0; b < p_bins.size(); ++b) acc += std::log1p(cnr(b) * p_bins(b));
    return spacing * acc / std::log(Scalar(2));
}

/// Cap applied to the uplink delay when the rate is zero.
inline double rate_zero_delay_cap(double d_max) { return 10.0 * d_max; }

/**
 * Assembles the realized metrics of one slot: local, uplink and remote
 * delays, powers, and the outage indicator against `d_max`.
 *
 * A zero rate makes the uplink delay infinite; it is replaced by
 * rate_zero_delay_cap(d_max) and the raw value is kept in `d_u_raw`.
 */
SlotMetrics eval_slot(const SlotDecision& decision, const TaskArrival& arrival, const EdgeState& edge,
                      const Vec& cnr, const SystemConfig& cfg, double d_max);

}  // namespace rismec
