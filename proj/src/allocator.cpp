#include "rismec/allocator.hpp"

#include "rismec/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace rismec {

void CommSolverSettings::validate() const {
    if (!(kkt_tol > 0.0)) throw std::invalid_argument("kkt_tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(fixed_point_damping > 0.0 && fixed_point_damping <= 1.0))
        throw std::invalid_argument("fixed_point_damping must lie in (0, 1]");
}

double solve_local_cpu(double w_l, double y, double z, double v, const SystemConfig& cfg) {
    if (!(w_l > 0.0) || y < 0.0 || z < 0.0 || !(v > 0.0))
        throw std::invalid_argument("solve_local_cpu: need w_l > 0, queues >= 0, V > 0");
    const double unconstrained = std::pow((y + z) * w_l / (3.0 * v * cfg.gamma), 0.25);
    return std::clamp(unconstrained, cfg.f_l_min, cfg.f_l_max);
}

Vec waterfill_at_level(const Vec& cnr, double level) {
    Vec p = Vec::Zero(cnr.size());
    for (Eigen::Index b = 0; b < cnr.size(); ++b)
        if (cnr(b) > 0.0) p(b) = std::max(0.0, level - 1.0 / cnr(b));
    return p;
}

double waterfill_level(const Vec& cnr, double total) {
    std::vector<double> floors;
    floors.reserve(static_cast<std::size_t>(cnr.size()));
    for (Eigen::Index b = 0; b < cnr.size(); ++b)
        if (cnr(b) > 0.0) floors.push_back(1.0 / cnr(b));
    if (floors.empty()) throw NoUsableSubcarrier();
    std::sort(floors.begin(), floors.end());

    double acc = 0.0;
    for (std::size_t k = 0; k < floors.size(); ++k) {
        acc += floors[k];
        const double level = (total + acc) / double(k + 1);
        if (k + 1 == floors.size() || level <= floors[k + 1]) return level;
    }
    return floors.back();  // unreachable
}

double comm_objective(const Vec& p_bins, const Vec& cnr, double a_bits, double y, double z, double v,
                      double spacing) {
    const double weight = y + z;
    const double power = v * p_bins.sum();
    if (weight == 0.0) return power;
    const double rate = eval_rate(p_bins, cnr, spacing);
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return power + weight * a_bits / rate;
}

namespace {

// Rescales into [lo, hi]; the trailing nudges absorb rounding in the rescaled sum.
void project_total(Vec& p, double lo, double hi) {
    const double total = p.sum();
    if (total > hi) p *= hi / total;
    else if (total < lo) p *= lo / total;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 64 && p.sum() > hi; ++i) p *= 1.0 - eps;
    for (int i = 0; i < 64 && p.sum() < lo; ++i) p *= 1.0 + eps;
}

}  // namespace

PowerAllocation solve_power_allocation_detailed(const Vec& cnr, double a_bits, double y, double z, double v,
                                                const SystemConfig& cfg, const CommSolverSettings& settings) {
    settings.validate();
    if (!(a_bits > 0.0) || !(v > 0.0) || y < 0.0 || z < 0.0)
        throw std::invalid_argument("solve_power_allocation: need a_bits > 0, V > 0, queues >= 0");
    if (cnr.size() != cfg.B) throw std::invalid_argument("solve_power_allocation: CNR length differs from B");
    if (!(cnr.array() > 0.0).any()) throw NoUsableSubcarrier();

    PowerAllocation out;
    const double weight = y + z;
    const double lo_level = waterfill_level(cnr, cfg.p_min);
    const double hi_level = waterfill_level(cnr, cfg.p_max);

    auto finish = [&](double level, PowerAllocation::Bound bound) {
        out.level = level;
        out.bound = bound;
        out.p_bins = waterfill_at_level(cnr, level);
        project_total(out.p_bins, cfg.p_min, cfg.p_max);
        return out;
    };

    if (weight == 0.0) {
        out.converged = true;
        return finish(lo_level, PowerAllocation::Bound::lower);
    }

    // Stationarity target T(mu); h(mu) = mu - T(mu) is increasing.
    const double scale = weight * a_bits * cfg.W / (v * std::numbers::ln2);
    auto target = [&](double level) {
        const double rate = eval_rate(waterfill_at_level(cnr, level), cnr, cfg.W);
        return scale / (rate * rate);
    };

    if (lo_level - target(lo_level) >= 0.0) {
        out.converged = true;
        return finish(lo_level, PowerAllocation::Bound::lower);
    }
    if (hi_level - target(hi_level) <= 0.0) {
        out.converged = true;
        return finish(hi_level, PowerAllocation::Bound::upper);
    }

    const double damping = settings.fixed_point_damping;
    double lo = lo_level, hi = hi_level;
    double level = 0.5 * (lo + hi);
    double width_before = hi - lo;
    for (int it = 0; it < settings.max_iters; ++it) {
        out.iterations = it + 1;
        const double t = target(level);
        const double gap = level - t;
        if (std::abs(gap) <= 1e-3 * settings.kkt_tol * level) {
            out.converged = true;
            break;
        }
        (gap > 0.0 ? hi : lo) = level;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
            out.converged = true;
            break;
        }
        double next = (1.0 - damping) * level + damping * t;
        // Fall back to bisection when the fixed-point step leaves the bracket
        // or the bracket stopped halving.
        const bool stalled = (it % 2 == 1) && (hi - lo) > 0.5 * width_before;
        if (!(next > lo && next < hi) || stalled) next = 0.5 * (lo + hi);
        if (it % 2 == 1) width_before = hi - lo;
        level = next;
    }
    return finish(level, PowerAllocation::Bound::interior);
}

double kkt_residual(const Vec& p_bins, const Vec& cnr, double a_bits, double y, double z, double v,
                    const SystemConfig& cfg) {
    const Eigen::Index n = p_bins.size();
    const double weight = y + z;
    const double rate = eval_rate(p_bins, cnr, cfg.W);
    if (weight > 0.0 && !(rate > 0.0)) return std::numeric_limits<double>::infinity();

    // grad_b = V - delay_b
    Vec delay_grad = Vec::Zero(n);
    if (weight > 0.0) {
        const double k = weight * a_bits * cfg.W / (std::numbers::ln2 * rate * rate);
        for (Eigen::Index b = 0; b < n; ++b) delay_grad(b) = k * cnr(b) / (1.0 + cnr(b) * p_bins(b));
    }
    const Vec grad = Vec::Constant(n, v) - delay_grad;
    const double norm = v + delay_grad.cwiseAbs().maxCoeff();

    const double total = p_bins.sum();
    const double active_floor = 1e-14 * total;
    const bool at_upper = total >= cfg.p_max * (1.0 - 1e-12);
    const bool at_lower = total <= cfg.p_min * (1.0 + 1e-12);

    double grad_sum = 0.0;
    int active = 0;
    for (Eigen::Index b = 0; b < n; ++b)
        if (p_bins(b) > active_floor) {
            grad_sum += grad(b);
            ++active;
        }
    // Multiplier of the total-power constraint: >= 0 at p_max, <= 0 at p_min.
    double lambda = active > 0 ? -grad_sum / active : 0.0;
    if (at_upper) lambda = std::max(lambda, 0.0);
    else if (at_lower) lambda = std::min(lambda, 0.0);
    else lambda = 0.0;

    double worst = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
        const double r = grad(b) + lambda;
        worst = std::max(worst, p_bins(b) > active_floor ? std::abs(r) : std::max(0.0, -r));
    }
    return worst / norm;
}

}  // namespace rismec
