#include "rismec/model.hpp"

#include <limits>
#include <sstream>

namespace rismec {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu), static_cast<std::uint32_t>(stream >> 32),
                      0x5249534du};
    return Rng(seq);
}

void SystemConfig::validate() const {
    if (!(p_min > 0.0)) fail("p_min must be positive");
    if (!(p_min < p_max)) fail("p_min must be below p_max");
    if (!(f_l_min > 0.0)) fail("f_l_min must be positive");
    if (!(f_l_min < f_l_max)) fail("f_l_min must be below f_l_max");
    if (B < 1) fail("B must be at least 1");
    if (n_elements < 0) fail("n_elements must be non-negative");
    if (l_taps < 1) fail("l_taps must be at least 1");
    if (!(n0 > 0.0)) fail("n0 must be positive");
    if (!(gamma > 0.0)) fail("gamma must be positive");
    if (!(W > 0.0)) fail("W must be positive");
    if (!(f_c > 0.0)) fail("f_c must be positive");
    if (!(f_max > 0.0)) fail("f_max must be positive");
    if (f_c - 0.5 * (B - 1) * W <= 0.0) fail("lowest subcarrier frequency must be positive");
}

void TaskArrival::validate() const {
    if (!(w_l > 0.0) || !(a_bits > 0.0) || !(w_r > 0.0))
        fail("task arrival demands must all be strictly positive");
}

void EdgeState::validate() const {
    if (!(sigma > 0.0 && sigma <= 1.0)) fail("edge CPU share must lie in (0, 1]");
}

void RisSearchSpace::validate() const {
    if (omega.empty()) fail("resonance frequency set is empty");
    if (chi_set.empty()) fail("quality factor set is empty");
    for (double f : omega)
        if (!(f > 0.0)) fail("resonance frequencies must be positive");
    for (double c : chi_set)
        if (!(c > 0.0)) fail("quality factors must be positive");
}

void SlotDecision::validate(const SystemConfig& cfg) const {
    if (p_bins.size() != cfg.B) fail("decision carries the wrong number of subcarrier powers");
    if ((p_bins.array() < 0.0).any()) fail("negative subcarrier power");
    const double total = p_bins.sum();
    // One ulp of slack on the total-power box.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon();
    if (total < cfg.p_min * (1.0 - slack) || total > cfg.p_max * (1.0 + slack)) {
        std::ostringstream os;
        os << "total transmit power " << total << " W outside [" << cfg.p_min << ", " << cfg.p_max << "]";
        fail(os.str());
    }
    if (f_l < cfg.f_l_min || f_l > cfg.f_l_max) fail("local CPU frequency outside its bounds");
}

SlotMetrics eval_slot(const SlotDecision& decision, const TaskArrival& arrival, const EdgeState& edge,
                      const Vec& cnr, const SystemConfig& cfg, double d_max) {
    arrival.validate();
    edge.validate();
    SlotMetrics m;
    const auto local = eval_local(arrival.w_l, decision.f_l, cfg.gamma);
    m.d_l = local.delay;
    m.p_l = local.power;
    m.rate = eval_rate(decision.p_bins, cnr, cfg.W);
    if (m.rate > 0.0) {
        m.d_u_raw = arrival.a_bits / m.rate;
        m.d_u = m.d_u_raw;
    } else {
        m.d_u_raw = std::numeric_limits<double>::infinity();
        m.d_u = rate_zero_delay_cap(d_max);
        m.rate_capped = true;
    }
    m.d_r = arrival.w_r / (edge.sigma * cfg.f_max);
    m.d_tot = m.d_l + m.d_u + m.d_r;
    m.p_u = decision.p_u();
    m.p_tot = m.p_l + m.p_u;
    m.outage = m.d_tot > d_max;
    return m;
}

}  // namespace rismec
