#include "rismec/controller.hpp"

#include <algorithm>

namespace rismec {

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::optimized: return "optimized";
        case Scheme::flat: return "flat";
        case Scheme::random: return "random";
        case Scheme::direct: return "direct";
        case Scheme::flat_ideal: return "flat-ideal";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "optimized") return Scheme::optimized;
    if (name == "flat") return Scheme::flat;
    if (name == "random") return Scheme::random;
    if (name == "direct") return Scheme::direct;
    if (name == "flat-ideal") return Scheme::flat_ideal;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

void ControllerConfig::validate() const {
    if (!(v > 0.0)) throw std::invalid_argument("V must be positive");
    if (!(d_avg > 0.0)) throw std::invalid_argument("d_avg must be positive");
    if (!(d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

DecisionContext::DecisionContext(SystemConfig system, std::vector<double> chi_set, int flat_phases,
                                 CommSolverSettings solver)
    : system_(std::move(system)),
      freqs_(bin_frequencies(system_)),
      space_(subcarrier_search_space(freqs_, std::move(chi_set))),
      table_(CandidateTable::build(space_, freqs_)),
      flat_phases_(flat_phases),
      solver_(solver) {
    system_.validate();
    solver_.validate();
    if (flat_phases_ < 2) throw std::invalid_argument("flat phase grid needs at least 2 points");
}

RisConfig configure_ris(Scheme scheme, const ChannelRealization& ch, const DecisionContext& ctx, Rng& ris_rng) {
    switch (scheme) {
        case Scheme::optimized: return greedy_optimize(ch, ctx.candidates(), ctx.system());
        case Scheme::flat:
            return realize_on_lorentzian(flat_optimize(ch, ctx.flat_phases(), ctx.system()), ctx.candidates(),
                                         ctx.system().f_c);
        case Scheme::flat_ideal: return flat_optimize(ch, ctx.flat_phases(), ctx.system());
        case Scheme::random:
            return random_config(ris_rng, ctx.space(), ctx.freqs(), static_cast<int>(ch.elements()));
        case Scheme::direct: return RisConfig{};
    }
    return RisConfig{};
}

SlotDecision decide(const VirtualQueues& queues, const TaskArrival& arrival, const ChannelRealization& ch,
                    const EdgeState& edge, Scheme scheme, const ControllerConfig& ctrl, const DecisionContext& ctx,
                    Rng& ris_rng) {
    arrival.validate();
    edge.validate();
    const SystemConfig& cfg = ctx.system();
    const double z = ctrl.outage_enabled ? queues.z : 0.0;

    SlotDecision d;
    d.f_l = solve_local_cpu(arrival.w_l, queues.y, z, ctrl.v, cfg);
    d.ris = configure_ris(scheme, ch, ctx, ris_rng);
    const Vec cnr = cascaded_cnr(ch, d.ris, cfg);
    try {
        d.p_bins = solve_power_allocation(cnr, arrival.a_bits, queues.y, z, ctrl.v, cfg, ctx.solver());
    } catch (const NoUsableSubcarrier&) {
        d.p_bins = Vec::Constant(cfg.B, cfg.p_min / cfg.B);
        d.degenerate = true;
    }
    return d;
}

double slot_objective(const SlotMetrics& m, const VirtualQueues& queues, const ControllerConfig& ctrl) {
    const double z = ctrl.outage_enabled ? queues.z : 0.0;
    return ctrl.v * m.p_tot + (queues.y + z) * m.d_tot;
}

VirtualQueues update_queues(const VirtualQueues& queues, const SlotMetrics& metrics, const ControllerConfig& ctrl) {
    VirtualQueues next;
    next.y = std::max(0.0, queues.y + metrics.d_tot - ctrl.d_avg);
    if (ctrl.outage_enabled) next.z = std::max(0.0, queues.z + (metrics.outage ? 1.0 : 0.0) - ctrl.epsilon);
    return next;
}

}  // namespace rismec
