#pragma once

#include "rismec/allocator.hpp"
#include "rismec/channel.hpp"
#include "rismec/ris.hpp"
#include "rismec/types.hpp"

#include <string>
#include <string_view>

namespace rismec {

/**
 * How the surface is configured each slot.
 *
 * optimized:  greedy Lorentzian search.
 * flat:       greedy design for a frequency-flat surface, deployed on the
 *             Lorentzian hardware (nearest carrier response per element).
 * random:     random feasible Lorentzian parameters.
 * direct:     no surface.
 * flat_ideal: the flat design on a hypothetical flat unit-modulus surface.
 */
enum class Scheme { optimized, flat, random, direct, flat_ideal };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

struct ControllerConfig {
    double v = 1.0;         ///< power weight of the drift-plus-penalty objective
    double d_avg = 0.1;     ///< s
    double d_max = 0.11;    ///< s
    double epsilon = 1e-2;  ///< outage tolerance
    bool outage_enabled = false;  ///< when false Z stays at 0

    void validate() const;

    bool operator==(const ControllerConfig&) const = default;
};

struct VirtualQueues {
    double y = 0.0;  ///< average-delay debt, s
    double z = 0.0;  ///< outage debt

    bool operator==(const VirtualQueues&) const = default;
};

/**
 * Everything the per-slot decision needs besides the random state: the
 * system, the RIS search space (with its candidate table cached), the flat
 * phase grid and the power solver settings.
 */
class DecisionContext {
public:
    DecisionContext(SystemConfig system, std::vector<double> chi_set, int flat_phases = 16,
                    CommSolverSettings solver = {});

    const SystemConfig& system() const { return system_; }
    const Vec& freqs() const { return freqs_; }
    const RisSearchSpace& space() const { return space_; }
    const CandidateTable& candidates() const { return table_; }
    int flat_phases() const { return flat_phases_; }
    const CommSolverSettings& solver() const { return solver_; }

private:
    SystemConfig system_;
    Vec freqs_;
    RisSearchSpace space_;
    CandidateTable table_;
    int flat_phases_;
    CommSolverSettings solver_;
};

/// RIS configuration chosen by `scheme` for this channel.
RisConfig configure_ris(Scheme scheme, const ChannelRealization& ch, const DecisionContext& ctx, Rng& ris_rng);

/**
 * Per-slot drift-plus-penalty decision: local CPU frequency in closed form,
 * the scheme's RIS configuration, then the optimal power allocation on the
 * resulting CNR profile. With no usable subcarrier the decision spreads
 * p_min uniformly and is flagged degenerate.
 *
 * `ris_rng` is only consumed by Scheme::random.
 */
SlotDecision decide(const VirtualQueues& queues, const TaskArrival& arrival, const ChannelRealization& ch,
                    const EdgeState& edge, Scheme scheme, const ControllerConfig& ctrl, const DecisionContext& ctx,
                    Rng& ris_rng);

/// V p_tot + (Y + Z) d_tot: the per-slot objective the decision minimizes.
double slot_objective(const SlotMetrics& m, const VirtualQueues& queues, const ControllerConfig& ctrl);

/// Y' = max(0, Y + d_tot - d_avg);  Z' = max(0, Z + 1{outage} - eps).
VirtualQueues update_queues(const VirtualQueues& queues, const SlotMetrics& metrics, const ControllerConfig& ctrl);

}  // namespace rismec
