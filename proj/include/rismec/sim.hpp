#pragma once

#include "rismec/controller.hpp"
#include "rismec/types.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rismec {

/// Poisson means of the per-slot task demands.
struct ArrivalMeans {
    double w_l = 5e5;     ///< cycles
    double a_bits = 2e6;  ///< bits
    double w_r = 5e7;     ///< cycles

    bool operator==(const ArrivalMeans&) const = default;
};

/// Edge CPU share drawn uniformly from (sigma_lo, sigma_hi].
struct EdgeModel {
    double sigma_lo = 0.5;
    double sigma_hi = 1.0;

    bool operator==(const EdgeModel&) const = default;
};

struct ScenarioSpec {
    SystemConfig system;
    ControllerConfig ctrl;
    Scheme scheme = Scheme::optimized;
    long horizon = 100000;
    std::uint64_t seed = 1;
    ArrivalMeans arrivals;
    EdgeModel edge;
    std::vector<double> chi_set{10.0, 25.0, 50.0, 100.0};
    int flat_phases = 16;
    CommSolverSettings solver;
    double explosion_factor = 1e3;  ///< abort once Y > factor * d_avg * T

    void validate() const;

    bool operator==(const ScenarioSpec&) const = default;
};

/// Sub-stream identifiers; each source of randomness has its own engine so
/// schemes and V values see identical channels, tasks and edge shares.
enum class Stream : std::uint64_t { arrival = 201, edge = 202, ris = 301 };

struct SlotRecord {
    long t = 0;
    Scheme scheme = Scheme::optimized;
    double v = 0.0;
    double f_l = 0.0;
    SlotMetrics metrics;
    VirtualQueues queues;  ///< state the decision was taken with
    bool degenerate = false;
};

using RecordSink = std::function<void(const SlotRecord&)>;

struct TailPoint {
    double prob = 0.0;   ///< exceedance probability
    double delay = 0.0;  ///< s, the (1 - prob)-quantile of d_tot
};

struct RunSummary {
    Scheme scheme = Scheme::optimized;
    double v = 0.0;
    long slots = 0;
    double avg_power = 0.0;
    double avg_power_local = 0.0;
    double avg_power_uplink = 0.0;
    double avg_delay = 0.0;
    double outage_prob = 0.0;
    double y_over_t = 0.0;
    double z_over_t = 0.0;
    double q50 = 0.0, q90 = 0.0, q99 = 0.0, q999 = 0.0;
    long degenerate_slots = 0;
    long capped_slots = 0;
    std::vector<TailPoint> tail;                        ///< quantile grid for the survivor function
    std::vector<std::pair<long, double>> power_trace;   ///< (t, running mean of p_tot)
};

class QueueExplosion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Poisson draws of the three demands; zero draws are redrawn.
TaskArrival draw_arrival(Rng& rng, const ArrivalMeans& means);

EdgeState draw_edge(Rng& rng, const EdgeModel& model);

/// Lower empirical quantile x_(ceil(q n)) of an ascending sample.
double empirical_quantile(const std::vector<double>& sorted, double q);

/// Fraction of the ascending sample strictly above x.
double survivor(const std::vector<double>& sorted, double x);

/// Streaming accumulator behind RunSummary. Delays are kept for the tail.
class SummaryBuilder {
public:
    SummaryBuilder(Scheme scheme, double v, long horizon);
    void add(const SlotRecord& rec);
    RunSummary finish(const VirtualQueues& final_queues) &&;

private:
    RunSummary s_;
    long horizon_;
    double sum_p_ = 0.0, sum_pl_ = 0.0, sum_pu_ = 0.0, sum_d_ = 0.0;
    long outages_ = 0;
    std::vector<long> checkpoints_;
    std::size_t next_checkpoint_ = 0;
    std::vector<double> delays_;
};

/**
 * Runs `spec.horizon` slots: channel, task and edge share are drawn, the
 * controller decides, the realized metrics are evaluated and the virtual
 * queues updated. Every record is passed to `sink` in slot order.
 *
 * Throws QueueExplosion when Y exceeds the explosion bound.
 */
RunSummary run_scenario(const ScenarioSpec& spec, const RecordSink& sink = {});

/// One run per V with the same seed; summaries sorted by ascending V.
std::vector<RunSummary> sweep_v(const ScenarioSpec& spec, const std::vector<double>& v_values, int jobs = 1);

/// Runs fn(0..count-1) on up to `jobs` threads. Rethrows the first failure.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace rismec
