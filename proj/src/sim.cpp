#include "rismec/sim.hpp"

#include "rismec/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace rismec {

void ScenarioSpec::validate() const {
    system.validate();
    ctrl.validate();
    solver.validate();
    if (horizon < 1) throw std::invalid_argument("horizon must be at least 1 slot");
    if (!(arrivals.w_l > 0.0 && arrivals.a_bits > 0.0 && arrivals.w_r > 0.0))
        throw std::invalid_argument("arrival means must be positive");
    if (!(edge.sigma_lo >= 0.0 && edge.sigma_lo <= edge.sigma_hi && edge.sigma_hi <= 1.0 && edge.sigma_hi > 0.0))
        throw std::invalid_argument("edge share bounds must satisfy 0 <= lo <= hi <= 1, hi > 0");
    if (chi_set.empty()) throw std::invalid_argument("quality factor set is empty");
    if (flat_phases < 2) throw std::invalid_argument("flat phase grid needs at least 2 points");
    if (!(explosion_factor > 0.0)) throw std::invalid_argument("explosion factor must be positive");
}

namespace {

double poisson_positive(Rng& rng, double mean) {
    std::poisson_distribution<long long> dist(mean);
    long long k = 0;
    while (k == 0) k = dist(rng);
    return static_cast<double>(k);
}

}  // namespace

TaskArrival draw_arrival(Rng& rng, const ArrivalMeans& means) {
    TaskArrival a;
    a.w_l = poisson_positive(rng, means.w_l);
    a.a_bits = poisson_positive(rng, means.a_bits);
    a.w_r = poisson_positive(rng, means.w_r);
    return a;
}

EdgeState draw_edge(Rng& rng, const EdgeModel& model) {
    if (model.sigma_lo == model.sigma_hi) return {model.sigma_hi};
    // uniform_real_distribution samples [lo, hi); reflect onto (lo, hi].
    std::uniform_real_distribution<double> dist(model.sigma_lo, model.sigma_hi);
    return {model.sigma_lo + model.sigma_hi - dist(rng)};
}

double empirical_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double n = static_cast<double>(sorted.size());
    auto idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

double survivor(const std::vector<double>& sorted, double x) {
    if (sorted.empty()) return 0.0;
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(above) / static_cast<double>(sorted.size());
}

SummaryBuilder::SummaryBuilder(Scheme scheme, double v, long horizon) : horizon_(horizon) {
    s_.scheme = scheme;
    s_.v = v;
    constexpr long kTracePoints = 200;
    for (long i = 1; i <= kTracePoints; ++i) {
        const long t = (horizon * i + kTracePoints - 1) / kTracePoints;
        if (checkpoints_.empty() || t > checkpoints_.back()) checkpoints_.push_back(t);
    }
    delays_.reserve(static_cast<std::size_t>(horizon));
}

void SummaryBuilder::add(const SlotRecord& rec) {
    const auto& m = rec.metrics;
    sum_p_ += m.p_tot;
    sum_pl_ += m.p_l;
    sum_pu_ += m.p_u;
    sum_d_ += m.d_tot;
    outages_ += m.outage ? 1 : 0;
    s_.degenerate_slots += rec.degenerate ? 1 : 0;
    s_.capped_slots += m.rate_capped ? 1 : 0;
    delays_.push_back(m.d_tot);
    ++s_.slots;
    if (next_checkpoint_ < checkpoints_.size() && s_.slots == checkpoints_[next_checkpoint_]) {
        s_.power_trace.emplace_back(s_.slots, sum_p_ / double(s_.slots));
        ++next_checkpoint_;
    }
}

RunSummary SummaryBuilder::finish(const VirtualQueues& final_queues) && {
    const double n = static_cast<double>(std::max(s_.slots, 1L));
    s_.avg_power = sum_p_ / n;
    s_.avg_power_local = sum_pl_ / n;
    s_.avg_power_uplink = sum_pu_ / n;
    s_.avg_delay = sum_d_ / n;
    s_.outage_prob = double(outages_) / n;
    s_.y_over_t = final_queues.y / n;
    s_.z_over_t = final_queues.z / n;

    std::sort(delays_.begin(), delays_.end());
    s_.q50 = empirical_quantile(delays_, 0.5);
    s_.q90 = empirical_quantile(delays_, 0.9);
    s_.q99 = empirical_quantile(delays_, 0.99);
    s_.q999 = empirical_quantile(delays_, 0.999);
    // Exceedance probabilities 10^(-k/10) down to one sample.
    for (int k = 0; k <= 60; ++k) {
        const double p = std::pow(10.0, -double(k) / 10.0);
        if (p * n < 1.0) break;
        s_.tail.push_back({p, k == 0 ? delays_.front() : empirical_quantile(delays_, 1.0 - p)});
    }
    (void)horizon_;
    return std::move(s_);
}

RunSummary run_scenario(const ScenarioSpec& spec, const RecordSink& sink) {
    spec.validate();
    const DecisionContext ctx(spec.system, spec.chi_set, spec.flat_phases, spec.solver);
    auto channel_rng = ChannelStreams::from_seed(spec.seed);
    Rng arrival_rng = make_stream(spec.seed, static_cast<std::uint64_t>(Stream::arrival));
    Rng edge_rng = make_stream(spec.seed, static_cast<std::uint64_t>(Stream::edge));
    Rng ris_rng = make_stream(spec.seed, static_cast<std::uint64_t>(Stream::ris));

    const double explosion = spec.explosion_factor * spec.ctrl.d_avg * double(spec.horizon);
    SummaryBuilder summary(spec.scheme, spec.ctrl.v, spec.horizon);
    VirtualQueues queues;
    for (long t = 0; t < spec.horizon; ++t) {
        const ChannelRealization ch = draw_channel(channel_rng, spec.system);
        const TaskArrival arrival = draw_arrival(arrival_rng, spec.arrivals);
        const EdgeState edge = draw_edge(edge_rng, spec.edge);
        const SlotDecision decision = decide(queues, arrival, ch, edge, spec.scheme, spec.ctrl, ctx, ris_rng);
        const Vec cnr = cascaded_cnr(ch, decision.ris, spec.system);
        const SlotMetrics metrics = eval_slot(decision, arrival, edge, cnr, spec.system, spec.ctrl.d_max);

        SlotRecord rec;
        rec.t = t;
        rec.scheme = spec.scheme;
        rec.v = spec.ctrl.v;
        rec.f_l = decision.f_l;
        rec.metrics = metrics;
        rec.queues = queues;
        rec.degenerate = decision.degenerate;
        summary.add(rec);
        if (sink) sink(rec);

        queues = update_queues(queues, metrics, spec.ctrl);
        if (queues.y > explosion) {
            std::ostringstream os;
            os << "virtual queue Y diverged at slot " << t << " (Y = " << queues.y << " s > " << explosion
               << " s); the delay target is likely infeasible for scheme " << to_string(spec.scheme)
               << " at V = " << spec.ctrl.v;
            throw QueueExplosion(os.str());
        }
    }
    return std::move(summary).finish(queues);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::clamp<long>(jobs, 1, static_cast<long>(std::max<std::size_t>(count, 1))));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<RunSummary> sweep_v(const ScenarioSpec& spec, const std::vector<double>& v_values, int jobs) {
    if (v_values.empty()) throw std::invalid_argument("sweep_v: empty V list");
    std::vector<double> sorted = v_values;
    std::sort(sorted.begin(), sorted.end());
    std::vector<RunSummary> out(sorted.size());
    parallel_for(sorted.size(), jobs, [&](std::size_t i) {
        ScenarioSpec cell = spec;
        cell.ctrl.v = sorted[i];
        out[i] = run_scenario(cell);
    });
    return out;
}

}  // namespace rismec
