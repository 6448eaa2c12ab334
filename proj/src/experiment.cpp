#include "rismec/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rismec {

namespace {

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string cell_stem(const CellResult& c) {
    return std::string(to_string(c.scheme)) + "_v" + std::to_string(c.v_index);
}

// Buffers rows and flushes in blocks.
class RecordWriter {
public:
    explicit RecordWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write " + path);
        out_ << kRecordHeader << '\n';
    }
    ~RecordWriter() { flush(); }

    void add(const SlotRecord& rec) {
        write_record(buf_, rec);
        if (++pending_ >= 4096) flush();
    }

    void flush() {
        out_ << buf_.str();
        buf_.str({});
        buf_.clear();
        pending_ = 0;
    }

private:
    std::ofstream out_;
    std::ostringstream buf_;
    int pending_ = 0;
};

}  // namespace

void write_record(std::ostream& os, const SlotRecord& r) {
    const auto& m = r.metrics;
    os << r.t << ',' << to_string(r.scheme) << ',' << num(r.v) << ',' << num(m.p_l) << ',' << num(m.p_u) << ','
       << num(m.p_tot) << ',' << num(r.f_l) << ',' << num(m.rate) << ',' << num(m.d_l) << ',' << num(m.d_u) << ','
       << num(m.d_r) << ',' << num(m.d_tot) << ',' << (m.outage ? 1 : 0) << ',' << num(r.queues.y) << ','
       << num(r.queues.z) << '\n';
}

std::string format_summary(const RunSummary& s, const ExperimentManifest& m) {
    std::ostringstream os;
    os << "summary.scheme = " << to_string(s.scheme) << "\n"
       << "summary.V = " << num(s.v) << "\n"
       << "summary.slots = " << s.slots << "\n"
       << "summary.avg_power_W = " << num(s.avg_power) << "\n"
       << "summary.avg_power_local_W = " << num(s.avg_power_local) << "\n"
       << "summary.avg_power_uplink_W = " << num(s.avg_power_uplink) << "\n"
       << "summary.avg_delay_s = " << num(s.avg_delay) << "\n"
       << "summary.outage_prob = " << num(s.outage_prob) << "\n"
       << "summary.Y_T_over_T = " << num(s.y_over_t) << "\n"
       << "summary.Z_T_over_T = " << num(s.z_over_t) << "\n"
       << "summary.delay_q50_s = " << num(s.q50) << "\n"
       << "summary.delay_q90_s = " << num(s.q90) << "\n"
       << "summary.delay_q99_s = " << num(s.q99) << "\n"
       << "summary.delay_q999_s = " << num(s.q999) << "\n"
       << "summary.degenerate_slots = " << s.degenerate_slots << "\n"
       << "summary.capped_slots = " << s.capped_slots << "\n"
       << "# scenario\n"
       << echo_manifest(m);
    return os.str();
}

std::string aggregate_table(const ExperimentManifest& m, const std::vector<CellResult>& cells) {
    std::ostringstream os;
    switch (m.preset) {
        case Preset::survivor:
        case Preset::survivor_outage:
            os << "scheme,V,exceed_prob,delay_s\n";
            for (const auto& c : cells) {
                if (!c.summary) continue;
                for (const auto& p : c.summary->tail)
                    os << to_string(c.scheme) << ',' << num(c.v) << ',' << num(p.prob) << ',' << num(p.delay) << '\n';
            }
            break;
        case Preset::power_trace:
            os << "scheme,V,t,avg_power_W\n";
            for (const auto& c : cells) {
                if (!c.summary) continue;
                for (const auto& [t, p] : c.summary->power_trace)
                    os << to_string(c.scheme) << ',' << num(c.v) << ',' << t << ',' << num(p) << '\n';
            }
            break;
        case Preset::tradeoff:
        case Preset::custom:
            os << "scheme,V,avg_power_W,avg_delay_s,outage_prob,Y_T_over_T,Z_T_over_T,q50_s,q90_s,q99_s,q999_s\n";
            for (const auto& c : cells) {
                if (!c.summary) continue;
                const auto& s = *c.summary;
                os << to_string(c.scheme) << ',' << num(c.v) << ',' << num(s.avg_power) << ',' << num(s.avg_delay)
                   << ',' << num(s.outage_prob) << ',' << num(s.y_over_t) << ',' << num(s.z_over_t) << ','
                   << num(s.q50) << ',' << num(s.q90) << ',' << num(s.q99) << ',' << num(s.q999) << '\n';
            }
            break;
    }
    return os.str();
}

ExperimentResult run_experiment(const ExperimentManifest& m, std::ostream* log) {
    m.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(m.out_dir);
    fs::create_directories(out_dir);

    ExperimentResult result;
    for (Scheme s : m.schemes)
        for (std::size_t i = 0; i < m.v_list.size(); ++i) result.cells.push_back({s, m.v_list[i], i, {}, {}});

    parallel_for(result.cells.size(), m.jobs, [&](std::size_t idx) {
        CellResult& cell = result.cells[idx];
        ScenarioSpec spec = m.base;
        spec.scheme = cell.scheme;
        spec.ctrl.v = cell.v;
        try {
            if (m.write_records) {
                RecordWriter writer((out_dir / ("records_" + cell_stem(cell) + ".csv")).string());
                cell.summary = run_scenario(spec, [&](const SlotRecord& r) { writer.add(r); });
            } else {
                cell.summary = run_scenario(spec);
            }
            std::ofstream(out_dir / ("summary_" + cell_stem(cell) + ".txt")) << format_summary(*cell.summary, m);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });

    int failed = 0;
    for (const auto& cell : result.cells) {
        if (cell.summary) {
            if (m.write_records) result.files.push_back((out_dir / ("records_" + cell_stem(cell) + ".csv")).string());
            result.files.push_back((out_dir / ("summary_" + cell_stem(cell) + ".txt")).string());
        } else {
            ++failed;
            if (log) *log << "cell " << to_string(cell.scheme) << " V=" << num(cell.v) << " failed: " << cell.error << "\n";
        }
    }
    result.aggregate_path = (out_dir / ("aggregate_" + std::string(to_string(m.preset)) + ".csv")).string();
    std::ofstream(result.aggregate_path) << aggregate_table(m, result.cells);
    result.files.push_back(result.aggregate_path);
    if (failed > 0) {
        if (log) *log << failed << " of " << result.cells.size() << " cells failed\n";
        result.exit_code = 1;
    }
    return result;
}

}  // namespace rismec
