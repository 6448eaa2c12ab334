#pragma once

#include "rismec/manifest.hpp"
#include "rismec/sim.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rismec {

/// One (scheme, V) cell of an experiment.
struct CellResult {
    Scheme scheme = Scheme::optimized;
    double v = 0.0;
    std::size_t v_index = 0;
    std::optional<RunSummary> summary;
    std::string error;  ///< non-empty when the cell failed
};

struct ExperimentResult {
    std::vector<CellResult> cells;  ///< scheme-major, V-minor
    std::vector<std::string> files;
    std::string aggregate_path;
    int exit_code = 0;
};

/// Column order of the per-slot record files.
inline constexpr const char* kRecordHeader = "t,scheme,V,p_l,p_u,p_tot,f_l,rate,d_l,d_u,d_r,d_tot,outage,Y,Z";

void write_record(std::ostream& os, const SlotRecord& rec);

/// Key-value summary of one cell followed by the full manifest echo.
std::string format_summary(const RunSummary& s, const ExperimentManifest& m);

/// Plot-ready table for the manifest's preset, built from successful cells.
std::string aggregate_table(const ExperimentManifest& m, const std::vector<CellResult>& cells);

/**
 * Runs every (scheme, V) cell, up to `m.jobs` at a time, and writes into
 * `m.out_dir`:
 *   records_<scheme>_v<i>.csv   per-slot records (when enabled)
 *   summary_<scheme>_v<i>.txt   RunSummary plus manifest echo
 *   aggregate_<preset>.csv      the preset's plot data
 * Failed cells are reported on `log` and give a nonzero exit code; the
 * remaining cells still produce their files.
 */
ExperimentResult run_experiment(const ExperimentManifest& m, std::ostream* log = nullptr);

}  // namespace rismec
