#pragma once

#include "rismec/sim.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rismec {

/// Experiment layouts with plot-ready aggregates. Each preset fixes some controller keys.
enum class Preset { tradeoff, survivor, survivor_outage, power_trace, custom };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);

struct ExperimentManifest {
    ScenarioSpec base;
    std::vector<double> v_list;
    std::vector<Scheme> schemes;
    std::string out_dir = "out";
    Preset preset = Preset::custom;
    int jobs = 1;
    bool write_records = true;

    void validate() const;

    bool operator==(const ExperimentManifest&) const = default;
};

/// Error raised for malformed manifests; `what()` carries source and line.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ParseOptions {
    std::optional<Preset> preset;       ///< overrides experiment.preset
    std::vector<std::string> ignore_prefixes;  ///< keys silently skipped (e.g. "summary.")
};

/**
 * Parses the flat `dotted.key = value [unit]` format. Blank lines and text
 * after `#` are ignored. Dimensional keys accept a unit suffix (mW, GHz, ms,
 * dBm/Hz, ... or the SI unit); a bare number is read in the key's default
 * display unit, as listed by defaults_listing().
 *
 * The preset is resolved first and its values applied; explicit keys then
 * override, except keys the preset fixes, which must agree with it.
 */
ExperimentManifest parse_manifest_text(std::string_view text, std::string_view source = "<manifest>",
                                       const ParseOptions& options = {});

ExperimentManifest parse_manifest(const std::string& path, const ParseOptions& options = {});

/// The manifest as parseable text, every dimensional value in SI units so a
/// re-parse reproduces the same doubles.
std::string echo_manifest(const ExperimentManifest& m);

/// Every key with its default value, display unit and provenance.
std::string defaults_listing();

/// Default manifest for a preset (no file, no overrides).
ExperimentManifest preset_manifest(Preset p);

}  // namespace rismec
