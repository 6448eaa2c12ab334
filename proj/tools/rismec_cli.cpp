// Command-line front end: runs manifest-driven offloading experiments.

#include "rismec/experiment.hpp"
#include "rismec/manifest.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace rismec;

    CLI::App app{"RIS-aided MEC offloading simulator"};
    app.require_subcommand(0, 1);

    bool print_defaults = false;
    app.add_flag("--print-defaults", print_defaults, "List every manifest key with its default and provenance");

    std::string manifest_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 0;
    bool echo = false;

    auto* run = app.add_subcommand("run", "Run every (scheme, V) cell of a manifest");
    run->add_option("manifest", manifest_path, "Manifest file (defaults only when omitted)");
    run->add_option("--preset", preset_name, "tradeoff | survivor | survivor-outage | power-trace | custom");
    run->add_option("--seed", seed, "Override run.seed");
    run->add_option("--out", out_dir, "Override experiment.out");
    run->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);
    run->add_flag("--echo", echo, "Print the resolved manifest and exit");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults) {
        std::cout << defaults_listing();
        return 0;
    }
    if (!run->parsed()) {
        std::cout << app.help();
        return 0;
    }

    try {
        ParseOptions opts;
        if (!preset_name.empty()) opts.preset = parse_preset(preset_name);
        ExperimentManifest m = manifest_path.empty() ? parse_manifest_text("", "<defaults>", opts)
                                                     : parse_manifest(manifest_path, opts);
        if (seed) m.base.seed = *seed;
        if (!out_dir.empty()) m.out_dir = out_dir;
        if (jobs > 0) m.jobs = jobs;
        m.validate();
        if (echo) {
            std::cout << echo_manifest(m);
            return 0;
        }

        std::cerr << "running " << m.schemes.size() * m.v_list.size() << " cells (preset "
                  << to_string(m.preset) << ", T = " << m.base.horizon << ") into " << m.out_dir << "\n";
        const auto result = run_experiment(m, &std::cerr);
        std::cerr << "aggregate: " << result.aggregate_path << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
