#include <doctest.h>

#include "rismec/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace rismec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("rismec_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentManifest small_tradeoff(const fs::path& out) {
    auto m = preset_manifest(Preset::tradeoff);
    m.base.horizon = 150;
    m.base.system.n_elements = 8;
    m.out_dir = out.string();
    return m;
}

std::size_t count_files(const fs::path& dir, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename().string().rfind(prefix, 0) == 0) ++n;
    return n;
}

}  // namespace

TEST_CASE("five V values by four schemes") {
    const auto dir = scratch("cells");
    auto m = small_tradeoff(dir);
    REQUIRE(m.v_list.size() == 5);
    REQUIRE(m.schemes.size() == 4);
    m.jobs = 2;
    const auto result = run_experiment(m);
    CHECK(result.exit_code == 0);
    CHECK(result.cells.size() == 20);
    CHECK(count_files(dir, "summary_") == 20);
    CHECK(count_files(dir, "records_") == 20);
    CHECK(count_files(dir, "aggregate_") == 1);
    CHECK(fs::exists(dir / "aggregate_tradeoff.csv"));

    std::istringstream agg(slurp(dir / "aggregate_tradeoff.csv"));
    std::string line;
    std::getline(agg, line);
    CHECK(line.rfind("scheme,V,avg_power_W,avg_delay_s", 0) == 0);
    int rows = 0;
    while (std::getline(agg, line)) ++rows;
    CHECK(rows == 20);

    std::istringstream rec(slurp(dir / "records_optimized_v0.csv"));
    std::getline(rec, line);
    CHECK(line == "t,scheme,V,p_l,p_u,p_tot,f_l,rate,d_l,d_u,d_r,d_tot,outage,Y,Z");
    rows = 0;
    while (std::getline(rec, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 14);
    }
    CHECK(rows == 150);
    fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical") {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    auto ma = small_tradeoff(a);
    ma.write_records = false;
    auto mb = ma;
    mb.out_dir = b.string();
    mb.jobs = 3;
    run_experiment(ma);
    run_experiment(mb);
    CHECK(slurp(a / "aggregate_tradeoff.csv") == slurp(b / "aggregate_tradeoff.csv"));
    CHECK(slurp(a / "summary_random_v2.txt").size() > 0);
    CHECK(count_files(a, "records_") == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("summary files echo a manifest that re-parses") {
    const auto dir = scratch("echo");
    auto m = small_tradeoff(dir);
    m.v_list = {0.5};
    m.schemes = {Scheme::direct};
    run_experiment(m);
    const std::string text = slurp(dir / "summary_direct_v0.txt");
    CHECK(text.find("summary.avg_power_W = ") != std::string::npos);
    ParseOptions opts;
    opts.ignore_prefixes = {"summary."};
    CHECK(parse_manifest_text(text, "summary", opts) == m);
    fs::remove_all(dir);
}

TEST_CASE("failed cells are reported without stopping the rest") {
    const auto dir = scratch("fail");
    auto m = small_tradeoff(dir);
    m.schemes = {Scheme::direct};
    m.v_list = {1e-3, 1e6};  // the large V starves the uplink and Y diverges
    m.base.explosion_factor = 1.0;
    std::ostringstream log;
    const auto result = run_experiment(m, &log);
    CHECK(result.exit_code == 1);
    CHECK(result.cells[0].summary.has_value());
    CHECK_FALSE(result.cells[1].summary.has_value());
    CHECK(log.str().find("direct V=1000000 failed") != std::string::npos);
    CHECK(fs::exists(dir / "summary_direct_v0.txt"));
    CHECK_FALSE(fs::exists(dir / "summary_direct_v1.txt"));
    fs::remove_all(dir);
}

TEST_CASE("survivor aggregate resolves the tail down to 1e-3") {
    const auto dir = scratch("tail");
    auto m = preset_manifest(Preset::survivor);
    m.base.horizon = 100000;
    m.base.system.n_elements = 0;
    m.schemes = {Scheme::direct};
    m.write_records = false;
    m.out_dir = dir.string();
    const auto result = run_experiment(m);
    REQUIRE(result.exit_code == 0);
    std::istringstream agg(slurp(dir / "aggregate_survivor.csv"));
    std::string line;
    std::getline(agg, line);
    CHECK(line == "scheme,V,exceed_prob,delay_s");
    double smallest = 1.0, prev_delay = 0.0;
    int rows = 0;
    while (std::getline(agg, line)) {
        ++rows;
        std::istringstream cols(line);
        std::string scheme, v, p, d;
        std::getline(cols, scheme, ',');
        std::getline(cols, v, ',');
        std::getline(cols, p, ',');
        std::getline(cols, d, ',');
        smallest = std::min(smallest, std::stod(p));
        CHECK(std::stod(d) >= prev_delay);
        prev_delay = std::stod(d);
    }
    CHECK(rows >= 30);
    CHECK(smallest <= 1e-3);
    fs::remove_all(dir);
}
