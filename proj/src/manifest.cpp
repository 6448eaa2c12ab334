#include "rismec/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rismec {

std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::tradeoff: return "tradeoff";
        case Preset::survivor: return "survivor";
        case Preset::survivor_outage: return "survivor-outage";
        case Preset::power_trace: return "power-trace";
        case Preset::custom: return "custom";
    }
    return "?";
}

Preset parse_preset(std::string_view name) {
    if (name == "tradeoff") return Preset::tradeoff;
    if (name == "survivor") return Preset::survivor;
    if (name == "survivor-outage") return Preset::survivor_outage;
    if (name == "power-trace") return Preset::power_trace;
    if (name == "custom") return Preset::custom;
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

namespace {

using M = ExperimentManifest;

// ---------------------------------------------------------------------------
// Units

enum class Dim { none, power, frequency, psd, time, length, bits };

struct Unit {
    std::string_view name;
    double factor;  // SI per unit; 0 marks a logarithmic (dBm) unit
};

const std::vector<Unit>& units_of(Dim d) {
    static const std::vector<Unit> none{};
    static const std::vector<Unit> power{{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"dBm", 0.0}};
    static const std::vector<Unit> freq{{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    static const std::vector<Unit> psd{{"W/Hz", 1.0}, {"dBm/Hz", 0.0}};
    static const std::vector<Unit> time{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
    static const std::vector<Unit> length{{"m", 1.0}};
    static const std::vector<Unit> bits{{"bits", 1.0}, {"kb", 1e3}, {"Mb", 1e6}};
    switch (d) {
        case Dim::none: return none;
        case Dim::power: return power;
        case Dim::frequency: return freq;
        case Dim::psd: return psd;
        case Dim::time: return time;
        case Dim::length: return length;
        case Dim::bits: return bits;
    }
    return none;
}

std::string_view dim_name(Dim d) {
    switch (d) {
        case Dim::none: return "dimensionless";
        case Dim::power: return "power";
        case Dim::frequency: return "frequency";
        case Dim::psd: return "noise density";
        case Dim::time: return "time";
        case Dim::length: return "length";
        case Dim::bits: return "data size";
    }
    return "?";
}

const Unit* find_unit(Dim d, std::string_view name) {
    for (const auto& u : units_of(d))
        if (u.name == name) return &u;
    return nullptr;
}

double to_si(double value, const Unit& u) { return u.factor == 0.0 ? dbm_to_watt(value) : value * u.factor; }
double from_si(double value, const Unit& u) { return u.factor == 0.0 ? watt_to_dbm(value) : value / u.factor; }

std::string fmt(double x, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!piece.empty()) out.push_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && std::isfinite(out);
}

// ---------------------------------------------------------------------------
// Key registry

enum class Kind { real, integer, boolean, real_list, scheme_list, text };

struct KeySpec {
    std::string name;
    Kind kind;
    Dim dim = Dim::none;
    std::string display_unit;  // unit assumed for bare numbers
    std::string provenance;
    std::function<double&(M&)> real;
    std::function<long long(const M&)> get_int;
    std::function<void(M&, long long)> set_int;
    std::function<bool&(M&)> boolean;
    std::function<std::vector<double>&(M&)> list;
    std::function<std::string(const M&)> get_text;
    std::function<void(M&, const std::string&)> set_text;
};

KeySpec make_key(std::string name, Kind kind, Dim dim, std::string unit, std::string prov) {
    KeySpec k;
    k.name = std::move(name);
    k.kind = kind;
    k.dim = dim;
    k.display_unit = std::move(unit);
    k.provenance = std::move(prov);
    return k;
}

const char* kTable = "reference scenario parameter table";
const char* kSetup = "reference scenario setup";
const char* kArtifact = "implementation default";

KeySpec real_key(std::string name, Dim dim, std::string unit, std::string prov, std::function<double&(M&)> acc) {
    KeySpec k = make_key(std::move(name), Kind::real, dim, std::move(unit), std::move(prov));
    k.real = std::move(acc);
    return k;
}

template <typename Int>
KeySpec int_key(std::string name, std::string prov, std::function<Int&(M&)> acc) {
    KeySpec k = make_key(std::move(name), Kind::integer, Dim::none, "", std::move(prov));
    k.get_int = [acc](const M& m) { return static_cast<long long>(acc(const_cast<M&>(m))); };
    k.set_int = [acc](M& m, long long v) { acc(m) = static_cast<Int>(v); };
    return k;
}

KeySpec bool_key(std::string name, std::string prov, std::function<bool&(M&)> acc) {
    KeySpec k = make_key(std::move(name), Kind::boolean, Dim::none, "", std::move(prov));
    k.boolean = std::move(acc);
    return k;
}

KeySpec list_key(std::string name, std::string prov, std::function<std::vector<double>&(M&)> acc) {
    KeySpec k = make_key(std::move(name), Kind::real_list, Dim::none, "", std::move(prov));
    k.list = std::move(acc);
    return k;
}

const std::vector<KeySpec>& registry() {
    static const std::vector<KeySpec> keys = [] {
        std::vector<KeySpec> k;
        {
            KeySpec p = make_key("experiment.preset", Kind::text, Dim::none, "", kArtifact);
            p.get_text = [](const M& m) { return std::string(to_string(m.preset)); };
            p.set_text = [](M& m, const std::string& v) { m.preset = parse_preset(v); };
            k.push_back(p);
        }
        k.push_back(list_key("experiment.v_list", kArtifact, [](M& m) -> auto& { return m.v_list; }));
        {
            KeySpec s = make_key("experiment.schemes", Kind::scheme_list, Dim::none, "", kSetup);
            k.push_back(s);
        }
        {
            KeySpec o = make_key("experiment.out", Kind::text, Dim::none, "", kArtifact);
            o.get_text = [](const M& m) { return m.out_dir; };
            o.set_text = [](M& m, const std::string& v) { m.out_dir = v; };
            k.push_back(o);
        }
        k.push_back(int_key<int>("experiment.jobs", kArtifact, [](M& m) -> auto& { return m.jobs; }));
        k.push_back(bool_key("experiment.records", kArtifact, [](M& m) -> auto& { return m.write_records; }));

        k.push_back(int_key<long>("run.horizon", kArtifact, [](M& m) -> auto& { return m.base.horizon; }));
        {
            // full 64-bit range, so not routed through the double-based integer path
            KeySpec seed = make_key("run.seed", Kind::text, Dim::none, "", kArtifact);
            seed.get_text = [](const M& m) { return std::to_string(m.base.seed); };
            seed.set_text = [](M& m, const std::string& v) {
                std::uint64_t x = 0;
                const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
                if (ec != std::errc{} || end != v.data() + v.size())
                    throw std::invalid_argument("expected a non-negative 64-bit integer, got '" + v + "'");
                m.base.seed = x;
            };
            k.push_back(std::move(seed));
        }
        k.push_back(real_key("run.explosion_factor", Dim::none, "", kArtifact,
                             [](M& m) -> auto& { return m.base.explosion_factor; }));

        auto sys = [](M& m) -> SystemConfig& { return m.base.system; };
        k.push_back(real_key("system.p_min", Dim::power, "mW", kTable, [=](M& m) -> auto& { return sys(m).p_min; }));
        k.push_back(real_key("system.p_max", Dim::power, "mW", kTable, [=](M& m) -> auto& { return sys(m).p_max; }));
        k.push_back(real_key("system.f_c", Dim::frequency, "GHz", kTable, [=](M& m) -> auto& { return sys(m).f_c; }));
        k.push_back(real_key("system.W", Dim::frequency, "MHz", kTable, [=](M& m) -> auto& { return sys(m).W; }));
        k.push_back(int_key<int>("system.B", kTable, [=](M& m) -> auto& { return sys(m).B; }));
        k.push_back(real_key("system.n0", Dim::psd, "dBm/Hz", kTable, [=](M& m) -> auto& { return sys(m).n0; }));
        k.push_back(real_key("system.f_max", Dim::frequency, "GHz", kTable, [=](M& m) -> auto& { return sys(m).f_max; }));
        k.push_back(real_key("system.f_l_min", Dim::frequency, "GHz", kTable,
                             [=](M& m) -> auto& { return sys(m).f_l_min; }));
        k.push_back(real_key("system.f_l_max", Dim::frequency, "GHz", kTable,
                             [=](M& m) -> auto& { return sys(m).f_l_max; }));
        k.push_back(real_key("system.gamma", Dim::none, "", kTable, [=](M& m) -> auto& { return sys(m).gamma; }));
        k.push_back(int_key<int>("system.n_elements", kSetup, [=](M& m) -> auto& { return sys(m).n_elements; }));
        k.push_back(int_key<int>("system.l_taps", kSetup, [=](M& m) -> auto& { return sys(m).l_taps; }));
        k.push_back(real_key("system.device.x", Dim::length, "m", kSetup,
                             [=](M& m) -> auto& { return sys(m).geometry.device.x; }));
        k.push_back(real_key("system.device.y", Dim::length, "m", kSetup,
                             [=](M& m) -> auto& { return sys(m).geometry.device.y; }));
        k.push_back(real_key("system.ris.x", Dim::length, "m", kSetup, [=](M& m) -> auto& { return sys(m).geometry.ris.x; }));
        k.push_back(real_key("system.ris.y", Dim::length, "m", kSetup, [=](M& m) -> auto& { return sys(m).geometry.ris.y; }));
        k.push_back(real_key("system.ap.x", Dim::length, "m", kSetup, [=](M& m) -> auto& { return sys(m).geometry.ap.x; }));
        k.push_back(real_key("system.ap.y", Dim::length, "m", kSetup, [=](M& m) -> auto& { return sys(m).geometry.ap.y; }));
        k.push_back(real_key("system.pathloss.device_ris", Dim::none, "", kSetup,
                             [=](M& m) -> auto& { return sys(m).pathloss.device_ris; }));
        k.push_back(real_key("system.pathloss.ris_ap", Dim::none, "", kSetup,
                             [=](M& m) -> auto& { return sys(m).pathloss.ris_ap; }));
        k.push_back(real_key("system.pathloss.direct", Dim::none, "", kSetup,
                             [=](M& m) -> auto& { return sys(m).pathloss.direct; }));

        k.push_back(list_key("ris.chi_set", kSetup, [](M& m) -> auto& { return m.base.chi_set; }));
        k.push_back(int_key<int>("ris.flat_phases", kArtifact, [](M& m) -> auto& { return m.base.flat_phases; }));

        k.push_back(real_key("ctrl.d_avg", Dim::time, "ms", kSetup, [](M& m) -> auto& { return m.base.ctrl.d_avg; }));
        k.push_back(real_key("ctrl.d_max", Dim::time, "ms", kSetup, [](M& m) -> auto& { return m.base.ctrl.d_max; }));
        k.push_back(real_key("ctrl.epsilon", Dim::none, "", kSetup, [](M& m) -> auto& { return m.base.ctrl.epsilon; }));
        k.push_back(bool_key("ctrl.outage", kSetup, [](M& m) -> auto& { return m.base.ctrl.outage_enabled; }));

        k.push_back(real_key("arrival.w_l", Dim::none, "", kSetup, [](M& m) -> auto& { return m.base.arrivals.w_l; }));
        k.push_back(real_key("arrival.a_bits", Dim::bits, "bits", kSetup,
                             [](M& m) -> auto& { return m.base.arrivals.a_bits; }));
        k.push_back(real_key("arrival.w_r", Dim::none, "", kSetup, [](M& m) -> auto& { return m.base.arrivals.w_r; }));
        k.push_back(real_key("edge.sigma_lo", Dim::none, "", kArtifact, [](M& m) -> auto& { return m.base.edge.sigma_lo; }));
        k.push_back(real_key("edge.sigma_hi", Dim::none, "", kArtifact, [](M& m) -> auto& { return m.base.edge.sigma_hi; }));

        k.push_back(real_key("solver.kkt_tol", Dim::none, "", kArtifact, [](M& m) -> auto& { return m.base.solver.kkt_tol; }));
        k.push_back(int_key<int>("solver.max_iters", kArtifact, [](M& m) -> auto& { return m.base.solver.max_iters; }));
        k.push_back(real_key("solver.damping", Dim::none, "", kArtifact,
                             [](M& m) -> auto& { return m.base.solver.fixed_point_damping; }));
        return k;
    }();
    return keys;
}

const KeySpec* find_key(std::string_view name) {
    for (const auto& k : registry())
        if (k.name == name) return &k;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Presets

struct Forced {
    std::string key;
    std::string value;  // in SI text form
};

std::vector<Forced> forced_keys(Preset p) {
    switch (p) {
        case Preset::tradeoff:
        case Preset::survivor: return {{"ctrl.outage", "false"}};
        case Preset::survivor_outage:
        case Preset::power_trace:
            return {{"ctrl.outage", "true"}, {"ctrl.d_max", "0.110 s"}, {"ctrl.epsilon", "0.01"}};
        case Preset::custom: return {};
    }
    return {};
}

const std::vector<Scheme> kFourSchemes{Scheme::optimized, Scheme::flat, Scheme::random, Scheme::direct};

void set_value(M& m, const KeySpec& key, const std::string& raw);

}  // namespace

ExperimentManifest preset_manifest(Preset p) {
    M m;
    m.preset = p;
    m.schemes = kFourSchemes;
    switch (p) {
        case Preset::tradeoff:
        case Preset::custom: m.v_list = {1e-3, 1e-2, 1e-1, 1.0, 10.0}; break;
        case Preset::survivor:
        case Preset::survivor_outage:
        case Preset::power_trace: m.v_list = {10.0}; break;
    }
    for (const auto& f : forced_keys(p)) set_value(m, *find_key(f.key), f.value);
    return m;
}

void ExperimentManifest::validate() const {
    base.validate();
    if (v_list.empty()) throw std::invalid_argument("V list is empty");
    for (double v : v_list)
        if (!(v > 0.0)) throw std::invalid_argument("every V must be positive");
    if (schemes.empty()) throw std::invalid_argument("scheme list is empty");
    if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
    if (out_dir.empty()) throw std::invalid_argument("output directory is empty");
}

namespace {

void set_value(M& m, const KeySpec& key, const std::string& raw) {
    const std::string value = trim(raw);
    switch (key.kind) {
        case Kind::real: {
            const auto space = value.find_first_of(" \t");
            const std::string number = space == std::string::npos ? value : value.substr(0, space);
            const std::string unit = space == std::string::npos ? std::string{} : trim(value.substr(space));
            double x = 0.0;
            if (!parse_number(number, x)) throw std::invalid_argument("expected a number, got '" + value + "'");
            if (unit.empty()) {
                if (!key.display_unit.empty()) x = to_si(x, *find_unit(key.dim, key.display_unit));
            } else {
                const Unit* u = find_unit(key.dim, unit);
                if (!u)
                    throw std::invalid_argument("unit '" + unit + "' is not a " + std::string(dim_name(key.dim)) +
                                                " unit");
                x = to_si(x, *u);
            }
            key.real(m) = x;
            return;
        }
        case Kind::integer: {
            double x = 0.0;
            if (!parse_number(value, x) || x != std::floor(x) || std::abs(x) > 9.007199254740992e15)
                throw std::invalid_argument("expected an integer, got '" + value + "'");
            key.set_int(m, static_cast<long long>(x));
            return;
        }
        case Kind::boolean: {
            if (value == "true" || value == "on" || value == "yes" || value == "1") key.boolean(m) = true;
            else if (value == "false" || value == "off" || value == "no" || value == "0") key.boolean(m) = false;
            else throw std::invalid_argument("expected true/false, got '" + value + "'");
            return;
        }
        case Kind::real_list: {
            std::vector<double> xs;
            for (const auto& item : split_list(value)) {
                double x = 0.0;
                if (!parse_number(item, x)) throw std::invalid_argument("expected a number in list, got '" + item + "'");
                xs.push_back(x);
            }
            key.list(m) = std::move(xs);
            return;
        }
        case Kind::scheme_list: {
            std::vector<Scheme> xs;
            for (const auto& item : split_list(value)) xs.push_back(parse_scheme(item));
            m.schemes = std::move(xs);
            return;
        }
        case Kind::text: key.set_text(m, value); return;
    }
}

std::string get_value(const M& m, const KeySpec& key, bool display) {
    switch (key.kind) {
        case Kind::real: {
            const double si = key.real(const_cast<M&>(m));
            if (display && !key.display_unit.empty()) {
                const Unit& u = *find_unit(key.dim, key.display_unit);
                return fmt(from_si(si, u), 6) + " " + std::string(u.name);
            }
            if (key.dim == Dim::none) return fmt(si, display ? 6 : 17);
            return fmt(si) + " " + std::string(units_of(key.dim).front().name);
        }
        case Kind::integer: return std::to_string(key.get_int(m));
        case Kind::boolean: return key.boolean(const_cast<M&>(m)) ? "true" : "false";
        case Kind::real_list: {
            std::string out;
            for (double x : key.list(const_cast<M&>(m))) out += (out.empty() ? "" : ", ") + fmt(x, display ? 6 : 17);
            return out;
        }
        case Kind::scheme_list: {
            std::string out;
            for (Scheme s : m.schemes) out += (out.empty() ? "" : ", ") + std::string(to_string(s));
            return out;
        }
        case Kind::text: return key.get_text(m);
    }
    return {};
}

bool same_value(const M& a, const M& b, const KeySpec& key) {
    if (key.kind == Kind::real) {
        const double x = key.real(const_cast<M&>(a)), y = key.real(const_cast<M&>(b));
        return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y));
    }
    return get_value(a, key, false) == get_value(b, key, false);
}

struct Invariant {
    std::vector<std::string> keys;
    std::function<bool(const M&)> holds;
    std::string message;
};

const std::vector<Invariant>& invariants() {
    static const std::vector<Invariant> inv{
        {{"system.p_min"}, [](const M& m) { return m.base.system.p_min > 0.0; }, "p_min must be positive"},
        {{"system.p_min", "system.p_max"},
         [](const M& m) { return m.base.system.p_min < m.base.system.p_max; }, "p_min must be below p_max"},
        {{"system.f_l_min"}, [](const M& m) { return m.base.system.f_l_min > 0.0; }, "f_l_min must be positive"},
        {{"system.f_l_min", "system.f_l_max"},
         [](const M& m) { return m.base.system.f_l_min < m.base.system.f_l_max; }, "f_l_min must be below f_l_max"},
        {{"system.B"}, [](const M& m) { return m.base.system.B >= 1; }, "B must be at least 1"},
        {{"system.n_elements"}, [](const M& m) { return m.base.system.n_elements >= 0; }, "n_elements must be >= 0"},
        {{"system.l_taps"}, [](const M& m) { return m.base.system.l_taps >= 1; }, "l_taps must be at least 1"},
        {{"system.n0"}, [](const M& m) { return m.base.system.n0 > 0.0; }, "n0 must be positive"},
        {{"system.gamma"}, [](const M& m) { return m.base.system.gamma > 0.0; }, "gamma must be positive"},
        {{"system.W"}, [](const M& m) { return m.base.system.W > 0.0; }, "W must be positive"},
        {{"system.f_max"}, [](const M& m) { return m.base.system.f_max > 0.0; }, "f_max must be positive"},
        {{"ctrl.d_avg"}, [](const M& m) { return m.base.ctrl.d_avg > 0.0; }, "d_avg must be positive"},
        {{"ctrl.d_max"}, [](const M& m) { return m.base.ctrl.d_max > 0.0; }, "d_max must be positive"},
        {{"ctrl.epsilon"}, [](const M& m) { return m.base.ctrl.epsilon > 0.0 && m.base.ctrl.epsilon < 1.0; },
         "epsilon must lie in (0, 1)"},
        {{"run.horizon"}, [](const M& m) { return m.base.horizon >= 1; }, "horizon must be at least 1"},
        {{"experiment.jobs"}, [](const M& m) { return m.jobs >= 1; }, "jobs must be at least 1"},
        {{"experiment.v_list"}, [](const M& m) {
             return !m.v_list.empty() && std::all_of(m.v_list.begin(), m.v_list.end(), [](double v) { return v > 0.0; });
         }, "V list must be non-empty and positive"},
        {{"ris.chi_set"}, [](const M& m) {
             return !m.base.chi_set.empty() &&
                    std::all_of(m.base.chi_set.begin(), m.base.chi_set.end(), [](double c) { return c > 0.0; });
         }, "quality factor set must be non-empty and positive"},
        {{"arrival.w_l", "arrival.a_bits", "arrival.w_r"}, [](const M& m) {
             const auto& a = m.base.arrivals;
             return a.w_l > 0.0 && a.a_bits > 0.0 && a.w_r > 0.0;
         }, "arrival means must be positive"},
        {{"edge.sigma_lo", "edge.sigma_hi"}, [](const M& m) {
             const auto& e = m.base.edge;
             return e.sigma_lo >= 0.0 && e.sigma_lo <= e.sigma_hi && e.sigma_hi <= 1.0 && e.sigma_hi > 0.0;
         }, "edge share bounds must satisfy 0 <= lo <= hi <= 1"},
    };
    return inv;
}

}  // namespace

ExperimentManifest parse_manifest_text(std::string_view text, std::string_view source, const ParseOptions& options) {
    struct Entry {
        const KeySpec* key;
        std::string value;
        int line;
    };
    std::vector<Entry> entries;
    std::map<std::string, int> seen;
    const std::string src(source);
    auto error = [&](int line, const std::string& what) {
        return ManifestError(src + ":" + std::to_string(line) + ": " + what);
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    std::optional<Preset> file_preset;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw error(line_no, "expected 'key = value'");
        const std::string name = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::any_of(options.ignore_prefixes.begin(), options.ignore_prefixes.end(),
                        [&](const std::string& p) { return name.rfind(p, 0) == 0; }))
            continue;
        const KeySpec* key = find_key(name);
        if (!key) throw error(line_no, "unknown key '" + name + "'");
        if (auto it = seen.find(name); it != seen.end())
            throw error(line_no, "duplicate key '" + name + "' (first set at line " + std::to_string(it->second) + ")");
        seen[name] = line_no;
        if (name == "experiment.preset") {
            try {
                file_preset = parse_preset(value);
            } catch (const std::exception& e) {
                throw error(line_no, e.what());
            }
        }
        entries.push_back({key, value, line_no});
    }

    const Preset preset = options.preset.value_or(file_preset.value_or(Preset::custom));
    M m = preset_manifest(preset);
    const M preset_values = m;
    const auto forced = forced_keys(preset);

    for (const auto& e : entries) {
        if (e.key->name == "experiment.preset") continue;
        try {
            set_value(m, *e.key, e.value);
        } catch (const std::exception& ex) {
            throw error(e.line, e.key->name + ": " + ex.what());
        }
        for (const auto& f : forced)
            if (f.key == e.key->name && !same_value(m, preset_values, *e.key))
                throw error(e.line, e.key->name + " is fixed to " + f.value + " by preset " +
                                        std::string(to_string(preset)));
    }

    for (const auto& inv : invariants()) {
        if (inv.holds(m)) continue;
        int line = 0;
        for (const auto& k : inv.keys)
            if (auto it = seen.find(k); it != seen.end()) line = std::max(line, it->second);
        if (line > 0) throw error(line, inv.message);
        throw ManifestError(src + ": " + inv.message);
    }
    try {
        m.validate();
    } catch (const std::exception& e) {
        throw ManifestError(src + ": " + e.what());
    }
    return m;
}

ExperimentManifest parse_manifest(const std::string& path, const ParseOptions& options) {
    std::ifstream in(path);
    if (!in) throw ManifestError(path + ": cannot open manifest");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest_text(buf.str(), path, options);
}

std::string echo_manifest(const ExperimentManifest& m) {
    std::ostringstream os;
    for (const auto& key : registry()) os << key.name << " = " << get_value(m, key, false) << "\n";
    return os.str();
}

std::string defaults_listing() {
    const M m = preset_manifest(Preset::custom);
    std::ostringstream os;
    os << "# key = default    # provenance\n";
    for (const auto& key : registry()) {
        std::string line = key.name + " = " + get_value(m, key, true);
        if (line.size() < 44) line.resize(44, ' ');
        os << line << "  # " << key.provenance << "\n";
    }
    return os.str();
}

}  // namespace rismec
