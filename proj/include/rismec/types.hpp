#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rismec {

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Random engine used by every stochastic component. One engine per stream.
using Rng = std::mt19937_64;

/// Builds an engine for sub-stream `stream` of a run seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

inline constexpr double kSpeedOfLight = 299792458.0;

/// dBm/Hz to W/Hz.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Geometry {
    Point2 device{10.0, 30.0};
    Point2 ris{-5.0, 2.5};
    Point2 ap{0.0, 0.0};

    bool operator==(const Geometry&) const = default;
};

struct PathlossExponents {
    double device_ris = 2.0;
    double ris_ap = 2.0;
    double direct = 4.0;

    bool operator==(const PathlossExponents&) const = default;
};

/**
 * Physical and algorithmic constants of one device / RIS / access point
 * deployment. All fields are SI; defaults are the reference scenario.
 */
struct SystemConfig {
    double gamma = 1e-27;        ///< effective switched capacitance
    double p_min = 1e-4;         ///< W
    double p_max = 0.1;          ///< W
    double f_c = 3.5e9;          ///< Hz
    double W = 1e6;              ///< subcarrier spacing, Hz
    int B = 16;                  ///< subcarriers
    double n0 = dbm_to_watt(-174.0);  ///< W/Hz
    double f_max = 10e9;         ///< edge host CPU, cycles/s
    double f_l_min = 0.01e9;     ///< cycles/s
    double f_l_max = 1e9;        ///< cycles/s
    Geometry geometry;
    int n_elements = 100;
    int l_taps = 4;
    PathlossExponents pathloss;

    double noise_power() const { return n0 * W; }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

struct TaskArrival {
    double w_l = 0.0;     ///< local cycles
    double a_bits = 0.0;  ///< uplink payload, bits
    double w_r = 0.0;     ///< remote cycles

    void validate() const;
};

struct EdgeState {
    double sigma = 1.0;  ///< share of the edge CPU, in (0, 1]

    void validate() const;
};

// ---------------------------------------------------------------------------
// RIS configuration types

/// Lorentzian element: strength S, resonance frequency and quality factor.
/// The damping f_res / (2 chi) is always derived.
struct RisElementConfig {
    double s = 0.0;
    double f_res = 0.0;
    double chi = 1.0;

    bool operator==(const RisElementConfig&) const = default;
};

enum class RisMode { lorentzian, flat, none };

/**
 * Per-element response description of the surface.
 *
 * lorentzian: `elements` holds N Lorentzian triples.
 * flat:       `phases` holds N phases; every element reflects e^{j theta}
 *             at every subcarrier.
 * none:       no reflection at all (direct link only).
 */
struct RisConfig {
    RisMode mode = RisMode::none;
    std::vector<RisElementConfig> elements;
    std::vector<double> phases;

    std::size_t size() const {
        switch (mode) {
            case RisMode::lorentzian: return elements.size();
            case RisMode::flat: return phases.size();
            case RisMode::none: return 0;
        }
        return 0;
    }

    bool operator==(const RisConfig&) const = default;
};

struct RisSearchSpace {
    std::vector<double> omega;     ///< candidate resonance frequencies, Hz
    std::vector<double> chi_set;   ///< candidate quality factors

    void validate() const;
};

// ---------------------------------------------------------------------------
// Per-slot decision and realized metrics

struct SlotDecision {
    double f_l = 0.0;  ///< cycles/s
    Vec p_bins;        ///< W, one entry per subcarrier
    RisConfig ris;
    bool degenerate = false;  ///< no usable subcarrier; p_min spread uniformly

    double p_u() const { return p_bins.sum(); }

    /// Checks bin powers, the total-power box and the CPU frequency bounds.
    void validate(const SystemConfig& cfg) const;
};

struct SlotMetrics {
    double d_l = 0.0, d_u = 0.0, d_r = 0.0, d_tot = 0.0;  ///< s
    double p_l = 0.0, p_u = 0.0, p_tot = 0.0;             ///< W
    double rate = 0.0;                                    ///< bits/s
    bool outage = false;
    double d_u_raw = 0.0;  ///< uncapped uplink delay (inf when rate is zero)
    bool rate_capped = false;
};

}  // namespace rismec
