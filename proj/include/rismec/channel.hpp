#pragma once

#include "rismec/types.hpp"

namespace rismec {

/**
 * Frequency responses of the three links for one slot (block fading).
 *
 * Row b of `g` and `h` holds the RIS->AP and device->RIS responses of
 * every element on subcarrier b.
 */
struct ChannelRealization {
    CVec h_los;  ///< device -> AP, length B
    CMat g;      ///< RIS -> AP, B x N
    CMat h;      ///< device -> RIS, B x N
    Vec freqs;   ///< subcarrier centre frequencies, Hz

    Eigen::Index bins() const { return freqs.size(); }
    Eigen::Index elements() const { return g.cols(); }

    /// Element-wise product g .* h: the per-element reflected gain before the
    /// RIS response is applied.
    CMat cascade() const { return g.cwiseProduct(h); }
};

/// Subcarrier grid f_b = f_c + (b - (B-1)/2) W, symmetric about f_c.
Vec bin_frequencies(const SystemConfig& cfg);

/// Free-space kernel (c / (4 pi f))^2 d^-exponent.
double pathloss(double distance_m, double freq_hz, double exponent);

/// One engine per link, so the direct channel does not depend on N.
struct ChannelStreams {
    Rng direct;
    Rng ris_ap;
    Rng device_ris;

    static ChannelStreams from_seed(std::uint64_t seed);
};

/**
 * Draws a Rayleigh block-fading realization. Every scalar link has L taps
 * CN(0, 1/L); the response on bin b is the B-point DFT of the zero-padded
 * tap vector at index b, scaled by sqrt(pathloss(d, f_b)).
 */
ChannelRealization draw_channel(ChannelStreams& streams, const SystemConfig& cfg);

/// Per-subcarrier channel-to-noise ratio of the direct plus reflected link.
Vec cascaded_cnr(const ChannelRealization& ch, const RisConfig& ris, const SystemConfig& cfg);

/// Same as cascaded_cnr, with the cascade g .* h precomputed.
Vec cascaded_cnr(const CVec& h_los, const CMat& cascade, const RisConfig& ris, const Vec& freqs,
                 double noise_power);

}  // namespace rismec
