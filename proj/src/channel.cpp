#include "rismec/channel.hpp"

#include "rismec/ris.hpp"

#include <numbers>
#include <stdexcept>

namespace rismec {

namespace {

// DFT of the L-tap vector zero-padded to B points: F(b, l) = exp(-j 2 pi l b / B).
CMat dft_matrix(int bins, int taps) {
    CMat f(bins, taps);
    for (int b = 0; b < bins; ++b)
        for (int l = 0; l < taps; ++l)
            f(b, l) = std::polar(1.0, -2.0 * std::numbers::pi * double(l) * double(b) / double(bins));
    return f;
}

CMat draw_taps(Rng& rng, int taps, int links) {
    // CN(0, 1/L): real and imaginary parts each with variance 1/(2L).
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5 / double(taps)));
    CMat c(taps, links);
    for (int j = 0; j < links; ++j)
        for (int l = 0; l < taps; ++l) {
            const double re = normal(rng);
            const double im = normal(rng);
            c(l, j) = Complex(re, im);
        }
    return c;
}

Vec amplitude_profile(const Vec& freqs, double d, double exponent) {
    Vec a(freqs.size());
    for (Eigen::Index b = 0; b < freqs.size(); ++b) a(b) = std::sqrt(pathloss(d, freqs(b), exponent));
    return a;
}

}  // namespace

Vec bin_frequencies(const SystemConfig& cfg) {
    if (cfg.B < 1 || !(cfg.W > 0.0)) throw std::invalid_argument("bin_frequencies: need B >= 1 and W > 0");
    Vec f(cfg.B);
    const double centre = 0.5 * double(cfg.B - 1);
    for (int b = 0; b < cfg.B; ++b) f(b) = cfg.f_c + (double(b) - centre) * cfg.W;
    return f;
}

double pathloss(double distance_m, double freq_hz, double exponent) {
    const double k = kSpeedOfLight / (4.0 * std::numbers::pi * freq_hz);
    return k * k * std::pow(distance_m, -exponent);
}

ChannelStreams ChannelStreams::from_seed(std::uint64_t seed) {
    return {make_stream(seed, 101), make_stream(seed, 102), make_stream(seed, 103)};
}

ChannelRealization draw_channel(ChannelStreams& streams, const SystemConfig& cfg) {
    const int bins = cfg.B;
    const int taps = cfg.l_taps;
    const int n = cfg.n_elements;
    const auto& geo = cfg.geometry;

    ChannelRealization ch;
    ch.freqs = bin_frequencies(cfg);
    const CMat dft = dft_matrix(bins, taps);

    const Vec a_direct = amplitude_profile(ch.freqs, distance(geo.device, geo.ap), cfg.pathloss.direct);
    const Vec a_ris_ap = amplitude_profile(ch.freqs, distance(geo.ris, geo.ap), cfg.pathloss.ris_ap);
    const Vec a_dev_ris = amplitude_profile(ch.freqs, distance(geo.device, geo.ris), cfg.pathloss.device_ris);

    ch.h_los = a_direct.cwiseProduct((dft * draw_taps(streams.direct, taps, 1)).col(0));
    ch.g = a_ris_ap.asDiagonal() * (dft * draw_taps(streams.ris_ap, taps, n));
    ch.h = a_dev_ris.asDiagonal() * (dft * draw_taps(streams.device_ris, taps, n));
    return ch;
}

Vec cascaded_cnr(const CVec& h_los, const CMat& cascade, const RisConfig& ris, const Vec& freqs,
                 double noise_power) {
    if (cascade.rows() != h_los.size() || freqs.size() != h_los.size())
        throw std::invalid_argument("cascaded_cnr: channel bin counts disagree");
    CVec total = h_los;
    if (ris.mode != RisMode::none && ris.size() > 0) {
        if (static_cast<Eigen::Index>(ris.size()) != cascade.cols())
            throw std::invalid_argument("cascaded_cnr: RIS element count does not match the channel");
        total += cascade.cwiseProduct(response_matrix(ris, freqs)).rowwise().sum();
    }
    return total.cwiseAbs2() / noise_power;
}

Vec cascaded_cnr(const ChannelRealization& ch, const RisConfig& ris, const SystemConfig& cfg) {
    if (ch.g.rows() != ch.bins() || ch.h.rows() != ch.bins() || ch.g.cols() != ch.h.cols())
        throw std::invalid_argument("cascaded_cnr: malformed channel realization");
    return cascaded_cnr(ch.h_los, ch.cascade(), ris, ch.freqs, cfg.noise_power());
}

}  // namespace rismec
