#pragma once

#include "rismec/channel.hpp"
#include "rismec/types.hpp"

#include <complex>
#include <vector>

namespace rismec {

/// Lorentzian reflection S f^2 / (f_res^2 - f^2 + j (f_res / (2 chi)) f).
template <typename Scalar>
std::complex<Scalar> lorentzian_response(Scalar s, Scalar f_res, Scalar chi, Scalar f) {
    const Scalar damping = f_res / (Scalar(2) * chi);
    const std::complex<Scalar> den(f_res * f_res - f * f, damping * f);
    return (s * f * f) / den;
}

inline Complex lorentzian_response(const RisElementConfig& elem, double f) {
    return lorentzian_response(elem.s, elem.f_res, elem.chi, f);
}

/// Largest strength in [0, 1] keeping |phi(f_b)| <= 1 on every bin of `freqs`.
double feasible_strength(double f_res, double chi, const Vec& freqs);

/// Response of every element on every bin, B x N. Empty for RisMode::none.
CMat response_matrix(const RisConfig& ris, const Vec& freqs);

/// Largest |phi_n(f_b)| over all elements and bins (0 for an empty surface).
double max_amplitude(const RisConfig& ris, const Vec& freqs);

/// Omega equal to the subcarrier grid, with the given quality factors.
RisSearchSpace subcarrier_search_space(const Vec& freqs, std::vector<double> chi_set);

/// Sum of CNRs over bins; the greedy objective.
inline double sum_gain(const Vec& cnr) { return cnr.sum(); }

/**
 * Greedy coordinate search over Lorentzian elements.
 *
 * Starts from an all-off surface and visits elements in index order. Each
 * element tries every (f_res, chi) in Omega x X (Omega outer) at its
 * feasible strength and keeps the best strictly improving candidate; the
 * incumbent (off) wins ties. `trace`, when given, receives the objective
 * before the first visit followed by its value after each visit.
 */
RisConfig greedy_optimize(const ChannelRealization& ch, const RisSearchSpace& space, const SystemConfig& cfg,
                          std::vector<double>* trace = nullptr);

/// Greedy phase selection for a frequency-flat surface on a uniform grid of
/// `phase_grid_size` phases in [0, 2 pi).
RisConfig flat_optimize(const ChannelRealization& ch, int phase_grid_size, const SystemConfig& cfg,
                        std::vector<double>* trace = nullptr);

/// Uniform draw of (f_res, chi) from the search space and S from
/// [0, feasible_strength].
RisConfig random_config(Rng& rng, const RisSearchSpace& space, const Vec& freqs, int n_elements);

/**
 * Precomputed per-candidate responses for one search space and bin grid.
 * Row k holds the response at feasible strength of candidate k, enumerated
 * Omega outer / X inner.
 */
struct CandidateTable {
    std::vector<RisElementConfig> candidates;
    CMat responses;  ///< K x B

    static CandidateTable build(const RisSearchSpace& space, const Vec& freqs);
};

/**
 * Deploys a flat-mode design on Lorentzian hardware: every element takes the
 * candidate whose response at `f_carrier` is nearest to its designed
 * e^{j theta}. The result is evaluated with the true frequency response, so
 * the design is unaware of the surface dispersion.
 */
RisConfig realize_on_lorentzian(const RisConfig& flat, const CandidateTable& table, double f_carrier);

/// greedy_optimize against a prebuilt candidate table.
RisConfig greedy_optimize(const ChannelRealization& ch, const CandidateTable& table, const SystemConfig& cfg,
                          std::vector<double>* trace = nullptr);

}  // namespace rismec
