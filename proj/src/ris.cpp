#include "rismec/ris.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rismec {

namespace {

struct GreedyResult {
    std::vector<int> choice;  // candidate index per element, -1 = off
};

/**
 * Single greedy pass over the columns of `cascade`. For each element the
 * objective sum_b |t_b + c_b r_kb|^2 is expanded as
 *   sum|t|^2 + sum |r_kb|^2 |c_b|^2 + 2 Re sum r_kb conj(t_b) c_b
 * so every candidate costs two dot products.
 */
GreedyResult greedy_pass(const CVec& h_los, const CMat& cascade, const CMat& responses, bool allow_off,
                         double noise_power, std::vector<double>* trace) {
    const Eigen::Index n = cascade.cols();
    const Eigen::MatrixXd responses_abs2 = responses.cwiseAbs2();
    CVec total = h_los;
    GreedyResult out;
    out.choice.assign(static_cast<std::size_t>(n), -1);
    if (trace) {
        trace->clear();
        trace->push_back(total.squaredNorm() / noise_power);
    }
    for (Eigen::Index e = 0; e < n; ++e) {
        const auto c = cascade.col(e);
        const CVec cross = total.conjugate().cwiseProduct(c);
        const Vec c_abs2 = c.cwiseAbs2();
        const Vec gains = (responses_abs2 * c_abs2) + 2.0 * (responses * cross).real();

        int best = -1;
        double best_gain = allow_off ? 0.0 : -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < gains.size(); ++k) {
            if (gains(k) > best_gain) {
                best_gain = gains(k);
                best = static_cast<int>(k);
            }
        }
        out.choice[static_cast<std::size_t>(e)] = best;
        if (best >= 0) total += c.cwiseProduct(responses.row(best).transpose());
        if (trace) trace->push_back(total.squaredNorm() / noise_power);
    }
    return out;
}

}  // namespace

double feasible_strength(double f_res, double chi, const Vec& freqs) {
    if (freqs.size() == 0) throw std::invalid_argument("feasible_strength: empty frequency grid");
    double peak = 0.0;
    for (Eigen::Index b = 0; b < freqs.size(); ++b)
        peak = std::max(peak, std::abs(lorentzian_response(1.0, f_res, chi, freqs(b))));
    if (!(peak > 0.0)) return 1.0;
    return std::min(1.0, 1.0 / peak);
}

CMat response_matrix(const RisConfig& ris, const Vec& freqs) {
    const auto n = static_cast<Eigen::Index>(ris.size());
    CMat phi(freqs.size(), n);
    switch (ris.mode) {
        case RisMode::lorentzian:
            for (Eigen::Index e = 0; e < n; ++e)
                for (Eigen::Index b = 0; b < freqs.size(); ++b)
                    phi(b, e) = lorentzian_response(ris.elements[static_cast<std::size_t>(e)], freqs(b));
            break;
        case RisMode::flat:
            for (Eigen::Index e = 0; e < n; ++e)
                phi.col(e).setConstant(std::polar(1.0, ris.phases[static_cast<std::size_t>(e)]));
            break;
        case RisMode::none:
            break;
    }
    return phi;
}

double max_amplitude(const RisConfig& ris, const Vec& freqs) {
    if (ris.size() == 0) return 0.0;
    return response_matrix(ris, freqs).cwiseAbs().maxCoeff();
}

RisSearchSpace subcarrier_search_space(const Vec& freqs, std::vector<double> chi_set) {
    RisSearchSpace space;
    space.omega.assign(freqs.data(), freqs.data() + freqs.size());
    space.chi_set = std::move(chi_set);
    space.validate();
    return space;
}

CandidateTable CandidateTable::build(const RisSearchSpace& space, const Vec& freqs) {
    space.validate();
    CandidateTable table;
    for (double f_res : space.omega)
        for (double chi : space.chi_set)
            table.candidates.push_back({feasible_strength(f_res, chi, freqs), f_res, chi});
    table.responses.resize(static_cast<Eigen::Index>(table.candidates.size()), freqs.size());
    for (std::size_t k = 0; k < table.candidates.size(); ++k)
        for (Eigen::Index b = 0; b < freqs.size(); ++b)
            table.responses(static_cast<Eigen::Index>(k), b) = lorentzian_response(table.candidates[k], freqs(b));
    return table;
}

RisConfig greedy_optimize(const ChannelRealization& ch, const CandidateTable& table, const SystemConfig& cfg,
                          std::vector<double>* trace) {
    if (table.responses.cols() != ch.bins())
        throw std::invalid_argument("greedy_optimize: candidate table built for a different bin grid");
    const auto pass = greedy_pass(ch.h_los, ch.cascade(), table.responses, true, cfg.noise_power(), trace);

    RisConfig ris;
    ris.mode = RisMode::lorentzian;
    ris.elements.reserve(pass.choice.size());
    const RisElementConfig& first = table.candidates.front();
    for (int k : pass.choice) {
        if (k < 0)
            ris.elements.push_back({0.0, first.f_res, first.chi});
        else
            ris.elements.push_back(table.candidates[static_cast<std::size_t>(k)]);
    }
    return ris;
}

RisConfig greedy_optimize(const ChannelRealization& ch, const RisSearchSpace& space, const SystemConfig& cfg,
                          std::vector<double>* trace) {
    return greedy_optimize(ch, CandidateTable::build(space, ch.freqs), cfg, trace);
}

RisConfig flat_optimize(const ChannelRealization& ch, int phase_grid_size, const SystemConfig& cfg,
                        std::vector<double>* trace) {
    if (phase_grid_size < 2) throw std::invalid_argument("flat_optimize: phase grid needs at least 2 points");
    std::vector<double> grid(static_cast<std::size_t>(phase_grid_size));
    CMat responses(phase_grid_size, ch.bins());
    for (int k = 0; k < phase_grid_size; ++k) {
        grid[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * double(k) / double(phase_grid_size);
        responses.row(k).setConstant(std::polar(1.0, grid[static_cast<std::size_t>(k)]));
    }
    const auto pass = greedy_pass(ch.h_los, ch.cascade(), responses, false, cfg.noise_power(), trace);

    RisConfig ris;
    ris.mode = RisMode::flat;
    for (int k : pass.choice) ris.phases.push_back(grid[static_cast<std::size_t>(k)]);
    return ris;
}

RisConfig realize_on_lorentzian(const RisConfig& flat, const CandidateTable& table, double f_carrier) {
    if (flat.mode != RisMode::flat) throw std::invalid_argument("realize_on_lorentzian: expects a flat-mode design");
    if (table.candidates.empty()) throw std::invalid_argument("realize_on_lorentzian: empty candidate table");
    std::vector<Complex> at_carrier;
    at_carrier.reserve(table.candidates.size());
    for (const auto& c : table.candidates) at_carrier.push_back(lorentzian_response(c, f_carrier));

    RisConfig ris;
    ris.mode = RisMode::lorentzian;
    ris.elements.reserve(flat.phases.size());
    for (double theta : flat.phases) {
        const Complex target = std::polar(1.0, theta);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < at_carrier.size(); ++k) {
            const double d = std::abs(at_carrier[k] - target);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        ris.elements.push_back(table.candidates[best]);
    }
    return ris;
}

RisConfig random_config(Rng& rng, const RisSearchSpace& space, const Vec& freqs, int n_elements) {
    space.validate();
    std::uniform_int_distribution<std::size_t> pick_f(0, space.omega.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_chi(0, space.chi_set.size() - 1);
    RisConfig ris;
    ris.mode = RisMode::lorentzian;
    ris.elements.reserve(static_cast<std::size_t>(std::max(n_elements, 0)));
    for (int e = 0; e < n_elements; ++e) {
        const double f_res = space.omega[pick_f(rng)];
        const double chi = space.chi_set[pick_chi(rng)];
        std::uniform_real_distribution<double> pick_s(0.0, feasible_strength(f_res, chi, freqs));
        ris.elements.push_back({pick_s(rng), f_res, chi});
    }
    return ris;
}

}  // namespace rismec
