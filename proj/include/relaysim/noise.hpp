#pragma once

#include "relaysim/logmath.hpp"
#include "relaysim/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace relaysim {

enum class NoiseState : std::uint8_t { Good = 0, Bad = 1 };

/// Two-state Markov-Gaussian noise of one link.
///
/// The state process is a stationary first-order Markov chain over
/// {Good, Bad}. Conditioned on the state, the sample is circularly symmetric
/// complex Gaussian with variance sigma_good_sq (Good) or
/// ratio * sigma_good_sq (Bad).
struct NoiseParams {
    double p_bad = 0.1;          ///< stationary probability of the Bad state
    double gamma = 100.0;        ///< memory, 1 / (p_GB + p_BG); 1 means i.i.d. states
    double ratio = 100.0;        ///< sigma_B^2 / sigma_G^2
    double sigma_good_sq = 1.0;  ///< background Gaussian power

    /// Throws std::invalid_argument when out of range.
    void validate() const;

    double sigma_bad_sq() const { return ratio * sigma_good_sq; }
    double variance(NoiseState s) const {
        return s == NoiseState::Good ? sigma_good_sq : sigma_bad_sq();
    }
    double stationary(NoiseState s) const { return s == NoiseState::Good ? 1.0 - p_bad : p_bad; }
    /// p_G sigma_G^2 + p_B sigma_B^2.
    double average_power() const;
};

struct TransitionProbs {
    double good_to_bad = 0.0;
    double bad_to_good = 0.0;

    /// p(to | from).
    double prob(NoiseState from, NoiseState to) const;
};

/// p_GB = p_B / gamma, p_BG = (1 - p_B) / gamma: the unique solution of
/// p_B = p_GB / (p_GB + p_BG) and gamma = 1 / (p_GB + p_BG).
TransitionProbs transition_probs(const NoiseParams& params);

using NoiseStateSeq = std::vector<NoiseState>;
using NoiseSampleSeq = std::vector<cdouble>;

/// First state from the stationary law, then Markov transitions.
NoiseStateSeq sample_state_seq(const NoiseParams& params, std::size_t count, RandomStream& rng);

NoiseSampleSeq sample_noise(std::span<const NoiseState> states, const NoiseParams& params,
                            RandomStream& rng);

/// ln of the CN(0, sigma_s^2) density at `sample`.
double log_pdf(cdouble sample, NoiseState state, const NoiseParams& params);

} // namespace relaysim
