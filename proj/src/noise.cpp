#include "relaysim/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaysim {

void NoiseParams::validate() const {
    if (!(p_bad >= 0.0 && p_bad <= 1.0)) {
        throw std::invalid_argument("noise: p_bad must lie in [0, 1], got " + std::to_string(p_bad));
    }
    if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("noise: gamma must be >= 1, got " + std::to_string(gamma));
    }
    if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
        throw std::invalid_argument("noise: ratio R must be >= 1, got " + std::to_string(ratio));
    }
    if (!(sigma_good_sq > 0.0) || !std::isfinite(sigma_good_sq)) {
        throw std::invalid_argument("noise: sigma_good_sq must be > 0");
    }
}

double NoiseParams::average_power() const {
    return (1.0 - p_bad) * sigma_good_sq + p_bad * sigma_bad_sq();
}

double TransitionProbs::prob(NoiseState from, NoiseState to) const {
    if (from == NoiseState::Good) {
        return to == NoiseState::Bad ? good_to_bad : 1.0 - good_to_bad;
    }
    return to == NoiseState::Good ? bad_to_good : 1.0 - bad_to_good;
}

TransitionProbs transition_probs(const NoiseParams& params) {
    params.validate();
    TransitionProbs t{params.p_bad / params.gamma, (1.0 - params.p_bad) / params.gamma};
    if (t.good_to_bad > 1.0 || t.bad_to_good > 1.0) {
        throw std::invalid_argument("noise: transition probability exceeds 1");
    }
    return t;
}

NoiseStateSeq sample_state_seq(const NoiseParams& params, std::size_t count, RandomStream& rng) {
    const auto t = transition_probs(params);
    NoiseStateSeq states(count);
    if (count == 0) return states;

    auto s = rng.uniform() < params.p_bad ? NoiseState::Bad : NoiseState::Good;
    states[0] = s;
    for (std::size_t k = 1; k < count; ++k) {
        const double u = rng.uniform();
        if (s == NoiseState::Good) {
            if (u < t.good_to_bad) s = NoiseState::Bad;
        } else {
            if (u < t.bad_to_good) s = NoiseState::Good;
        }
        states[k] = s;
    }
    return states;
}

NoiseSampleSeq sample_noise(std::span<const NoiseState> states, const NoiseParams& params,
                            RandomStream& rng) {
    params.validate();
    const double sd_good = std::sqrt(params.sigma_good_sq / 2.0);
    const double sd_bad = std::sqrt(params.sigma_bad_sq() / 2.0);
    NoiseSampleSeq out(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        const double sd = states[k] == NoiseState::Good ? sd_good : sd_bad;
        const double re = rng.normal();
        const double im = rng.normal();
        out[k] = {sd * re, sd * im};
    }
    return out;
}

double log_pdf(cdouble sample, NoiseState state, const NoiseParams& params) {
    const double var = params.variance(state);
    return -std::log(std::numbers::pi * var) - std::norm(sample) / var;
}

} // namespace relaysim
