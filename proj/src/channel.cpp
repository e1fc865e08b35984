#include "relaysim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace relaysim {

void LinkGeometry::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(eta)) {
        throw std::invalid_argument("link: relative distance must be positive and finite");
    }
}

double LinkGeometry::omega() const { return 1.0 / std::pow(lambda, eta); }

cdouble sample_fading(const LinkGeometry& geom, RandomStream& rng) {
    geom.validate();
    const double sd = std::sqrt(geom.omega() / 2.0);
    const double re = rng.normal();
    const double im = rng.normal();
    return {sd * re, sd * im};
}

LinkRealization realize_link(const LinkGeometry& geom, const NoiseParams& params,
                             std::size_t symbols, double power, RandomStream& rng) {
    LinkRealization link;
    link.h = sample_fading(geom, rng);
    link.states = sample_state_seq(params, symbols, rng);
    link.noise = sample_noise(link.states, params, rng);
    link.power = power;
    return link;
}

std::vector<cdouble> transmit(std::span<const cdouble> symbols, const LinkRealization& link) {
    if (symbols.size() != link.noise.size()) {
        throw std::invalid_argument("transmit: symbol count does not match noise length");
    }
    const cdouble gain = std::sqrt(link.power) * link.h;
    std::vector<cdouble> y(symbols.size());
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        y[k] = gain * symbols[k] + link.noise[k];
    }
    return y;
}

} // namespace relaysim
