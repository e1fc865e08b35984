#pragma once

#include "relaysim/noise.hpp"

#include <span>
#include <vector>

namespace relaysim {

/// Path-loss geometry of one link; E|h|^2 = 1 / lambda^eta.
struct LinkGeometry {
    double lambda = 1.0;
    double eta = 2.0;

    void validate() const;
    double omega() const;
};

/// Zero-mean circularly symmetric complex Gaussian with variance omega().
cdouble sample_fading(const LinkGeometry& geom, RandomStream& rng);

/// One frame of one link. The fading coefficient is constant over the frame.
struct LinkRealization {
    cdouble h{1.0, 0.0};
    NoiseStateSeq states;
    NoiseSampleSeq noise;
    double power = 1.0;
};

/// Draws h, then the state sequence, then the noise, all from `rng`.
LinkRealization realize_link(const LinkGeometry& geom, const NoiseParams& params,
                             std::size_t symbols, double power, RandomStream& rng);

/// y_k = sqrt(P) h x_k + n_k.
std::vector<cdouble> transmit(std::span<const cdouble> symbols, const LinkRealization& link);

} // namespace relaysim
