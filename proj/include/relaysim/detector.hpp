#pragma once

#include "relaysim/modem.hpp"
#include "relaysim/noise.hpp"
#include "relaysim/posteriors.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace relaysim {

/// What the receiver sees of one link over one frame. The fading coefficient
/// is known in full (amplitude and phase).
struct Observation {
    std::span<const cdouble> y;
    cdouble h{1.0, 0.0};
    double power = 1.0;
};

struct DetectOptions {
    /// Per-step symbol priors; null means uniform.
    const SymbolPosteriors* priors = nullptr;
    /// Nonzero entries mark steps where nothing was transmitted (x = 0). They
    /// still inform the state estimate; their posterior rows stay uniform.
    std::span<const std::uint8_t> silent = {};
};

/// Forward/backward filters over the two-state noise trellis, log domain.
/// Rows are renormalized by their maximum at each step; the removed mass is
/// kept in the log_scale_* accumulators so that the evidence p(y^K) remains
/// recoverable.
struct TrellisWorkspace {
    using Pair = std::array<double, 2>;  // indexed by NoiseState

    std::vector<Pair> alpha;  ///< K+1 rows; alpha[0] = ln stationary law
    std::vector<Pair> beta;   ///< K+1 rows; beta[K] = 0
    /// ln p(y_k | x_k = m, s_k), row-major K x M x 2.
    std::vector<double> emission;
    double log_scale_forward = 0.0;
    double log_scale_backward = 0.0;
    Pair log_initial{};

    /// ln p(y^K) from sum_s alpha_K(s).
    double log_evidence_forward() const;
    /// ln p(y^K) from sum_s pi(s) beta_0(s).
    double log_evidence_backward() const;
};

/// MAP symbol detector (BCJR over the noise-state trellis).
SymbolPosteriors map_detect(const Observation& obs, const NoiseParams& params,
                            const Modulation& mod, const DetectOptions& options = {},
                            TrellisWorkspace* workspace = nullptr);

/// Per-symbol posterior under the two-component mixture
/// p_G CN(0, sigma_G^2) + p_B CN(0, sigma_B^2); ignores noise memory.
SymbolPosteriors memoryless_detect(const Observation& obs, const NoiseParams& params,
                                   const Modulation& mod, const DetectOptions& options = {});

/// Single Gaussian with variance `sigma_sq`.
SymbolPosteriors awgn_detect(const Observation& obs, double sigma_sq, const Modulation& mod,
                             const DetectOptions& options = {});

/// Gaussian detector told the true noise state of every sample.
SymbolPosteriors genie_detect(const Observation& obs, std::span<const NoiseState> states,
                              const NoiseParams& params, const Modulation& mod,
                              const DetectOptions& options = {});

} // namespace relaysim
