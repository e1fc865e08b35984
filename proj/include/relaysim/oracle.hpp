#pragma once

#include "relaysim/detector.hpp"

#include <cstddef>
#include <cstdint>

namespace relaysim::oracle {

/// Largest frame the exhaustive marginalization accepts (2^K sequences).
inline constexpr std::size_t kMaxEnumerationLength = 16;

/// Symbol posteriors by summing p(y^K, s^K, x_k) over every noise-state
/// sequence explicitly. Exponential in the frame length; reference only.
SymbolPosteriors enumerate_posteriors(const Observation& obs, const NoiseParams& params,
                                      const Modulation& mod, const DetectOptions& options = {});

/// ln p(y^K) by the same enumeration.
double enumerate_log_evidence(const Observation& obs, const NoiseParams& params,
                              const Modulation& mod);

struct EquivalenceReport {
    std::size_t trials = 0;
    std::size_t failures = 0;
    double max_abs_error = 0.0;
    double tolerance = 0.0;

    bool passed() const { return failures == 0; }
};

/// Random frames (length 1..max_len, random noise parameters, BPSK) checked
/// entrywise against map_detect.
EquivalenceReport run_equivalence_suite(std::size_t trials, std::uint64_t seed,
                                        std::size_t max_len = 8, double tolerance = 1e-9,
                                        int order = 2);

} // namespace relaysim::oracle
