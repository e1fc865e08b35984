#pragma once

#include "relaysim/relaying.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaysim {

/// A point stops when either enabled limit is reached; 0 disables a limit.
struct StopRule {
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 200'000'000;
};

struct ExperimentSpec {
    std::vector<SchemeConfig> schemes;
    std::vector<double> snr_db;
    std::size_t frame_symbols = 64'800;
    /// Unset means no frame cap; 0 runs nothing.
    std::optional<std::uint64_t> max_frames;
    StopRule stop;
    std::uint64_t seed = 1;
    /// Per-link noise; sigma_good_sq is overwritten from each SNR point.
    LinkNoise noise = LinkNoise::uniform(NoiseParams{});
    std::string output;
    unsigned workers = 1;
    bool record_timing = true;
    /// Relay-only frames used to measure the relay error rate (Measured mode).
    std::uint64_t calibration_frames = 200;

    /// Throws ConfigError.
    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Error counts of one (point, scheme). Frames are the sampling unit: fading
/// is constant over a frame, so bits within a frame are not independent.
struct ErrorTally {
    std::uint64_t frames = 0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double sum_sq_errors = 0.0;
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;
    double sum_sq_symbol_errors = 0.0;
    double seconds = 0.0;

    void add_frame(std::uint64_t frame_bits, std::uint64_t frame_errors,
                   std::uint64_t frame_symbols, std::uint64_t frame_symbol_errors);
    void merge(const ErrorTally& other);
};

/// Standard error of errors/units from per-frame counts (between-frame
/// variance of the frame error count); binomial when fewer than two frames.
double clustered_stderr(std::uint64_t frames, std::uint64_t units, std::uint64_t errors,
                        double sum_sq_errors);

struct BerRecord {
    double snr_db = 0.0;
    std::string scheme;
    std::string receiver;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    double stderr_ber = 0.0;
    double seconds = 0.0;

    std::uint64_t frames = 0;
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;
    double ser = 0.0;
    double stderr_ser = 0.0;
    /// Relay error probability handed to the destination combiner.
    double relay_error = 0.0;

    static BerRecord from_tally(double snr_db, const SchemeConfig& scheme, const ErrorTally& t,
                                double relay_error);
};

/// Noise of every link at one SNR point (SNR = E|x|^2 / sigma_G^2, E|x|^2 = 1).
LinkNoise noise_at(const LinkNoise& base, double snr_db);

/// Relay-only Monte Carlo estimate of the relay error probability.
double measure_relay_error(const SchemeConfig& config, const LinkNoise& noise,
                           std::size_t frame_symbols, std::uint64_t frames, std::uint64_t seed);

using RecordSink = std::function<void(const BerRecord&)>;

/// Runs every scheme at every SNR point. Frame f of every point and scheme
/// uses the streams derived from (seed, f), so results are a pure function of
/// the spec and independent of the worker count.
std::vector<BerRecord> run_experiment(const ExperimentSpec& spec, const RecordSink& sink = {});

} // namespace relaysim
