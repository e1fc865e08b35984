#pragma once

#include "relaysim/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace relaysim {

/// Reads an experiment from INI text. Sections:
///   [experiment]  snr_db, frame_symbols, max_frames, min_errors, max_bits,
///                 seed, workers, output, record_timing, calibration_frames
///   [noise]       p_bad, gamma, ratio            (all links)
///   [noise_sd] [noise_sm] [noise_md]             (per-link overrides)
///   [scheme:<id>] protocol, receiver, order, total_power, power_source,
///                 power_relay, knowledge, knowledge_error, selection,
///                 threshold_db, threshold_variance, awgn_variance,
///                 lambda_sd, lambda_sm, lambda_md, eta
/// Throws ConfigError with the offending key.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec load_config(const std::string& path);

/// "0,5,10" or "start:step:stop" (inclusive).
std::vector<double> parse_snr_grid(const std::string& text);

} // namespace relaysim
