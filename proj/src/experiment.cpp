#include "relaysim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace relaysim {
namespace {

// Frames are processed in batches of this size and the stop rule is checked
// only between batches, which keeps results independent of the worker count.
constexpr std::uint64_t kBatchFrames = 16;
constexpr std::uint64_t kCalibrationSalt = 0x9e3779b97f4a7c15ULL;

struct FrameCounts {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;
    double seconds = 0.0;
};

FrameCounts count_errors(std::span<const std::uint8_t> sent, const LlrFrame& llrs,
                         int bits_per_symbol) {
    const auto decided = hard_decision(llrs);
    FrameCounts c;
    c.bits = sent.size();
    c.symbols = sent.size() / bits_per_symbol;
    for (std::size_t k = 0; k < c.symbols; ++k) {
        bool wrong = false;
        for (int b = 0; b < bits_per_symbol; ++b) {
            const std::size_t i = k * bits_per_symbol + b;
            if (decided[i] != sent[i]) {
                ++c.errors;
                wrong = true;
            }
        }
        c.symbol_errors += wrong;
    }
    return c;
}

bool point_done(const ErrorTally& t, const StopRule& rule) {
    return (rule.min_errors > 0 && t.errors >= rule.min_errors) ||
           (rule.max_bits > 0 && t.bits >= rule.max_bits);
}

std::string format_snr(double snr_db) {
    std::ostringstream s;
    s << snr_db;
    return s.str();
}

} // namespace

void ExperimentSpec::validate() const {
    if (schemes.empty()) throw ConfigError("experiment: no schemes");
    if (snr_db.empty()) throw ConfigError("experiment: empty SNR grid");
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        if (!std::isfinite(snr_db[i])) throw ConfigError("experiment: SNR values must be finite");
        if (i > 0 && !(snr_db[i] > snr_db[i - 1])) {
            throw ConfigError("experiment: SNR grid must be strictly increasing");
        }
    }
    if (frame_symbols == 0) throw ConfigError("experiment: frame length must be positive");
    if (workers == 0) throw ConfigError("experiment: need at least one worker");
    if (!max_frames && stop.max_bits == 0) {
        throw ConfigError(
            "experiment: stop rule may never be satisfied (no frame cap and no bit cap)");
    }
    std::map<std::string, int> seen;
    for (const auto& s : schemes) {
        try {
            s.validate();
            noise.sd.validate();
            noise.sm.validate();
            noise.md.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(s.label() + ": " + e.what());
        }
        if (seen[s.label()]++ > 0) throw ConfigError("experiment: duplicate scheme " + s.label());
        if (s.knowledge == RelayKnowledge::Measured && calibration_frames == 0) {
            throw ConfigError(s.label() + ": measured relay knowledge needs calibration frames");
        }
    }
}

void ErrorTally::add_frame(std::uint64_t frame_bits, std::uint64_t frame_errors,
                           std::uint64_t frame_symbols, std::uint64_t frame_symbol_errors) {
    ++frames;
    bits += frame_bits;
    errors += frame_errors;
    sum_sq_errors += static_cast<double>(frame_errors) * static_cast<double>(frame_errors);
    symbols += frame_symbols;
    symbol_errors += frame_symbol_errors;
    sum_sq_symbol_errors +=
        static_cast<double>(frame_symbol_errors) * static_cast<double>(frame_symbol_errors);
}

void ErrorTally::merge(const ErrorTally& o) {
    frames += o.frames;
    bits += o.bits;
    errors += o.errors;
    sum_sq_errors += o.sum_sq_errors;
    symbols += o.symbols;
    symbol_errors += o.symbol_errors;
    sum_sq_symbol_errors += o.sum_sq_symbol_errors;
    seconds += o.seconds;
}

double clustered_stderr(std::uint64_t frames, std::uint64_t units, std::uint64_t errors,
                        double sum_sq_errors) {
    if (units == 0) return 0.0;
    const double n = static_cast<double>(units);
    const double p = static_cast<double>(errors) / n;
    if (frames < 2) return std::sqrt(p * (1.0 - p) / n);
    const double f = static_cast<double>(frames);
    const double e = static_cast<double>(errors);
    const double var = std::max(0.0, (sum_sq_errors - e * e / f) / (f - 1.0));
    // sum of frame errors has variance f * var; divide by total units
    return std::sqrt(f * var) / n;
}

BerRecord BerRecord::from_tally(double snr_db, const SchemeConfig& scheme, const ErrorTally& t,
                                double relay_error) {
    BerRecord r;
    r.snr_db = snr_db;
    r.scheme = scheme.label();
    r.receiver = std::string(to_string(scheme.receiver));
    r.bits = t.bits;
    r.errors = t.errors;
    r.ber = t.bits ? static_cast<double>(t.errors) / t.bits : 0.0;
    r.stderr_ber = clustered_stderr(t.frames, t.bits, t.errors, t.sum_sq_errors);
    r.seconds = t.seconds;
    r.frames = t.frames;
    r.symbols = t.symbols;
    r.symbol_errors = t.symbol_errors;
    r.ser = t.symbols ? static_cast<double>(t.symbol_errors) / t.symbols : 0.0;
    r.stderr_ser = clustered_stderr(t.frames, t.symbols, t.symbol_errors, t.sum_sq_symbol_errors);
    r.relay_error = relay_error;
    return r;
}

LinkNoise noise_at(const LinkNoise& base, double snr_db) {
    const double sigma = 1.0 / db_to_linear(snr_db);
    LinkNoise out = base;
    out.sd.sigma_good_sq = sigma;
    out.sm.sigma_good_sq = sigma;
    out.md.sigma_good_sq = sigma;
    return out;
}

double measure_relay_error(const SchemeConfig& config, const LinkNoise& noise,
                           std::size_t frame_symbols, std::uint64_t frames, std::uint64_t seed) {
    if (!config.is_cooperative()) return 0.0;
    const auto mod = config.modulation();
    const int nb = mod.bits_per_symbol();
    std::uint64_t forwarded = 0;
    std::uint64_t wrong = 0;
    for (std::uint64_t f = 0; f < frames; ++f) {
        auto streams = FrameStreams::derive(seed ^ kCalibrationSalt, f);
        const auto bits = draw_bits(streams.bits, frame_symbols * nb);
        const auto symbols = mod.modulate(bits);
        const auto link =
            realize_link(config.geometry.sm, noise.sm, frame_symbols, config.power_source, streams.sm);
        const auto y = transmit(symbols, link);
        const Observation obs{y, link.h, link.power};
        const auto decision = relay_process(obs, noise.sm, config, bits);
        for (std::size_t k = 0; k < frame_symbols; ++k) {
            if (!decision.forward_mask[k]) continue;
            ++forwarded;
            wrong += !std::equal(bits.begin() + k * nb, bits.begin() + (k + 1) * nb,
                                 decision.decoded_bits.begin() + k * nb);
        }
    }
    if (forwarded == 0) return 0.0;
    const double q = static_cast<double>(wrong) / forwarded;
    return std::min(q, std::nextafter(1.0 - 1.0 / config.order, 0.0));
}

std::vector<BerRecord> run_experiment(const ExperimentSpec& spec, const RecordSink& sink) {
    spec.validate();
    std::vector<BerRecord> records;
    const std::uint64_t frame_cap =
        spec.max_frames.value_or(std::numeric_limits<std::uint64_t>::max());
    if (frame_cap == 0) return records;

    const std::size_t n_schemes = spec.schemes.size();
    for (const double snr : spec.snr_db) {
        const LinkNoise noise = noise_at(spec.noise, snr);

        std::vector<double> theta(n_schemes, 0.0);
        for (std::size_t s = 0; s < n_schemes; ++s) {
            const auto& scheme = spec.schemes[s];
            try {
                theta[s] = scheme.knowledge == RelayKnowledge::Measured
                               ? measure_relay_error(scheme, noise, spec.frame_symbols,
                                                     spec.calibration_frames, spec.seed)
                               : analytic_relay_error(scheme, noise);
            } catch (const std::exception& e) {
                throw RuntimeFailure("relay calibration failed (scheme " + scheme.label() +
                                     ", snr " + format_snr(snr) + " dB, seed " +
                                     std::to_string(spec.seed) + "): " + e.what());
            }
        }

        std::vector<ErrorTally> tallies(n_schemes);
        std::vector<std::uint8_t> active(n_schemes, 1);
        std::uint64_t next_frame = 0;
        while (next_frame < frame_cap &&
               std::any_of(active.begin(), active.end(), [](auto a) { return a != 0; })) {
            const std::uint64_t batch = std::min<std::uint64_t>(kBatchFrames, frame_cap - next_frame);
            // results[i * n_schemes + s] for frame next_frame + i
            std::vector<FrameCounts> results(batch * n_schemes);
            std::atomic<std::uint64_t> cursor{0};
            std::mutex failure_mutex;
            std::string failure;
            std::uint64_t failed_frame = std::numeric_limits<std::uint64_t>::max();

            auto work = [&] {
                for (;;) {
                    const std::uint64_t i = cursor.fetch_add(1);
                    if (i >= batch) return;
                    const std::uint64_t frame = next_frame + i;
                    std::string where;
                    try {
                        auto streams = FrameStreams::derive(spec.seed, frame);
                        const RandomStream bit_stream = streams.bits;
                        FrameSimulator sim(noise, spec.frame_symbols, std::move(streams));
                        std::map<int, std::vector<std::uint8_t>> bits_by_order;
                        for (std::size_t s = 0; s < n_schemes; ++s) {
                            if (!active[s]) continue;
                            const auto& scheme = spec.schemes[s];
                            where = scheme.label();
                            const int nb = scheme.modulation().bits_per_symbol();
                            auto& bits = bits_by_order[scheme.order];
                            if (bits.empty()) {
                                RandomStream rng = bit_stream;
                                bits = draw_bits(rng, spec.frame_symbols * nb);
                            }
                            const auto start = std::chrono::steady_clock::now();
                            const auto outcome = sim.run(scheme, bits, theta[s]);
                            auto counts = count_errors(bits, outcome.llrs, nb);
                            if (spec.record_timing) {
                                counts.seconds = std::chrono::duration<double>(
                                                     std::chrono::steady_clock::now() - start)
                                                     .count();
                            }
                            results[i * n_schemes + s] = counts;
                        }
                    } catch (const std::exception& e) {
                        std::lock_guard lock(failure_mutex);
                        if (frame < failed_frame) {
                            failed_frame = frame;
                            failure = "frame " + std::to_string(frame) + " failed (seed " +
                                      std::to_string(spec.seed) + ", snr " + format_snr(snr) +
                                      " dB, scheme " + where + "): " + e.what();
                        }
                    }
                }
            };

            const unsigned n_workers =
                static_cast<unsigned>(std::min<std::uint64_t>(spec.workers, batch));
            if (n_workers <= 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
                for (auto& t : pool) t.join();
            }
            if (!failure.empty()) throw RuntimeFailure(failure);

            for (std::uint64_t i = 0; i < batch; ++i) {
                for (std::size_t s = 0; s < n_schemes; ++s) {
                    if (!active[s]) continue;
                    const auto& c = results[i * n_schemes + s];
                    tallies[s].add_frame(c.bits, c.errors, c.symbols, c.symbol_errors);
                    tallies[s].seconds += c.seconds;
                }
            }
            next_frame += batch;
            for (std::size_t s = 0; s < n_schemes; ++s) {
                if (active[s] && point_done(tallies[s], spec.stop)) active[s] = 0;
            }
        }

        for (std::size_t s = 0; s < n_schemes; ++s) {
            records.push_back(BerRecord::from_tally(snr, spec.schemes[s], tallies[s], theta[s]));
            if (sink) sink(records.back());
        }
    }
    return records;
}

} // namespace relaysim
