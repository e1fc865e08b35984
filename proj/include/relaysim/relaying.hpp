#pragma once

#include "relaysim/analytic.hpp"
#include "relaysim/channel.hpp"
#include "relaysim/detector.hpp"
#include "relaysim/modem.hpp"
#include "relaysim/noise.hpp"
#include "relaysim/random.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace relaysim {

enum class Protocol { Direct, Simple, Selective };
enum class ReceiverKind { Map, Memoryless, AwgnMrc, GenieMrc };
/// What the destination knows about the relay's error probability.
enum class RelayKnowledge { None, Exact, Estimated, Measured };
/// How a selective relay decides to forward: per-symbol oracle, or SNR test.
enum class Selection { Genie, Threshold };
/// Variance assumed by the AWGN receiver, and the one used to measure the
/// relay SNR for the threshold test.
enum class VarianceRef { Average, Good };

std::string_view to_string(Protocol p);
std::string_view to_string(ReceiverKind r);
std::string_view to_string(RelayKnowledge k);
std::string_view to_string(Selection s);
std::string_view to_string(VarianceRef v);
Protocol parse_protocol(std::string_view text);
ReceiverKind parse_receiver(std::string_view text);
RelayKnowledge parse_knowledge(std::string_view text);
Selection parse_selection(std::string_view text);
VarianceRef parse_variance_ref(std::string_view text);

struct Geometry {
    LinkGeometry sd{1.0, 2.0};
    LinkGeometry sm{0.4, 2.0};
    LinkGeometry md{0.6, 2.0};
};

struct LinkNoise {
    NoiseParams sd;
    NoiseParams sm;
    NoiseParams md;

    static LinkNoise uniform(const NoiseParams& p) { return {p, p, p}; }
};

struct SchemeConfig {
    std::string id;
    Protocol protocol = Protocol::Direct;
    ReceiverKind receiver = ReceiverKind::Map;
    int order = 2;
    Geometry geometry;
    double power_source = 1.0;
    double power_relay = 0.0;
    RelayKnowledge knowledge = RelayKnowledge::None;
    /// Relative error applied to the relay error probability in Estimated mode.
    double knowledge_error = 0.0;
    Selection selection = Selection::Genie;
    /// Linear SNR threshold (Selective + Threshold only).
    double threshold = 0.0;
    VarianceRef threshold_variance = VarianceRef::Good;
    VarianceRef awgn_variance = VarianceRef::Average;

    /// All power at the source.
    static SchemeConfig direct(double total_power = 1.0);
    /// P_s = P_m = P_T / 2.
    static SchemeConfig cooperative(Protocol protocol, double total_power = 1.0);

    double total_power() const { return power_source + power_relay; }
    Modulation modulation() const { return Modulation::of_order(order); }
    bool is_cooperative() const { return protocol != Protocol::Direct; }
    std::string label() const;
    void validate() const;
};

/// Average analytic SNR profiles of the three links under `config`.
analytic::CoopProfiles link_profiles(const SchemeConfig& config, const LinkNoise& noise);

/// Relay error probability the destination plugs into the MAP combiner:
/// the relay BER for BPSK, the relay SER for QPSK. Exact/Estimated modes are
/// analytic; None and genie selection return 0. Measured mode must be
/// resolved by the caller and throws here.
double analytic_relay_error(const SchemeConfig& config, const LinkNoise& noise);

/// The selective-relaying threshold expressed as a good-state relay SNR.
double good_state_threshold(const SchemeConfig& config, const NoiseParams& sm_noise);

struct RelayDecision {
    bool forwarded = false;
    /// Per symbol: 1 if the relay transmits it in the second slot.
    std::vector<std::uint8_t> forward_mask;
    std::vector<std::uint8_t> decoded_bits;
    /// Side information sent with the frame.
    double theta_reported = 0.0;
};

/// MAP-detect, hard-decide and apply the forwarding rule. `source_bits` is
/// consulted only by the genie selection rule.
RelayDecision relay_process(const Observation& sm, const NoiseParams& sm_noise,
                            const SchemeConfig& config, std::span<const std::uint8_t> source_bits,
                            double theta = 0.0);

/// MAP cooperative combining. The relay error probability q is spread
/// evenly over the M - 1 wrong symbols:
///   p(x | y_sd, y_md) ~ p_sd(x) [(1 - q) p_md(x) + q / (M - 1) (1 - p_md(x))].
/// For BPSK this is L_sd + L_md + ln[(1 + r e^{-L_md}) / (1 + r e^{L_md})],
/// r = q / (1 - q).
SymbolPosteriors combine_map(const SymbolPosteriors& sd, const SymbolPosteriors& md, double q,
                             const Modulation& mod);

enum class MrcWeighting { Unweighted, InverseVariance };

struct MrcBranch {
    std::span<const cdouble> y;
    cdouble h{};
    double power = 0.0;
    /// Per-symbol noise variance, or a single value for all symbols.
    std::span<const double> noise_var;
    /// Optional per-symbol mask; masked-off symbols contribute nothing.
    std::span<const std::uint8_t> active = {};
};

/// y_d = sum_i w_i y_i with w_i = sqrt(P_i) h_i^* (optionally / sigma_i^2),
/// together with the resulting signal gain and noise variance of y_d.
struct MrcStatistic {
    std::vector<cdouble> statistic;
    std::vector<double> gain;
    std::vector<double> noise_var;
};

MrcStatistic combine_mrc(const MrcBranch& sd, const MrcBranch& md, MrcWeighting weighting);

/// Gaussian posteriors of the combined statistic.
SymbolPosteriors mrc_posteriors(const MrcStatistic& stat, const Modulation& mod);

/// Random streams of one frame. Each link owns its stream.
struct FrameStreams {
    RandomStream bits;
    RandomStream sd;
    RandomStream sm;
    RandomStream md;

    static FrameStreams derive(std::uint64_t seed, std::uint64_t frame);
};

std::vector<std::uint8_t> draw_bits(RandomStream& rng, std::size_t count);

struct FrameOutcome {
    LlrFrame llrs;
    std::optional<RelayDecision> relay;
};

/// One frame's channel realizations, shared by every scheme evaluated on it.
/// Fading is drawn with unit variance and scaled per scheme geometry; noise
/// uses the link parameters given at construction. Detector outputs and relay
/// decisions are memoized across schemes.
class FrameSimulator {
public:
    FrameSimulator(const LinkNoise& noise, std::size_t symbols, FrameStreams streams);

    FrameOutcome run(const SchemeConfig& config, std::span<const std::uint8_t> bits,
                     double relay_error = 0.0);

    const LinkRealization& link_sd() const { return sd_; }
    const LinkRealization& link_sm() const { return sm_; }
    const LinkRealization& link_md() const { return md_; }

private:
    struct Branch {
        std::vector<cdouble> y;
        cdouble h;
        double power;
    };

    Branch receive(const LinkRealization& unit, const LinkGeometry& geom, double power,
                   std::span<const cdouble> symbols) const;
    const RelayDecision& relay(const SchemeConfig& config, std::span<const std::uint8_t> bits,
                               double relay_error);
    SymbolPosteriors detect(const SchemeConfig& config, const Branch& branch,
                            const LinkRealization& unit, const NoiseParams& noise,
                            std::span<const std::uint8_t> silent) const;

    LinkNoise noise_;
    std::size_t symbols_;
    LinkRealization sd_;
    LinkRealization sm_;
    LinkRealization md_;
    std::map<std::string, RelayDecision> relay_cache_;
    std::map<std::string, SymbolPosteriors> sd_cache_;
};

LlrFrame run_dt_frame(const SchemeConfig& config, const LinkNoise& noise,
                      std::span<const std::uint8_t> bits, FrameStreams streams);

FrameOutcome run_cooperative_frame(const SchemeConfig& config, const LinkNoise& noise,
                                   std::span<const std::uint8_t> bits, FrameStreams streams,
                                   double relay_error = 0.0);

} // namespace relaysim
