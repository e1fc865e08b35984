#include "relaysim/relaying.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relaysim {
namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::pair<std::string_view, Enum> (&table)[N],
                std::string_view what) {
    for (const auto& [name, value] : table) {
        if (name == text) return value;
    }
    throw std::invalid_argument("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

constexpr std::pair<std::string_view, Protocol> kProtocols[] = {
    {"dt", Protocol::Direct}, {"sr", Protocol::Simple}, {"sdfr", Protocol::Selective}};
constexpr std::pair<std::string_view, ReceiverKind> kReceivers[] = {
    {"map", ReceiverKind::Map},
    {"memoryless", ReceiverKind::Memoryless},
    {"awgn_mrc", ReceiverKind::AwgnMrc},
    {"genie_mrc", ReceiverKind::GenieMrc}};
constexpr std::pair<std::string_view, RelayKnowledge> kKnowledge[] = {
    {"none", RelayKnowledge::None},
    {"exact", RelayKnowledge::Exact},
    {"estimated", RelayKnowledge::Estimated},
    {"measured", RelayKnowledge::Measured}};
constexpr std::pair<std::string_view, Selection> kSelections[] = {
    {"genie", Selection::Genie}, {"threshold", Selection::Threshold}};
constexpr std::pair<std::string_view, VarianceRef> kVariances[] = {
    {"average", VarianceRef::Average}, {"good", VarianceRef::Good}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::pair<std::string_view, Enum> (&table)[N]) {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

double reference_variance(VarianceRef ref, const NoiseParams& noise) {
    return ref == VarianceRef::Good ? noise.sigma_good_sq : noise.average_power();
}

std::vector<std::uint8_t> invert(std::span<const std::uint8_t> mask) {
    std::vector<std::uint8_t> out(mask.size());
    for (std::size_t k = 0; k < mask.size(); ++k) out[k] = mask[k] ? 0 : 1;
    return out;
}

} // namespace

std::string_view to_string(Protocol p) { return name_of(p, kProtocols); }
std::string_view to_string(ReceiverKind r) { return name_of(r, kReceivers); }
std::string_view to_string(RelayKnowledge k) { return name_of(k, kKnowledge); }
std::string_view to_string(Selection s) { return name_of(s, kSelections); }
std::string_view to_string(VarianceRef v) { return name_of(v, kVariances); }
Protocol parse_protocol(std::string_view t) { return parse_enum(t, kProtocols, "protocol"); }
ReceiverKind parse_receiver(std::string_view t) { return parse_enum(t, kReceivers, "receiver"); }
RelayKnowledge parse_knowledge(std::string_view t) {
    return parse_enum(t, kKnowledge, "relay knowledge");
}
Selection parse_selection(std::string_view t) { return parse_enum(t, kSelections, "selection"); }
VarianceRef parse_variance_ref(std::string_view t) {
    return parse_enum(t, kVariances, "variance reference");
}

SchemeConfig SchemeConfig::direct(double total_power) {
    SchemeConfig c;
    c.protocol = Protocol::Direct;
    c.power_source = total_power;
    c.power_relay = 0.0;
    return c;
}

SchemeConfig SchemeConfig::cooperative(Protocol protocol, double total_power) {
    SchemeConfig c;
    c.protocol = protocol;
    c.power_source = total_power / 2.0;
    c.power_relay = total_power / 2.0;
    return c;
}

std::string SchemeConfig::label() const {
    if (!id.empty()) return id;
    std::string out(to_string(protocol));
    if (protocol == Protocol::Selective) out += "_" + std::string(to_string(selection));
    return out;
}

void SchemeConfig::validate() const {
    if (order != 2 && order != 4) {
        throw std::invalid_argument("scheme: modulation order must be 2 or 4");
    }
    geometry.sd.validate();
    geometry.sm.validate();
    geometry.md.validate();
    if (!(power_source > 0.0) || !std::isfinite(power_source)) {
        throw std::invalid_argument("scheme: source power must be positive");
    }
    if (protocol == Protocol::Direct) {
        if (power_relay != 0.0) throw std::invalid_argument("scheme: DT has no relay power");
    } else if (!(power_relay > 0.0) || !std::isfinite(power_relay)) {
        throw std::invalid_argument("scheme: relay power must be positive");
    }
    if (!(knowledge_error > -1.0) || !std::isfinite(knowledge_error)) {
        throw std::invalid_argument("scheme: knowledge error must exceed -1");
    }
    if (!(threshold >= 0.0)) throw std::invalid_argument("scheme: threshold must be >= 0");
}

analytic::CoopProfiles link_profiles(const SchemeConfig& config, const LinkNoise& noise) {
    using analytic::LinkSnrProfile;
    return {LinkSnrProfile::make(config.power_source, config.geometry.sd, noise.sd),
            LinkSnrProfile::make(config.power_source, config.geometry.sm, noise.sm),
            LinkSnrProfile::make(config.is_cooperative() ? config.power_relay : config.power_source,
                                 config.geometry.md, noise.md)};
}

double good_state_threshold(const SchemeConfig& config, const NoiseParams& sm_noise) {
    return config.threshold * reference_variance(config.threshold_variance, sm_noise) /
           sm_noise.sigma_good_sq;
}

double analytic_relay_error(const SchemeConfig& config, const LinkNoise& noise) {
    if (!config.is_cooperative() || config.knowledge == RelayKnowledge::None) return 0.0;
    if (config.protocol == Protocol::Selective && config.selection == Selection::Genie) return 0.0;
    if (config.knowledge == RelayKnowledge::Measured) {
        throw std::logic_error("relay error: measured knowledge needs a calibration pass");
    }
    const auto sm = link_profiles(config, noise).sm;
    double q = 0.0;
    if (config.protocol == Protocol::Simple) {
        q = analytic::relay_ser(sm, config.order);
    } else {
        const double t = good_state_threshold(config, noise.sm);
        q = config.order == 2 ? analytic::relay_ber_given_threshold(sm, t)
                              : analytic::relay_ser_given_threshold(sm, t, config.order);
    }
    if (config.knowledge == RelayKnowledge::Estimated) q *= 1.0 + config.knowledge_error;
    const double ceiling = 1.0 - 1.0 / config.order;
    return std::clamp(q, 0.0, std::nextafter(ceiling, 0.0));
}

RelayDecision relay_process(const Observation& sm, const NoiseParams& sm_noise,
                            const SchemeConfig& config, std::span<const std::uint8_t> source_bits,
                            double theta) {
    if (!config.is_cooperative()) {
        throw std::invalid_argument("relay_process: scheme has no relay");
    }
    const auto mod = config.modulation();
    const auto posteriors = map_detect(sm, sm_noise, mod);
    RelayDecision out;
    out.decoded_bits = hard_decision(demap_bits(posteriors, mod));
    const std::size_t symbols = sm.y.size();
    out.forward_mask.assign(symbols, 1);
    out.theta_reported = theta;

    if (config.protocol == Protocol::Selective) {
        if (config.selection == Selection::Genie) {
            if (source_bits.size() != out.decoded_bits.size()) {
                throw std::invalid_argument("relay_process: genie needs the source bits");
            }
            const int nb = mod.bits_per_symbol();
            for (std::size_t k = 0; k < symbols; ++k) {
                out.forward_mask[k] =
                    std::equal(source_bits.begin() + k * nb, source_bits.begin() + (k + 1) * nb,
                               out.decoded_bits.begin() + k * nb);
            }
            out.theta_reported = 0.0;
        } else {
            const double snr = sm.power * std::norm(sm.h) /
                               reference_variance(config.threshold_variance, sm_noise);
            if (!(snr > config.threshold)) std::fill(out.forward_mask.begin(), out.forward_mask.end(), 0);
        }
    }
    out.forwarded = std::any_of(out.forward_mask.begin(), out.forward_mask.end(),
                                [](std::uint8_t v) { return v != 0; });
    return out;
}

SymbolPosteriors combine_map(const SymbolPosteriors& sd, const SymbolPosteriors& md, double q,
                             const Modulation& mod) {
    const int order = mod.order();
    if (!(q >= 0.0) || !(q < 1.0 - 1.0 / order)) {
        throw std::invalid_argument("combine_map: relay error probability out of range");
    }
    if (sd.size() != md.size() || sd.order() != order || md.order() != order) {
        throw std::invalid_argument("combine_map: posterior frames do not align");
    }
    const double log_keep = std::log1p(-q);
    const double log_flip = safe_log(q / (order - 1));
    SymbolPosteriors out(sd.size(), order);
    std::vector<double> others(order - 1);
    for (std::size_t k = 0; k < sd.size(); ++k) {
        const auto a = sd.log_row(k);
        const auto b = md.log_row(k);
        auto row = out.log_row(k);
        for (int m = 0; m < order; ++m) {
            std::size_t j = 0;
            for (int n = 0; n < order; ++n) {
                if (n != m) others[j++] = b[n];
            }
            const double log_not_m = log_sum_exp(others);  // ln(1 - p_md(m))
            row[m] = a[m] + log_add(log_keep + b[m], log_flip + log_not_m);
        }
        out.normalize_row(k);
    }
    return out;
}

MrcStatistic combine_mrc(const MrcBranch& sd, const MrcBranch& md, MrcWeighting weighting) {
    const std::size_t n = sd.y.size();
    if (md.y.size() != n) throw std::invalid_argument("combine_mrc: branches not aligned");
    for (const MrcBranch* b : {&sd, &md}) {
        if (b->noise_var.size() != 1 && b->noise_var.size() != n) {
            throw std::invalid_argument("combine_mrc: noise variance length mismatch");
        }
        if (!b->active.empty() && b->active.size() != n) {
            throw std::invalid_argument("combine_mrc: mask length mismatch");
        }
    }
    MrcStatistic out;
    out.statistic.assign(n, {});
    out.gain.assign(n, 0.0);
    out.noise_var.assign(n, 0.0);
    for (const MrcBranch* b : {&sd, &md}) {
        const cdouble w0 = std::sqrt(b->power) * std::conj(b->h);
        const double energy = b->power * std::norm(b->h);
        for (std::size_t k = 0; k < n; ++k) {
            if (!b->active.empty() && b->active[k] == 0) continue;
            const double var = b->noise_var.size() == 1 ? b->noise_var[0] : b->noise_var[k];
            const double scale = weighting == MrcWeighting::InverseVariance ? 1.0 / var : 1.0;
            out.statistic[k] += scale * w0 * b->y[k];
            out.gain[k] += scale * energy;
            out.noise_var[k] += scale * scale * energy * var;
        }
    }
    return out;
}

SymbolPosteriors mrc_posteriors(const MrcStatistic& stat, const Modulation& mod) {
    const int order = mod.order();
    SymbolPosteriors out(stat.statistic.size(), order);
    for (std::size_t k = 0; k < stat.statistic.size(); ++k) {
        if (!(stat.noise_var[k] > 0.0)) continue;  // nothing received: stays uniform
        auto row = out.log_row(k);
        for (int m = 0; m < order; ++m) {
            row[m] = -std::norm(stat.statistic[k] - stat.gain[k] * mod.point(m)) / stat.noise_var[k];
        }
        out.normalize_row(k);
    }
    return out;
}

FrameStreams FrameStreams::derive(std::uint64_t seed, std::uint64_t frame) {
    return {RandomStream::derive(seed, {frame, 0}), RandomStream::derive(seed, {frame, 1}),
            RandomStream::derive(seed, {frame, 2}), RandomStream::derive(seed, {frame, 3})};
}

std::vector<std::uint8_t> draw_bits(RandomStream& rng, std::size_t count) {
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = rng.bit();
    return bits;
}

FrameSimulator::FrameSimulator(const LinkNoise& noise, std::size_t symbols, FrameStreams streams)
    : noise_(noise), symbols_(symbols) {
    const LinkGeometry unit{1.0, 0.0};
    sd_ = realize_link(unit, noise_.sd, symbols_, 1.0, streams.sd);
    sm_ = realize_link(unit, noise_.sm, symbols_, 1.0, streams.sm);
    md_ = realize_link(unit, noise_.md, symbols_, 1.0, streams.md);
}

FrameSimulator::Branch FrameSimulator::receive(const LinkRealization& unit,
                                               const LinkGeometry& geom, double power,
                                               std::span<const cdouble> symbols) const {
    LinkRealization scaled;
    scaled.h = unit.h * std::sqrt(geom.omega());
    scaled.power = power;
    Branch b{{}, scaled.h, power};
    const cdouble gain = std::sqrt(power) * scaled.h;
    b.y.resize(symbols.size());
    for (std::size_t k = 0; k < symbols.size(); ++k) b.y[k] = gain * symbols[k] + unit.noise[k];
    return b;
}

SymbolPosteriors FrameSimulator::detect(const SchemeConfig& config, const Branch& branch,
                                        const LinkRealization& unit, const NoiseParams& noise,
                                        std::span<const std::uint8_t> silent) const {
    const auto mod = config.modulation();
    const Observation obs{branch.y, branch.h, branch.power};
    DetectOptions opts;
    opts.silent = silent;
    switch (config.receiver) {
    case ReceiverKind::Map: return map_detect(obs, noise, mod, opts);
    case ReceiverKind::Memoryless: return memoryless_detect(obs, noise, mod, opts);
    case ReceiverKind::AwgnMrc:
        return awgn_detect(obs, reference_variance(config.awgn_variance, noise), mod, opts);
    case ReceiverKind::GenieMrc: return genie_detect(obs, unit.states, noise, mod, opts);
    }
    throw std::logic_error("unreachable receiver kind");
}

const RelayDecision& FrameSimulator::relay(const SchemeConfig& config,
                                           std::span<const std::uint8_t> bits, double relay_error) {
    std::ostringstream key;
    key << std::hexfloat << config.order << '/' << config.power_source << '/'
        << config.geometry.sm.omega() << '/' << static_cast<int>(config.protocol) << '/'
        << static_cast<int>(config.selection) << '/' << config.threshold << '/'
        << static_cast<int>(config.threshold_variance);
    auto it = relay_cache_.find(key.str());
    if (it == relay_cache_.end()) {
        const auto symbols = config.modulation().modulate(bits);
        const auto b = receive(sm_, config.geometry.sm, config.power_source, symbols);
        const Observation obs{b.y, b.h, b.power};
        it = relay_cache_.emplace(key.str(), relay_process(obs, noise_.sm, config, bits)).first;
    }
    // theta is side information, not part of the relay's processing
    it->second.theta_reported =
        config.protocol == Protocol::Selective && config.selection == Selection::Genie
            ? 0.0
            : relay_error;
    return it->second;
}

FrameOutcome FrameSimulator::run(const SchemeConfig& config, std::span<const std::uint8_t> bits,
                                 double relay_error) {
    config.validate();
    const auto mod = config.modulation();
    if (bits.size() != symbols_ * static_cast<std::size_t>(mod.bits_per_symbol())) {
        throw std::invalid_argument("frame: bit count does not match frame length");
    }
    const auto symbols = mod.modulate(bits);
    const auto sd = receive(sd_, config.geometry.sd, config.power_source, symbols);

    const bool mrc = config.receiver == ReceiverKind::AwgnMrc ||
                     config.receiver == ReceiverKind::GenieMrc;
    auto sd_posteriors = [&]() -> const SymbolPosteriors& {
        std::ostringstream key;
        key << std::hexfloat << config.order << '/' << config.power_source << '/'
            << config.geometry.sd.omega() << '/' << static_cast<int>(config.receiver) << '/'
            << static_cast<int>(config.awgn_variance);
        auto it = sd_cache_.find(key.str());
        if (it == sd_cache_.end()) {
            it = sd_cache_.emplace(key.str(), detect(config, sd, sd_, noise_.sd, {})).first;
        }
        return it->second;
    };

    FrameOutcome out;
    if (!config.is_cooperative()) {
        out.llrs = demap_bits(sd_posteriors(), mod);
        return out;
    }

    const RelayDecision& decision = relay(config, bits, relay_error);
    out.relay = decision;
    if (!decision.forwarded) {
        out.llrs = demap_bits(sd_posteriors(), mod);
        return out;
    }

    auto relay_symbols = mod.modulate(decision.decoded_bits);
    for (std::size_t k = 0; k < relay_symbols.size(); ++k) {
        if (!decision.forward_mask[k]) relay_symbols[k] = {};
    }
    const auto md = receive(md_, config.geometry.md, config.power_relay, relay_symbols);

    if (mrc) {
        const bool genie = config.receiver == ReceiverKind::GenieMrc;
        std::vector<double> var_sd, var_md;
        if (genie) {
            for (auto s : sd_.states) var_sd.push_back(noise_.sd.variance(s));
            for (auto s : md_.states) var_md.push_back(noise_.md.variance(s));
        } else {
            var_sd.push_back(reference_variance(config.awgn_variance, noise_.sd));
            var_md.push_back(reference_variance(config.awgn_variance, noise_.md));
        }
        const MrcBranch b_sd{sd.y, sd.h, sd.power, var_sd, {}};
        const MrcBranch b_md{md.y, md.h, md.power, var_md, decision.forward_mask};
        const auto stat = combine_mrc(
            b_sd, b_md, genie ? MrcWeighting::InverseVariance : MrcWeighting::Unweighted);
        out.llrs = demap_bits(mrc_posteriors(stat, mod), mod);
        return out;
    }

    const auto silent = invert(decision.forward_mask);
    const auto post_md = detect(config, md, md_, noise_.md, silent);
    const double q = config.knowledge == RelayKnowledge::None ? 0.0 : decision.theta_reported;
    out.llrs = demap_bits(combine_map(sd_posteriors(), post_md, q, mod), mod);
    return out;
}

LlrFrame run_dt_frame(const SchemeConfig& config, const LinkNoise& noise,
                      std::span<const std::uint8_t> bits, FrameStreams streams) {
    if (config.is_cooperative()) throw std::invalid_argument("run_dt_frame: cooperative scheme");
    const std::size_t symbols = bits.size() / config.modulation().bits_per_symbol();
    FrameSimulator sim(noise, symbols, std::move(streams));
    return sim.run(config, bits).llrs;
}

FrameOutcome run_cooperative_frame(const SchemeConfig& config, const LinkNoise& noise,
                                   std::span<const std::uint8_t> bits, FrameStreams streams,
                                   double relay_error) {
    if (!config.is_cooperative()) {
        throw std::invalid_argument("run_cooperative_frame: direct scheme");
    }
    const std::size_t symbols = bits.size() / config.modulation().bits_per_symbol();
    FrameSimulator sim(noise, symbols, std::move(streams));
    return sim.run(config, bits, relay_error);
}

} // namespace relaysim
