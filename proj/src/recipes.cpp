#include "relaysim/recipes.hpp"

#include <cmath>
#include <set>

namespace relaysim {
namespace {

SchemeConfig scheme(std::string id, Protocol protocol, ReceiverKind receiver, int order) {
    SchemeConfig c =
        protocol == Protocol::Direct ? SchemeConfig::direct() : SchemeConfig::cooperative(protocol);
    c.id = std::move(id);
    c.receiver = receiver;
    c.order = order;
    return c;
}

std::vector<double> grid(double start, double step, double stop) {
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    return out;
}

// DT and genie-selection SDFR under the three practical receivers.
std::vector<SchemeConfig> receiver_comparison(int order) {
    const std::string suffix = order == 4 ? "_qpsk" : "";
    std::vector<SchemeConfig> out;
    for (auto r : {ReceiverKind::Map, ReceiverKind::Memoryless, ReceiverKind::AwgnMrc}) {
        out.push_back(scheme("dt_" + std::string(to_string(r)) + suffix, Protocol::Direct, r, order));
    }
    for (auto r : {ReceiverKind::Map, ReceiverKind::Memoryless, ReceiverKind::AwgnMrc}) {
        auto c = scheme("sdfr_" + std::string(to_string(r)) + suffix, Protocol::Selective, r, order);
        c.selection = Selection::Genie;
        out.push_back(c);
    }
    return out;
}

} // namespace

std::vector<std::string> figure_ids() { return {"fig3", "fig4", "fig5", "fig8"}; }

ExperimentSpec figure_recipe(std::string_view name, const RecipeOptions& options) {
    ExperimentSpec spec;
    NoiseParams noise{0.1, 100.0, 100.0, 1.0};
    int order = 2;

    if (name == "fig3") {
        spec.schemes = receiver_comparison(2);
        spec.snr_db = grid(0, 2, 30);
    } else if (name == "fig4") {
        spec.schemes.push_back(scheme("dt_map", Protocol::Direct, ReceiverKind::Map, 2));
        auto known = scheme("sr_map_theta", Protocol::Simple, ReceiverKind::Map, 2);
        known.knowledge = RelayKnowledge::Exact;
        spec.schemes.push_back(known);
        spec.schemes.push_back(scheme("sr_map", Protocol::Simple, ReceiverKind::Map, 2));
        auto memoryless = scheme("sr_memoryless_theta", Protocol::Simple, ReceiverKind::Memoryless, 2);
        memoryless.knowledge = RelayKnowledge::Exact;
        spec.schemes.push_back(memoryless);
        spec.schemes.push_back(scheme("sr_awgn_mrc", Protocol::Simple, ReceiverKind::AwgnMrc, 2));
        spec.snr_db = grid(0, 2, 30);
    } else if (name == "fig5") {
        noise = NoiseParams{0.1, 10.0, 10.0, 1.0};
        auto sr = scheme("sr_map_theta", Protocol::Simple, ReceiverKind::Map, 2);
        sr.knowledge = RelayKnowledge::Exact;
        spec.schemes.push_back(sr);
        for (int db : {0, 5, 10}) {
            auto c = scheme("sdfr_t" + std::to_string(db) + "db", Protocol::Selective,
                            ReceiverKind::Map, 2);
            c.selection = Selection::Threshold;
            c.threshold = std::pow(10.0, db / 10.0);
            spec.schemes.push_back(c);
        }
        spec.snr_db = grid(0, 2, 30);
    } else if (name == "fig8") {
        order = 4;
        spec.schemes = receiver_comparison(4);
        spec.snr_db = grid(0, 2, 30);
    } else if (name == "fig6" || name == "fig7" || name == "fig9" || name == "fig10") {
        throw ConfigError("figure " + std::string(name) +
                          " uses an LDPC-coded link and is out of scope (uncoded figures: "
                          "fig3, fig4, fig5, fig8)");
    } else {
        throw ConfigError("unknown figure '" + std::string(name) +
                          "' (available: fig3, fig4, fig5, fig8)");
    }

    spec.noise = LinkNoise::uniform(noise);
    const std::size_t bits_per_symbol = order == 4 ? 2 : 1;
    spec.frame_symbols = kFrameBits / bits_per_symbol;
    if (options.desk_scale) {
        spec.frame_symbols = static_cast<std::size_t>(
            std::lround(static_cast<double>(spec.frame_symbols) / kDeskFrameFactor));
        spec.stop.min_errors /= 2;
        spec.stop.max_bits /= kDeskBitFactor;
    }
    if (options.fixed_frames) {
        spec.max_frames = kReferenceFrames;
        spec.stop = StopRule{0, 0};
    }
    return spec;
}

std::vector<AnalyticPoint> analytic_curves(const ExperimentSpec& spec) {
    std::vector<AnalyticPoint> out;
    std::set<std::string> seen;
    for (const auto& s : spec.schemes) {
        const std::string m = s.order == 4 ? "_qpsk" : "_bpsk";
        std::string curve;
        if (s.protocol == Protocol::Direct) {
            curve = "dt_ber" + m;
        } else if (s.protocol == Protocol::Simple) {
            curve = "sr_ber" + m;
        } else if (s.selection == Selection::Genie) {
            curve = "sdfr_lower" + m;
        } else {
            curve = "sdfr_threshold_" + format_real(10.0 * std::log10(s.threshold)) + "db" + m;
        }
        if (!seen.insert(curve).second) continue;
        for (double snr : spec.snr_db) {
            const LinkNoise noise = noise_at(spec.noise, snr);
            const auto p = link_profiles(s, noise);
            double value = 0.0;
            if (s.protocol == Protocol::Direct) {
                value = analytic::dt_ber(p.sd, s.order);
            } else if (s.protocol == Protocol::Simple) {
                value = analytic::sr_ber(p, s.order);
            } else if (s.selection == Selection::Genie) {
                value = analytic::sdfr_ber_lower(p, s.order);
            } else {
                value = analytic::sdfr_ber_threshold(p, good_state_threshold(s, noise.sm), s.order);
            }
            out.push_back({snr, curve, value});
        }
        if (s.protocol == Protocol::Direct && s.order == 4 && seen.insert("dt_ser_qpsk").second) {
            for (double snr : spec.snr_db) {
                const auto p = link_profiles(s, noise_at(spec.noise, snr));
                out.push_back({snr, "dt_ser_qpsk", analytic::dt_ser_mpsk(p.sd, 4)});
            }
        }
    }
    return out;
}

} // namespace relaysim
