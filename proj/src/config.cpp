#include "relaysim/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace relaysim {
namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& text, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ConfigError("config: '" + key + "' is not a number: '" + text + "'");
    }
    return v;
}

std::uint64_t to_count(const std::string& text, const std::string& key) {
    const double v = to_double(text, key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
        throw ConfigError("config: '" + key + "' must be a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

bool to_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' must be true or false");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

class Section {
public:
    Section(const pt::ptree& tree, std::string name, std::set<std::string> allowed)
        : tree_(tree), name_(std::move(name)) {
        for (const auto& [key, value] : tree_) {
            if (!allowed.count(key)) throw ConfigError("config: unknown key [" + name_ + "] " + key);
            if (!value.empty()) throw ConfigError("config: nested value under [" + name_ + "]");
        }
    }

    const std::string* get(const std::string& key) const {
        auto it = tree_.find(key);
        if (it == tree_.not_found()) return nullptr;
        cache_ = trim(it->second.data());
        return &cache_;
    }
    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    void read(const std::string& key, double& out) const {
        if (auto v = get(key)) out = to_double(*v, qualified(key));
    }
    void read(const std::string& key, std::uint64_t& out) const {
        if (auto v = get(key)) out = to_count(*v, qualified(key));
    }
    void read(const std::string& key, bool& out) const {
        if (auto v = get(key)) out = to_bool(*v, qualified(key));
    }
    void read(const std::string& key, std::string& out) const {
        if (auto v = get(key)) out = *v;
    }

    template <typename Parser, typename Enum>
    void read_enum(const std::string& key, Parser parse, Enum& out) const {
        if (auto v = get(key)) {
            try {
                out = parse(*v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("config: " + qualified(key) + ": " + e.what());
            }
        }
    }

private:
    const pt::ptree& tree_;
    std::string name_;
    mutable std::string cache_;
};

void read_noise(const Section& s, NoiseParams& p) {
    s.read("p_bad", p.p_bad);
    s.read("gamma", p.gamma);
    s.read("ratio", p.ratio);
}

SchemeConfig read_scheme(const Section& s, const std::string& id) {
    Protocol protocol = Protocol::Direct;
    s.read_enum("protocol", parse_protocol, protocol);
    SchemeConfig c =
        protocol == Protocol::Direct ? SchemeConfig::direct() : SchemeConfig::cooperative(protocol);
    c.id = id;
    double total = 1.0;
    s.read("total_power", total);
    c.power_source = c.is_cooperative() ? total / 2.0 : total;
    c.power_relay = c.is_cooperative() ? total / 2.0 : 0.0;
    s.read("power_source", c.power_source);
    s.read("power_relay", c.power_relay);
    s.read_enum("receiver", parse_receiver, c.receiver);
    double order = c.order;
    s.read("order", order);
    c.order = static_cast<int>(order);
    if (c.order != order) throw ConfigError("config: " + s.qualified("order") + " must be 2 or 4");
    s.read_enum("knowledge", parse_knowledge, c.knowledge);
    s.read("knowledge_error", c.knowledge_error);
    s.read_enum("selection", parse_selection, c.selection);
    if (auto v = s.get("threshold_db")) {
        const double db = to_double(*v, s.qualified("threshold_db"));
        c.threshold = std::pow(10.0, db / 10.0);
    }
    s.read_enum("threshold_variance", parse_variance_ref, c.threshold_variance);
    s.read_enum("awgn_variance", parse_variance_ref, c.awgn_variance);
    s.read("lambda_sd", c.geometry.sd.lambda);
    s.read("lambda_sm", c.geometry.sm.lambda);
    s.read("lambda_md", c.geometry.md.lambda);
    double eta = c.geometry.sd.eta;
    s.read("eta", eta);
    c.geometry.sd.eta = c.geometry.sm.eta = c.geometry.md.eta = eta;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("config: [scheme:" + id + "] " + e.what());
    }
    return c;
}

} // namespace

std::vector<double> parse_snr_grid(const std::string& raw) {
    const std::string text = trim(raw);
    std::vector<double> grid;
    if (text.empty()) throw ConfigError("config: empty SNR grid");
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(to_double(trim(item), "snr_db"));
        if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0]) {
            throw ConfigError("config: SNR range must be start:step:stop with step > 0");
        }
        const auto n = static_cast<std::size_t>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) grid.push_back(parts[0] + i * parts[1]);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(to_double(trim(item), "snr_db"));
    return grid;
}

ExperimentSpec parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    ExperimentSpec spec;
    spec.frame_symbols = 1000;
    NoiseParams base;
    std::vector<std::pair<std::string, const pt::ptree*>> link_sections;

    for (const auto& [name, body] : tree) {
        if (name == "experiment") {
            const Section s(body, name,
                            {"snr_db", "frame_symbols", "max_frames", "min_errors", "max_bits",
                             "seed", "workers", "output", "record_timing", "calibration_frames"});
            if (auto v = s.get("snr_db")) spec.snr_db = parse_snr_grid(*v);
            std::uint64_t count = spec.frame_symbols;
            s.read("frame_symbols", count);
            spec.frame_symbols = count;
            if (auto v = s.get("max_frames")) spec.max_frames = to_count(*v, s.qualified("max_frames"));
            s.read("min_errors", spec.stop.min_errors);
            s.read("max_bits", spec.stop.max_bits);
            s.read("seed", spec.seed);
            std::uint64_t workers = spec.workers;
            s.read("workers", workers);
            spec.workers = static_cast<unsigned>(workers);
            s.read("output", spec.output);
            s.read("record_timing", spec.record_timing);
            s.read("calibration_frames", spec.calibration_frames);
        } else if (name == "noise") {
            read_noise(Section(body, name, {"p_bad", "gamma", "ratio"}), base);
        } else if (name == "noise_sd" || name == "noise_sm" || name == "noise_md") {
            link_sections.emplace_back(name, &body);
        } else if (name.rfind("scheme:", 0) == 0) {
            const std::string id = name.substr(7);
            if (id.empty()) throw ConfigError("config: scheme section needs an id");
            const Section s(body, name,
                            {"protocol", "receiver", "order", "total_power", "power_source",
                             "power_relay", "knowledge", "knowledge_error", "selection",
                             "threshold_db", "threshold_variance", "awgn_variance", "lambda_sd",
                             "lambda_sm", "lambda_md", "eta"});
            spec.schemes.push_back(read_scheme(s, id));
        } else {
            throw ConfigError("config: unknown section [" + name + "]");
        }
    }

    spec.noise = LinkNoise::uniform(base);
    for (const auto& [name, body] : link_sections) {
        NoiseParams& target = name == "noise_sd"   ? spec.noise.sd
                              : name == "noise_sm" ? spec.noise.sm
                                                   : spec.noise.md;
        read_noise(Section(*body, name, {"p_bad", "gamma", "ratio"}), target);
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

} // namespace relaysim
