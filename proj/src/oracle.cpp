#include "relaysim/oracle.hpp"

#include "relaysim/channel.hpp"
#include "relaysim/random.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace relaysim::oracle {
namespace {

struct Enumeration {
    std::size_t steps;
    int order;
    // ln p(y_k | x_k = m, s_k = s) as [k][m][s]
    std::vector<double> emission;
    // ln sum_m p(m) p(y_k | m, s) as [k][s]
    std::vector<double> marginal;
    std::vector<double> log_prior;  // [k][m]

    double em(std::size_t k, int m, int s) const { return emission[(k * order + m) * 2 + s]; }
};

Enumeration tabulate(const Observation& obs, const NoiseParams& params, const Modulation& mod,
                     const DetectOptions& options) {
    if (obs.y.size() > kMaxEnumerationLength) {
        throw std::invalid_argument("oracle: frame too long for enumeration");
    }
    Enumeration t{obs.y.size(), mod.order(), {}, {}, {}};
    t.emission.resize(t.steps * t.order * 2);
    t.marginal.resize(t.steps * 2);
    t.log_prior.resize(t.steps * t.order);
    const cdouble gain = std::sqrt(obs.power) * obs.h;
    for (std::size_t k = 0; k < t.steps; ++k) {
        const bool silent = !options.silent.empty() && options.silent[k] != 0;
        for (int m = 0; m < t.order; ++m) {
            t.log_prior[k * t.order + m] = options.priors != nullptr
                                               ? options.priors->log_prob(k, m)
                                               : -std::log(static_cast<double>(t.order));
        }
        for (int s = 0; s < 2; ++s) {
            const auto state = static_cast<NoiseState>(s);
            std::vector<double> terms;
            for (int m = 0; m < t.order; ++m) {
                const cdouble mean = silent ? cdouble{} : gain * mod.point(m);
                const double e = log_pdf(obs.y[k] - mean, state, params);
                t.emission[(k * t.order + m) * 2 + s] = e;
                terms.push_back(t.log_prior[k * t.order + m] + e);
            }
            t.marginal[k * 2 + s] = silent ? t.em(k, 0, s) : log_sum_exp(terms);
        }
    }
    return t;
}

double log_sequence_prob(std::size_t mask, std::size_t steps, const NoiseParams& params) {
    const auto trans = transition_probs(params);
    auto state = [&](std::size_t j) { return static_cast<NoiseState>((mask >> j) & 1U); };
    double lp = std::log(params.stationary(state(0)));
    for (std::size_t j = 0; j + 1 < steps; ++j) {
        lp += std::log(trans.prob(state(j), state(j + 1)));
    }
    return lp;
}

} // namespace

SymbolPosteriors enumerate_posteriors(const Observation& obs, const NoiseParams& params,
                                      const Modulation& mod, const DetectOptions& options) {
    const auto t = tabulate(obs, params, mod, options);
    const std::size_t sequences = std::size_t{1} << t.steps;
    SymbolPosteriors out(t.steps, t.order);

    for (std::size_t k = 0; k < t.steps; ++k) {
        if (!options.silent.empty() && options.silent[k] != 0) continue;
        std::vector<std::vector<double>> terms(t.order);
        for (std::size_t mask = 0; mask < sequences; ++mask) {
            const double lp_seq = log_sequence_prob(mask, t.steps, params);
            if (std::isinf(lp_seq)) continue;
            double rest = lp_seq;
            for (std::size_t j = 0; j < t.steps; ++j) {
                if (j != k) rest += t.marginal[j * 2 + ((mask >> j) & 1U)];
            }
            const int sk = static_cast<int>((mask >> k) & 1U);
            for (int m = 0; m < t.order; ++m) {
                terms[m].push_back(rest + t.log_prior[k * t.order + m] + t.em(k, m, sk));
            }
        }
        auto row = out.log_row(k);
        for (int m = 0; m < t.order; ++m) row[m] = log_sum_exp(terms[m]);
        out.normalize_row(k);
    }
    return out;
}

double enumerate_log_evidence(const Observation& obs, const NoiseParams& params,
                              const Modulation& mod) {
    const auto t = tabulate(obs, params, mod, {});
    const std::size_t sequences = std::size_t{1} << t.steps;
    std::vector<double> terms;
    for (std::size_t mask = 0; mask < sequences; ++mask) {
        double lp = log_sequence_prob(mask, t.steps, params);
        for (std::size_t j = 0; j < t.steps; ++j) lp += t.marginal[j * 2 + ((mask >> j) & 1U)];
        terms.push_back(lp);
    }
    return log_sum_exp(terms);
}

EquivalenceReport run_equivalence_suite(std::size_t trials, std::uint64_t seed,
                                        std::size_t max_len, double tolerance, int order) {
    EquivalenceReport report;
    report.tolerance = tolerance;
    const auto mod = Modulation::of_order(order);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        auto rng = RandomStream::derive(seed, {trial});
        NoiseParams params;
        params.p_bad = rng.uniform();
        params.gamma = 1.0 + 199.0 * rng.uniform();
        params.ratio = std::pow(10.0, 3.0 * rng.uniform());
        params.sigma_good_sq = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
        const std::size_t len = 1 + static_cast<std::size_t>(rng.uniform() * max_len);
        const double power = 0.1 + 1.9 * rng.uniform();

        std::vector<std::uint8_t> bits(len * mod.bits_per_symbol());
        for (auto& b : bits) b = rng.bit();
        const auto link = realize_link(LinkGeometry{}, params, len, power, rng);
        const auto y = transmit(mod.modulate(bits), link);
        const Observation obs{y, link.h, power};

        const auto fast = map_detect(obs, params, mod);
        const auto slow = enumerate_posteriors(obs, params, mod);
        double worst = 0.0;
        for (std::size_t k = 0; k < len; ++k) {
            for (int m = 0; m < mod.order(); ++m) {
                worst = std::max(worst, std::abs(fast.prob(k, m) - slow.prob(k, m)));
            }
        }
        report.max_abs_error = std::max(report.max_abs_error, worst);
        if (!(worst <= tolerance)) ++report.failures;
        ++report.trials;
    }
    return report;
}

} // namespace relaysim::oracle
