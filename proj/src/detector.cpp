#include "relaysim/detector.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relaysim {
namespace {

constexpr int kGood = 0;
constexpr int kBad = 1;

void check_inputs(const Observation& obs, const Modulation& mod, const DetectOptions& options) {
    if (!std::isfinite(obs.h.real()) || !std::isfinite(obs.h.imag()) ||
        !std::isfinite(obs.power) || obs.power < 0.0) {
        throw std::invalid_argument("detect: non-finite channel coefficient or power");
    }
    for (const auto& v : obs.y) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw std::invalid_argument("detect: non-finite received sample");
        }
    }
    if (options.priors != nullptr) {
        if (options.priors->size() != obs.y.size() || options.priors->order() != mod.order()) {
            throw std::invalid_argument("detect: prior shape does not match the frame");
        }
    }
    if (!options.silent.empty() && options.silent.size() != obs.y.size()) {
        throw std::invalid_argument("detect: silent mask length does not match the frame");
    }
}

bool is_silent(const DetectOptions& options, std::size_t k) {
    return !options.silent.empty() && options.silent[k] != 0;
}

double log_prior(const DetectOptions& options, std::size_t k, int m, int order) {
    if (options.priors == nullptr) return -std::log(static_cast<double>(order));
    return options.priors->log_prob(k, m);
}

/// -ln(pi sigma^2) - |n|^2 / sigma^2 with the constant precomputed.
struct GaussianLogDensity {
    double log_norm;
    double inv_var;

    explicit GaussianLogDensity(double var)
        : log_norm(-std::log(std::numbers::pi * var)), inv_var(1.0 / var) {}

    double operator()(cdouble n) const { return log_norm - std::norm(n) * inv_var; }
};

/// Shared shape of the per-symbol detectors: row(k, m) gives the unnormalized
/// log-likelihood of label m at step k.
template <typename RowFn>
SymbolPosteriors per_symbol(const Observation& obs, const Modulation& mod,
                            const DetectOptions& options, RowFn&& loglik) {
    const int order = mod.order();
    SymbolPosteriors out(obs.y.size(), order);
    for (std::size_t k = 0; k < obs.y.size(); ++k) {
        if (is_silent(options, k)) continue;
        auto row = out.log_row(k);
        for (int m = 0; m < order; ++m) {
            row[m] = log_prior(options, k, m, order) + loglik(k, m);
        }
        out.normalize_row(k);
    }
    return out;
}

} // namespace

double TrellisWorkspace::log_evidence_forward() const {
    const auto& last = alpha.back();
    return log_scale_forward + log_add(last[kGood], last[kBad]);
}

double TrellisWorkspace::log_evidence_backward() const {
    const auto& first = beta.front();
    return log_scale_backward +
           log_add(log_initial[kGood] + first[kGood], log_initial[kBad] + first[kBad]);
}

SymbolPosteriors map_detect(const Observation& obs, const NoiseParams& params,
                            const Modulation& mod, const DetectOptions& options,
                            TrellisWorkspace* workspace) {
    check_inputs(obs, mod, options);
    const auto trans = transition_probs(params);
    const std::size_t steps = obs.y.size();
    const int order = mod.order();

    TrellisWorkspace local;
    TrellisWorkspace& ws = workspace != nullptr ? *workspace : local;
    ws.alpha.assign(steps + 1, {0.0, 0.0});
    ws.beta.assign(steps + 1, {0.0, 0.0});
    ws.emission.assign(steps * order * 2, 0.0);
    ws.log_scale_forward = 0.0;
    ws.log_scale_backward = 0.0;
    ws.log_initial = {safe_log(1.0 - params.p_bad), safe_log(params.p_bad)};

    // ln p(s' | s), indexed [s][s'].
    const double log_t[2][2] = {
        {safe_log(1.0 - trans.good_to_bad), safe_log(trans.good_to_bad)},
        {safe_log(trans.bad_to_good), safe_log(1.0 - trans.bad_to_good)},
    };

    const GaussianLogDensity dens[2] = {GaussianLogDensity(params.sigma_good_sq),
                                        GaussianLogDensity(params.sigma_bad_sq())};
    const cdouble gain = std::sqrt(obs.power) * obs.h;

    // Emissions and ln l_k(s) = ln sum_x p(x) p(y_k | x, s).
    std::vector<TrellisWorkspace::Pair> state_lik(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        double* em = &ws.emission[k * order * 2];
        if (is_silent(options, k)) {
            for (int s = 0; s < 2; ++s) {
                state_lik[k][s] = dens[s](obs.y[k]);
                for (int m = 0; m < order; ++m) em[m * 2 + s] = state_lik[k][s];
            }
            continue;
        }
        double acc[2] = {kNegInf, kNegInf};
        for (int m = 0; m < order; ++m) {
            const cdouble n = obs.y[k] - gain * mod.point(m);
            const double lp = log_prior(options, k, m, order);
            for (int s = 0; s < 2; ++s) {
                em[m * 2 + s] = dens[s](n);
                acc[s] = log_add(acc[s], lp + em[m * 2 + s]);
            }
        }
        state_lik[k] = {acc[0], acc[1]};
    }

    // Forward filter.
    ws.alpha[0] = ws.log_initial;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto& a = ws.alpha[k];
        const double from[2] = {a[kGood] + state_lik[k][kGood], a[kBad] + state_lik[k][kBad]};
        auto& next = ws.alpha[k + 1];
        for (int s2 = 0; s2 < 2; ++s2) {
            next[s2] = log_add(from[kGood] + log_t[kGood][s2], from[kBad] + log_t[kBad][s2]);
        }
        const double top = std::max(next[0], next[1]);
        if (!std::isfinite(top)) {
            throw std::domain_error("map_detect: forward filter vanished");
        }
        next[0] -= top;
        next[1] -= top;
        ws.log_scale_forward += top;
    }

    // Backward filter.
    std::vector<TrellisWorkspace::Pair> ahead(steps);  // ln sum_s' p(s'|s) beta_{k+1}(s')
    for (std::size_t k = steps; k-- > 0;) {
        const auto& b = ws.beta[k + 1];
        auto& cur = ws.beta[k];
        for (int s = 0; s < 2; ++s) {
            ahead[k][s] = log_add(log_t[s][kGood] + b[kGood], log_t[s][kBad] + b[kBad]);
            cur[s] = state_lik[k][s] + ahead[k][s];
        }
        const double top = std::max(cur[0], cur[1]);
        if (!std::isfinite(top)) {
            throw std::domain_error("map_detect: backward filter vanished");
        }
        cur[0] -= top;
        cur[1] -= top;
        ws.log_scale_backward += top;
    }

    // p(x_k = x, y^K) ~ p(x) sum_{s,s'} alpha_k(s) delta_k(x, s, s') beta_{k+1}(s').
    SymbolPosteriors out(steps, order);
    for (std::size_t k = 0; k < steps; ++k) {
        if (is_silent(options, k)) continue;
        const double* em = &ws.emission[k * order * 2];
        const double w_good = ws.alpha[k][kGood] + ahead[k][kGood];
        const double w_bad = ws.alpha[k][kBad] + ahead[k][kBad];
        auto row = out.log_row(k);
        for (int m = 0; m < order; ++m) {
            row[m] = log_prior(options, k, m, order) +
                     log_add(w_good + em[m * 2 + kGood], w_bad + em[m * 2 + kBad]);
        }
        out.normalize_row(k);
    }
    return out;
}

SymbolPosteriors memoryless_detect(const Observation& obs, const NoiseParams& params,
                                   const Modulation& mod, const DetectOptions& options) {
    check_inputs(obs, mod, options);
    params.validate();
    const GaussianLogDensity good(params.sigma_good_sq);
    const GaussianLogDensity bad(params.sigma_bad_sq());
    const double w_good = safe_log(1.0 - params.p_bad);
    const double w_bad = safe_log(params.p_bad);
    const cdouble gain = std::sqrt(obs.power) * obs.h;
    return per_symbol(obs, mod, options, [&](std::size_t k, int m) {
        const cdouble n = obs.y[k] - gain * mod.point(m);
        return log_add(w_good + good(n), w_bad + bad(n));
    });
}

SymbolPosteriors awgn_detect(const Observation& obs, double sigma_sq, const Modulation& mod,
                             const DetectOptions& options) {
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw std::invalid_argument("awgn_detect: noise variance must be positive");
    }
    check_inputs(obs, mod, options);
    const double inv_var = 1.0 / sigma_sq;
    const cdouble gain = std::sqrt(obs.power) * obs.h;
    return per_symbol(obs, mod, options, [&](std::size_t k, int m) {
        return -std::norm(obs.y[k] - gain * mod.point(m)) * inv_var;
    });
}

SymbolPosteriors genie_detect(const Observation& obs, std::span<const NoiseState> states,
                              const NoiseParams& params, const Modulation& mod,
                              const DetectOptions& options) {
    check_inputs(obs, mod, options);
    params.validate();
    if (states.size() != obs.y.size()) {
        throw std::invalid_argument("genie_detect: state sequence length mismatch");
    }
    const double inv_var[2] = {1.0 / params.sigma_good_sq, 1.0 / params.sigma_bad_sq()};
    const cdouble gain = std::sqrt(obs.power) * obs.h;
    return per_symbol(obs, mod, options, [&](std::size_t k, int m) {
        return -std::norm(obs.y[k] - gain * mod.point(m)) *
               inv_var[static_cast<int>(states[k])];
    });
}

} // namespace relaysim
