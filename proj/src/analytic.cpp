#include "relaysim/analytic.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relaysim::analytic {
namespace {

// Below this relative gap between two branch SNRs the i.n.d. two-branch
// expression is replaced by its equal-SNR limit.
constexpr double kEqualBranchGap = 1e-6;

void check_order(int order) {
    if (order != 2 && order != 4) {
        throw std::invalid_argument("analytic: unsupported modulation order " +
                                    std::to_string(order));
    }
}

double g_psk(int order) {
    const double s = std::sin(std::numbers::pi / order);
    return s * s;
}

double mpsk_ser_rayleigh(double gbar, int order) {
    if (std::isinf(gbar)) return 0.0;
    const double m = order;
    const double c = g_psk(order) * gbar;
    const double mu = std::sqrt(c / (1.0 + c));
    const double cot = order == 2 ? 0.0 : 1.0 / std::tan(std::numbers::pi / m);
    return (m - 1.0) / m *
           (1.0 - mu * (m / ((m - 1.0) * std::numbers::pi)) *
                      (std::numbers::pi / 2.0 + std::atan(mu * cot)));
}

/// Two-branch MRC BPSK bit error rate for one pair of branch SNRs.
double mrc_pair(double a, double b) {
    if (a <= 0.0) return 0.5 * psi(b);
    if (b <= 0.0) return 0.5 * psi(a);
    if (std::abs(1.0 - b / a) < kEqualBranchGap) {
        const double g = 0.5 * (a + b);
        const double mu = std::sqrt(g / (1.0 + g));
        const double h = 0.5 * (1.0 - mu);
        return h * h * (2.0 + mu);
    }
    // Divided difference of g psi(g) / 2; a single subtraction keeps it accurate near a = b.
    return 0.5 * (a * psi(a) - b * psi(b)) / (a - b);
}

/// E[ Q(sqrt(2 gamma)) | gamma > t ], gamma exponential with mean gbar.
double conditional_bpsk(double gbar, double t) {
    if (t <= 0.0) return 0.5 * psi(gbar);
    const double mu = std::sqrt(gbar / (1.0 + gbar));
    const double z = std::sqrt(t * (1.0 + 1.0 / gbar));
    const double v = 0.5 * std::exp(-t) * (erfcx(std::sqrt(t)) - mu * erfcx(z));
    return std::max(v, 0.0);
}

double instantaneous_ser(double snr, int order) {
    if (order == 2) return 0.5 * std::erfc(std::sqrt(snr));
    const double p = 0.5 * std::erfc(std::sqrt(snr / 2.0));
    return 2.0 * p - p * p;
}

} // namespace

LinkSnrProfile LinkSnrProfile::make(double power, const LinkGeometry& geom,
                                    const NoiseParams& noise) {
    noise.validate();
    geom.validate();
    LinkSnrProfile p;
    p.gbar_good = power * geom.omega() / noise.sigma_good_sq;
    p.gbar_bad = p.gbar_good / noise.ratio;
    p.p_good = 1.0 - noise.p_bad;
    p.p_bad = noise.p_bad;
    return p;
}

LinkSnrProfile LinkSnrProfile::scaled(double factor) const {
    LinkSnrProfile p = *this;
    p.gbar_good *= factor;
    p.gbar_bad *= factor;
    return p;
}

void LinkSnrProfile::validate() const {
    if (!(gbar_good >= 0.0) || !(gbar_bad >= 0.0)) {
        throw std::invalid_argument("analytic: average SNRs must be non-negative");
    }
    if (!(p_bad >= 0.0 && p_bad <= 1.0) || std::abs(p_good + p_bad - 1.0) > 1e-12) {
        throw std::invalid_argument("analytic: state probabilities must sum to one");
    }
}

double psi(double gbar) {
    if (std::isinf(gbar)) return 0.0;
    // 1 - sqrt(g/(1+g)) = 1 / ((1+g) (1 + sqrt(g/(1+g)))), without cancellation.
    const double mu = std::sqrt(gbar / (1.0 + gbar));
    return 1.0 / ((1.0 + gbar) * (1.0 + mu));
}

double erfcx(double x) {
    if (x < 0.0) throw std::domain_error("erfcx: negative argument");
    if (x < 26.0) return std::exp(x * x) * std::erfc(x);
    const double inv2 = 1.0 / (2.0 * x * x);
    // 1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + 105/(16x^8) - 945/(32x^10)
    double series = 1.0;
    double term = 1.0;
    for (int n = 1; n <= 5; ++n) {
        term *= -(2.0 * n - 1.0) * inv2;
        series += term;
    }
    return series / (x * std::sqrt(std::numbers::pi));
}

double dt_ser_mpsk(const LinkSnrProfile& profile, int order) {
    check_order(order);
    profile.validate();
    return profile.p_good * mpsk_ser_rayleigh(profile.gbar_good, order) +
           profile.p_bad * mpsk_ser_rayleigh(profile.gbar_bad, order);
}

double dt_ber_bpsk(const LinkSnrProfile& profile) {
    profile.validate();
    return 0.5 * profile.p_good * psi(profile.gbar_good) +
           0.5 * profile.p_bad * psi(profile.gbar_bad);
}

double dt_ber(const LinkSnrProfile& profile, int order) {
    check_order(order);
    return dt_ber_bpsk(order == 2 ? profile : profile.scaled(g_psk(order)));
}

double relay_ser(const LinkSnrProfile& sm, int order) { return dt_ser_mpsk(sm, order); }

double smd_ber_ner(const LinkSnrProfile& sd, const LinkSnrProfile& md) {
    sd.validate();
    md.validate();
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            total += sd.weight(u) * md.weight(v) * mrc_pair(sd.gbar(u), md.gbar(v));
        }
    }
    return total;
}

double smd_ber_er(const LinkSnrProfile& sd, const LinkSnrProfile& md, double c_zm) {
    sd.validate();
    md.validate();
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) {
            const double num = c_zm * md.gbar(v);
            const double den = num + sd.gbar(u);
            total += sd.weight(u) * md.weight(v) * (den > 0.0 ? num / den : 0.5);
        }
    }
    return total;
}

double sr_ber(const CoopProfiles& p, int order) {
    check_order(order);
    const double g = order == 2 ? 1.0 : g_psk(order);
    const auto sd = p.sd.scaled(g);
    const auto sm = p.sm.scaled(g);
    const auto md = p.md.scaled(g);
    const double relay = dt_ber_bpsk(sm);
    return relay * smd_ber_er(sd, md) + (1.0 - relay) * smd_ber_ner(sd, md);
}

double sdfr_ber_lower(const CoopProfiles& p, int order) {
    check_order(order);
    const double g = order == 2 ? 1.0 : g_psk(order);
    // The genie relay drops whole symbols, so the weight is the symbol error rate.
    const double relay = relay_ser(p.sm, order);
    return relay * dt_ber(p.sd, order) +
           (1.0 - relay) * smd_ber_ner(p.sd.scaled(g), p.md.scaled(g));
}

double forward_probability(const LinkSnrProfile& sm, double gamma_t) {
    if (!(gamma_t >= 0.0)) throw std::invalid_argument("analytic: threshold must be >= 0");
    if (std::isinf(gamma_t)) return 0.0;
    return std::exp(-gamma_t / sm.gbar_good);
}

double relay_ber_given_threshold(const LinkSnrProfile& sm, double gamma_t) {
    sm.validate();
    if (!(gamma_t >= 0.0)) throw std::invalid_argument("analytic: threshold must be >= 0");
    if (std::isinf(gamma_t)) return 0.0;
    const double ratio = sm.gbar_good / sm.gbar_bad;
    return sm.p_good * conditional_bpsk(sm.gbar_good, gamma_t) +
           sm.p_bad * conditional_bpsk(sm.gbar_bad, gamma_t / ratio);
}

double relay_ser_given_threshold(const LinkSnrProfile& sm, double gamma_t, int order) {
    check_order(order);
    sm.validate();
    if (!(gamma_t >= 0.0)) throw std::invalid_argument("analytic: threshold must be >= 0");
    if (std::isinf(gamma_t)) return 0.0;
    const double ratio = sm.gbar_good / sm.gbar_bad;
    boost::math::quadrature::exp_sinh<double> integrator;
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
        const double scale = u == 0 ? 1.0 : 1.0 / ratio;
        // Given gamma_G > t, gamma_G - t is again exponential with mean gbar_G.
        auto f = [&](double v) {
            return instantaneous_ser((gamma_t + sm.gbar_good * v) * scale, order) * std::exp(-v);
        };
        total += sm.weight(u) * integrator.integrate(f, 1e-12);
    }
    return total;
}

double sdfr_ber_threshold(const CoopProfiles& p, double gamma_t, int order) {
    check_order(order);
    const double g = order == 2 ? 1.0 : g_psk(order);
    const auto sd = p.sd.scaled(g);
    const auto sm = p.sm.scaled(g);
    const auto md = p.md.scaled(g);
    const double forward = forward_probability(p.sm, gamma_t);
    const double relay = std::isinf(gamma_t) ? 0.0 : relay_ber_given_threshold(sm, gamma_t * g);
    const double cooperative = relay * smd_ber_er(sd, md) + (1.0 - relay) * smd_ber_ner(sd, md);
    return forward * cooperative + (1.0 - forward) * dt_ber_bpsk(sd);
}

} // namespace relaysim::analytic
