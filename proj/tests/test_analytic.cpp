#include "relaysim/analytic.hpp"
#include "relaysim/experiment.hpp"
#include "relaysim/relaying.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace relaysim;
using namespace relaysim::analytic;

namespace {

constexpr double kPi = std::numbers::pi;

// Composite Simpson on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

// Craig-form oracles. With s = sin(phi):
//   Q(sqrt(2 g))          = 1/pi int_0^{pi/2}   exp(-g / s^2)
//   QPSK SER at SNR g     = 1/pi int_0^{3pi/4} exp(-g / (2 s^2))
// and averaging exp(-c g) over an exponential g with mean G gives 1/(1 + c G).
double oracle_bpsk(double gbar) {
    return simpson([&](double p) { return 1.0 / (1.0 + gbar / std::pow(std::sin(p), 2)); }, 1e-12,
                   kPi / 2) / kPi;
}

double oracle_mpsk_ser(double gbar, int m) {
    const double g = std::pow(std::sin(kPi / m), 2);
    return simpson([&](double p) { return 1.0 / (1.0 + g * gbar / std::pow(std::sin(p), 2)); },
                   1e-12, (m - 1) * kPi / m) / kPi;
}

double oracle_mrc(double a, double b) {
    return simpson(
               [&](double p) {
                   const double s2 = std::pow(std::sin(p), 2);
                   return 1.0 / ((1.0 + a / s2) * (1.0 + b / s2));
               },
               1e-12, kPi / 2) / kPi;
}

// E[Q(sqrt(2 g)) | g > t] and the QPSK SER analogue.
double oracle_conditional(double gbar, double t, double g = 1.0, double upper = kPi / 2) {
    return simpson(
               [&](double p) {
                   const double s2 = std::pow(std::sin(p), 2);
                   return std::exp(-g * t / s2) / (1.0 + g * gbar / s2);
               },
               1e-12, upper) / kPi;
}

LinkSnrProfile profile(double gbar_good, double ratio, double p_bad) {
    return {gbar_good, gbar_good / ratio, 1 - p_bad, p_bad};
}

// Per-link profiles at the reference geometry, built by hand.
CoopProfiles reference(double snr_db, double p_bad = 0.1, double ratio = 100) {
    const double inv = std::pow(10.0, snr_db / 10);  // 1 / sigma_G^2
    return {profile(0.5 * 1.0 * inv, ratio, p_bad), profile(0.5 / 0.16 * inv, ratio, p_bad),
            profile(0.5 / 0.36 * inv, ratio, p_bad)};
}

} // namespace

TEST(Psi, MatchesDefinitionAndStaysAccurate) {
    for (double g : {1e-3, 0.5, 1.0, 10.0, 1e3}) {
        EXPECT_NEAR(psi(g), 1 - std::sqrt(g / (1 + g)), 1e-12);
    }
    // 1 - sqrt(g/(1+g)) ~ 1/(2g) for large g
    EXPECT_NEAR(psi(1e12) * 2e12, 1.0, 1e-6);
    EXPECT_EQ(psi(INFINITY), 0.0);
}

TEST(Erfcx, AgreesAcrossBranches) {
    for (double x : {0.0, 0.5, 3.0, 10.0, 25.0}) {
        EXPECT_NEAR(erfcx(x), std::exp(x * x) * std::erfc(x), 1e-13 * erfcx(x));
    }
    // asymptotic branch versus the continued behaviour 1/(x sqrt(pi))
    EXPECT_NEAR(erfcx(30.0) * 30.0 * std::sqrt(kPi), 1.0, 1e-3);
    EXPECT_NEAR(erfcx(26.0), erfcx(std::nextafter(26.0, 0.0)), 1e-13);
}

TEST(DtSer, SingleStateBpskHandValue) {
    EXPECT_NEAR(dt_ser_mpsk(profile(100, 1, 0), 2), 0.5 * (1 - std::sqrt(100.0 / 101)), 1e-15);
    EXPECT_NEAR(dt_ser_mpsk(profile(100, 1, 0), 2), 2.4814e-3, 1e-7);
}

TEST(DtSer, MatchesCraigIntegral) {
    for (int m : {2, 4}) {
        for (double g : {0.1, 1.0, 10.0, 100.0, 3000.0}) {
            for (double pb : {0.0, 0.1, 1.0}) {
                const auto p = profile(g, 100, pb);
                const double want = (1 - pb) * oracle_mpsk_ser(g, m) + pb * oracle_mpsk_ser(g / 100, m);
                EXPECT_NEAR(dt_ser_mpsk(p, m), want, 1e-9 * want) << m << " " << g;
            }
        }
    }
}

TEST(DtSer, DecreasingAndQpskWorse) {
    double prev2 = 1, prev4 = 1;
    for (double db = -10; db <= 60; db += 1) {
        const auto p = profile(std::pow(10, db / 10), 100, 0.1);
        const double s2 = dt_ser_mpsk(p, 2), s4 = dt_ser_mpsk(p, 4);
        EXPECT_LT(s2, prev2);
        EXPECT_LT(s4, prev4);
        EXPECT_GE(s4, s2);
        EXPECT_GE(s2, 0.0);
        EXPECT_LE(s4, 1.0);
        prev2 = s2;
        prev4 = s4;
    }
    EXPECT_LT(dt_ser_mpsk(profile(1e12, 1, 0), 4), 1e-12);
}

TEST(DtBer, ReferenceValueAt20dB) {
    const auto p = profile(100, 100, 0.1);
    const double want = 0.9 * 0.5 * (1 - std::sqrt(100.0 / 101)) + 0.1 * 0.5 * (1 - std::sqrt(0.5));
    EXPECT_NEAR(dt_ber_bpsk(p), want, 1e-15);
    EXPECT_NEAR(dt_ber_bpsk(p), 1.688e-2, 5e-6);
    // the per-link profile builder yields the same numbers
    const LinkNoise noise = noise_at(LinkNoise::uniform(NoiseParams{}), 20.0);
    EXPECT_NEAR(dt_ber_bpsk(LinkSnrProfile::make(1.0, {1, 2}, noise.sd)), want, 1e-15);
}

TEST(DtBer, DegenerateWeights) {
    EXPECT_NEAR(dt_ber_bpsk(profile(50, 10, 1.0)), 0.5 * psi(5.0), 1e-15);
    const double a = dt_ber_bpsk(profile(50, 1, 0.2));
    const double b = dt_ber_bpsk(profile(50, 1, 0.7));
    EXPECT_NEAR(a, b, 1e-15);
}

TEST(DtBer, QpskByBitCounting) {
    // Gray QPSK bits are two independent BPSK decisions at half the SNR.
    for (double g : {1.0, 30.0, 1000.0}) {
        const auto p = profile(g, 100, 0.1);
        const double want = 0.9 * oracle_bpsk(g / 2) + 0.1 * oracle_bpsk(g / 200);
        EXPECT_NEAR(dt_ber(p, 4), want, 1e-9 * want);
    }
}

TEST(RelaySer, ScalesWithRelayGeometry) {
    const LinkNoise noise = noise_at(LinkNoise::uniform(NoiseParams{0.0, 1, 1, 1}), 10.0);
    const auto sm = LinkSnrProfile::make(1.0, {0.4, 2}, noise.sm);
    EXPECT_NEAR(sm.gbar_good, 10.0 / 0.16, 1e-9);
    EXPECT_NEAR(relay_ser(sm, 2), 0.5 * psi(62.5), 1e-15);
}

TEST(SmdNer, MatchesMgfIntegral) {
    for (auto [a, b] : {std::pair{1.0, 3.0}, {50.0, 138.9}, {7.0, 7.0}, {7.0, 7.0 * (1 + 1e-8)},
                        {0.2, 900.0}}) {
        const auto sd = profile(a, 100, 0.1);
        const auto md = profile(b, 100, 0.1);
        double want = 0;
        for (int u = 0; u < 2; ++u) {
            for (int v = 0; v < 2; ++v) {
                want += sd.weight(u) * md.weight(v) * oracle_mrc(sd.gbar(u), md.gbar(v));
            }
        }
        EXPECT_NEAR(smd_ber_ner(sd, md), want, 1e-8 * want) << a << " " << b;
    }
}

TEST(SmdNer, AccurateAroundEqualBranchSnr) {
    const auto sd = profile(20, 10, 0.3);
    for (double eps : {1e-3, 1e-5, 2e-6, 5e-7, 1e-9, 0.0}) {
        const auto md = sd.scaled(1 + eps);
        double want = 0;
        for (int u = 0; u < 2; ++u) {
            for (int v = 0; v < 2; ++v) {
                want += sd.weight(u) * md.weight(v) * oracle_mrc(sd.gbar(u), md.gbar(v));
            }
        }
        EXPECT_NEAR(smd_ber_ner(sd, md), want, 1e-8 * want) << eps;
    }
}

TEST(SmdNer, VanishingRelayBranchIsDirect) {
    const auto sd = profile(40, 100, 0.1);
    EXPECT_NEAR(smd_ber_ner(sd, profile(1e-12, 100, 0.1)), dt_ber_bpsk(sd), 1e-10);
    EXPECT_NEAR(smd_ber_ner(sd, profile(0.0, 100, 0.1)), dt_ber_bpsk(sd), 1e-15);
}

TEST(SmdEr, LimitsAndHandSum) {
    const auto sd = profile(40, 100, 0.1);
    EXPECT_NEAR(smd_ber_er(sd, profile(1e15, 100, 0.1)), 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(smd_ber_er(profile(7, 1, 0), profile(7, 1, 0)), 0.5);
    const auto p = reference(20.0);
    double want = 0;
    const double gs[2] = {50.0, 0.5};
    const double gm[2] = {50.0 / 0.36, 0.5 / 0.36};
    const double w[2] = {0.9, 0.1};
    for (int u = 0; u < 2; ++u) {
        for (int v = 0; v < 2; ++v) want += w[u] * w[v] * gm[v] / (gm[v] + gs[u]);
    }
    EXPECT_NEAR(smd_ber_er(p.sd, p.md), want, 1e-14);
    EXPECT_NEAR(want, 0.6950507711, 1e-10);
}

TEST(SrBer, MixesRelayErrorRegimes) {
    const auto p = reference(20.0);
    const double pm = oracle_bpsk(p.sm.gbar_good) * 0.9 + oracle_bpsk(p.sm.gbar_bad) * 0.1;
    const double want = pm * smd_ber_er(p.sd, p.md) + (1 - pm) * smd_ber_ner(p.sd, p.md);
    EXPECT_NEAR(sr_ber(p, 2), want, 1e-9 * want);
    EXPECT_NEAR(sr_ber(p, 2), 5.92873010787e-3, 1e-13);
    // forcing the relay error probability to its extremes
    auto perfect = p;
    perfect.sm = profile(INFINITY, 1, 0);
    EXPECT_NEAR(sr_ber(perfect, 2), smd_ber_ner(p.sd, p.md), 1e-15);
    auto broken = p;
    broken.sm = profile(0.0, 1, 0);  // relay BER 1/2
    EXPECT_NEAR(sr_ber(broken, 2),
                0.5 * smd_ber_er(p.sd, p.md) + 0.5 * smd_ber_ner(p.sd, p.md), 1e-15);
}

TEST(SdfrLower, Limits) {
    const auto p = reference(15.0);
    auto perfect = p;
    perfect.sm = profile(INFINITY, 1, 0);
    EXPECT_NEAR(sdfr_ber_lower(perfect, 2), smd_ber_ner(p.sd, p.md), 1e-15);
    auto hopeless = p;
    hopeless.sm = profile(0.0, 1, 0);  // SER 1/2 for BPSK
    EXPECT_NEAR(sdfr_ber_lower(hopeless, 2),
                0.5 * dt_ber_bpsk(p.sd) + 0.5 * smd_ber_ner(p.sd, p.md), 1e-15);
    EXPECT_NEAR(sdfr_ber_lower(reference(10.0), 2), 0.0115216048626, 1e-13);
}

TEST(Threshold, RelayConditionalBerMatchesIntegral) {
    const auto sm = reference(10.0, 0.1, 10).sm;
    for (double t : {0.0, 0.5, 1.0, 3.16, 10.0, 100.0}) {
        const double want = 0.9 * oracle_conditional(sm.gbar_good, t) +
                            0.1 * oracle_conditional(sm.gbar_bad, t / 10);
        const double got = relay_ber_given_threshold(sm, t);
        EXPECT_NEAR(got, want, 1e-9 * want + 1e-300) << t;
        EXPECT_LE(got, relay_ser(sm, 2) + 1e-15);
    }
    EXPECT_NEAR(relay_ber_given_threshold(sm, 0.0), relay_ser(sm, 2), 1e-15);
    EXPECT_LT(relay_ber_given_threshold(sm, 1e4), 1e-300);
    EXPECT_EQ(relay_ber_given_threshold(sm, INFINITY), 0.0);
}

TEST(Threshold, RelayConditionalQpskSerMatchesIntegral) {
    const auto sm = reference(10.0, 0.1, 10).sm;
    for (double t : {0.0, 1.0, 3.16, 10.0}) {
        const double want = 0.9 * oracle_conditional(sm.gbar_good, t, 0.5, 3 * kPi / 4) +
                            0.1 * oracle_conditional(sm.gbar_bad, t / 10, 0.5, 3 * kPi / 4);
        EXPECT_NEAR(relay_ser_given_threshold(sm, t, 4), want, 1e-8 * want) << t;
    }
    EXPECT_NEAR(relay_ser_given_threshold(sm, 0.0, 4), relay_ser(sm, 4), 1e-9);
    EXPECT_NEAR(relay_ser_given_threshold(sm, 2.0, 2), relay_ber_given_threshold(sm, 2.0), 1e-10);
}

TEST(Threshold, EndToEndLimits) {
    const auto p = reference(12.0, 0.1, 10);
    for (int m : {2, 4}) {
        EXPECT_NEAR(sdfr_ber_threshold(p, 0.0, m), sr_ber(p, m), 1e-15);
        EXPECT_NEAR(sdfr_ber_threshold(p, INFINITY, m), dt_ber(p.sd, m), 1e-15);
        EXPECT_NEAR(sdfr_ber_threshold(p, 1e9, m), dt_ber(p.sd, m), 1e-12);
    }
    EXPECT_NEAR(forward_probability(p.sm, 3.0), std::exp(-3.0 / p.sm.gbar_good), 1e-15);
}

TEST(Properties, ProbabilitiesAndMonotoneInSnr) {
    for (int m : {2, 4}) {
        double prev[5] = {1, 1, 1, 1, 1};
        for (double db = -5; db <= 45; db += 2.5) {
            const auto p = reference(db);
            const double v[5] = {dt_ber(p.sd, m), sr_ber(p, m), sdfr_ber_lower(p, m),
                                 sdfr_ber_threshold(p, 3.16, m), relay_ser(p.sm, m)};
            for (int i = 0; i < 5; ++i) {
                EXPECT_GE(v[i], 0.0);
                EXPECT_LE(v[i], 1.0);
                EXPECT_LT(v[i], prev[i]) << "curve " << i << " at " << db << " dB, M=" << m;
                prev[i] = v[i];
            }
        }
    }
}

TEST(Properties, RejectsInvalid) {
    EXPECT_THROW(dt_ser_mpsk(profile(1, 1, 0), 8), std::invalid_argument);
    EXPECT_THROW(dt_ber_bpsk(LinkSnrProfile{1, 1, 0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(forward_probability(profile(1, 1, 0), -1.0), std::invalid_argument);
}
