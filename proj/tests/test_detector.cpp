#include "relaysim/channel.hpp"
#include "relaysim/detector.hpp"
#include "relaysim/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace relaysim;

namespace {

struct Frame {
    std::vector<cdouble> y;
    LinkRealization link;
};

Frame make_frame(const NoiseParams& p, const Modulation& mod, std::size_t k, double power,
                 RandomStream& rng) {
    std::vector<std::uint8_t> bits(k * mod.bits_per_symbol());
    for (auto& b : bits) b = rng.bit();
    Frame f;
    f.link = realize_link({1.0, 2.0}, p, k, power, rng);
    f.y = transmit(mod.modulate(bits), f.link);
    return f;
}

NoiseParams random_params(RandomStream& rng) {
    NoiseParams p;
    p.p_bad = rng.uniform();
    p.gamma = 1.0 + 199.0 * rng.uniform();
    p.ratio = std::pow(10.0, 3.0 * rng.uniform());
    p.sigma_good_sq = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
    return p;
}

double max_prob_diff(const SymbolPosteriors& a, const SymbolPosteriors& b) {
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (int m = 0; m < a.order(); ++m) {
            worst = std::max(worst, std::abs(a.prob(k, m) - b.prob(k, m)));
        }
    }
    return worst;
}

} // namespace

TEST(MapDetect, MatchesEnumerationBpsk) {
    const auto report = oracle::run_equivalence_suite(1000, 2024, 8, 1e-9, 2);
    EXPECT_TRUE(report.passed()) << report.failures << " failures, max " << report.max_abs_error;
}

TEST(MapDetect, MatchesEnumerationQpsk) {
    const auto report = oracle::run_equivalence_suite(300, 2025, 7, 1e-9, 4);
    EXPECT_TRUE(report.passed()) << report.failures << " failures, max " << report.max_abs_error;
}

TEST(MapDetect, MatchesEnumerationWithPriorsAndSilence) {
    RandomStream rng(31);
    const auto mod = Modulation::bpsk();
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_params(rng);
        const std::size_t k = 1 + trial % 8;
        const auto f = make_frame(p, mod, k, 1.0, rng);
        SymbolPosteriors priors(k, 2);
        std::vector<std::uint8_t> silent(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double a = rng.uniform() * 0.98 + 0.01;
            priors.log_row(i)[0] = std::log(a);
            priors.log_row(i)[1] = std::log1p(-a);
            silent[i] = rng.uniform() < 0.3;
        }
        DetectOptions opts{&priors, silent};
        const Observation obs{f.y, f.link.h, f.link.power};
        const auto got = map_detect(obs, p, mod, opts);
        const auto want = oracle::enumerate_posteriors(obs, p, mod, opts);
        ASSERT_LT(max_prob_diff(got, want), 1e-9) << "trial " << trial;
    }
}

TEST(MapDetect, SingleStepIsMixture) {
    RandomStream rng(7);
    const auto mod = Modulation::bpsk();
    for (int i = 0; i < 50; ++i) {
        const auto p = random_params(rng);
        const auto f = make_frame(p, mod, 1, 1.0, rng);
        const Observation obs{f.y, f.link.h, 1.0};
        // direct mixture evaluation
        double lik[2];
        for (int m = 0; m < 2; ++m) {
            const cdouble e = f.y[0] - f.link.h * mod.point(m);
            lik[m] = (1 - p.p_bad) * std::exp(log_pdf(e, NoiseState::Good, p)) +
                     p.p_bad * std::exp(log_pdf(e, NoiseState::Bad, p));
        }
        const auto post = map_detect(obs, p, mod);
        EXPECT_NEAR(post.prob(0, 0), lik[0] / (lik[0] + lik[1]), 1e-12);
    }
}

TEST(Collapse, MemorylessStatesEqualMixtureDetector) {
    RandomStream rng(11);
    for (int i = 0; i < 100; ++i) {
        auto p = random_params(rng);
        p.gamma = 1.0;
        const int order = i % 2 ? 4 : 2;
        const auto mod = Modulation::of_order(order);
        const auto f = make_frame(p, mod, 200, 1.0 + rng.uniform(), rng);
        const Observation obs{f.y, f.link.h, f.link.power};
        ASSERT_LT(max_prob_diff(map_detect(obs, p, mod), memoryless_detect(obs, p, mod)), 1e-9);
    }
}

TEST(Collapse, EqualVariancesGiveMatchedFilterLlr) {
    RandomStream rng(12);
    const auto mod = Modulation::bpsk();
    for (int i = 0; i < 100; ++i) {
        auto p = random_params(rng);
        p.ratio = 1.0;
        const double power = 0.5 + rng.uniform();
        const auto f = make_frame(p, mod, 200, power, rng);
        const Observation obs{f.y, f.link.h, power};
        const auto llr = demap_bits(map_detect(obs, p, mod), mod);
        for (std::size_t k = 0; k < f.y.size(); ++k) {
            const double want =
                4 * std::sqrt(power) * (std::conj(f.link.h) * f.y[k]).real() / p.sigma_good_sq;
            ASSERT_NEAR(llr[k], want, 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST(Collapse, NoBadStateEqualsAwgnDetector) {
    RandomStream rng(13);
    for (int i = 0; i < 100; ++i) {
        auto p = random_params(rng);
        p.p_bad = 0.0;
        const auto mod = Modulation::of_order(i % 2 ? 4 : 2);
        const auto f = make_frame(p, mod, 200, 1.0, rng);
        const Observation obs{f.y, f.link.h, 1.0};
        ASSERT_LT(max_prob_diff(map_detect(obs, p, mod), awgn_detect(obs, p.sigma_good_sq, mod)),
                  1e-9);
        ASSERT_LT(max_prob_diff(memoryless_detect(obs, p, mod),
                                awgn_detect(obs, p.sigma_good_sq, mod)),
                  1e-9);
    }
}

TEST(AwgnDetect, PlugInValue) {
    const std::vector<cdouble> y{{1, 0}};
    const Observation obs{y, {1, 0}, 1.0};
    const auto llr = demap_bits(awgn_detect(obs, 1.0, Modulation::bpsk()), Modulation::bpsk());
    EXPECT_NEAR(llr[0], 4.0, 1e-12);
    EXPECT_THROW(awgn_detect(obs, 0.0, Modulation::bpsk()), std::invalid_argument);
}

TEST(AwgnDetect, JointPhaseRotationKeepsLlrMagnitude) {
    RandomStream rng(14);
    const auto mod = Modulation::bpsk();
    const auto f = make_frame(NoiseParams{}, mod, 50, 1.0, rng);
    const cdouble rot = std::polar(1.0, 1.234);
    std::vector<cdouble> y2(f.y.size());
    for (std::size_t k = 0; k < y2.size(); ++k) y2[k] = f.y[k] * rot;
    const auto a = demap_bits(awgn_detect({f.y, f.link.h, 1.0}, 2.0, mod), mod);
    const auto b = demap_bits(awgn_detect({y2, f.link.h * rot, 1.0}, 2.0, mod), mod);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(std::abs(a[k]), std::abs(b[k]), 1e-9);
}

TEST(MemorylessDetect, ZeroObservationIsUninformative) {
    const std::vector<cdouble> y{{0, 0}};
    const auto mod = Modulation::bpsk();
    const auto llr = demap_bits(memoryless_detect({y, {0.7, 0}, 1.0}, NoiseParams{}, mod), mod);
    EXPECT_NEAR(llr[0], 0.0, 1e-15);
}

TEST(MapDetect, RowsNormalizedOnLongFrames) {
    RandomStream rng(15);
    const NoiseParams p{0.1, 100.0, 100.0, 1e-3};
    for (int order : {2, 4}) {
        const auto mod = Modulation::of_order(order);
        const auto f = make_frame(p, mod, 64'800 / mod.bits_per_symbol(), 1.0, rng);
        const auto post = map_detect({f.y, f.link.h, 1.0}, p, mod);
        for (std::size_t k = 0; k < post.size(); ++k) {
            double s = 0;
            for (int m = 0; m < order; ++m) s += post.prob(k, m);
            ASSERT_NEAR(s, 1.0, 1e-12);
        }
    }
}

TEST(MapDetect, NegatingObservationNegatesLlrs) {
    RandomStream rng(16);
    const auto mod = Modulation::bpsk();
    const NoiseParams p{0.2, 30.0, 50.0, 0.3};
    const auto f = make_frame(p, mod, 500, 1.0, rng);
    std::vector<cdouble> neg(f.y.size());
    for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -f.y[k];
    const auto a = demap_bits(map_detect({f.y, f.link.h, 1.0}, p, mod), mod);
    const auto b = demap_bits(map_detect({neg, f.link.h, 1.0}, p, mod), mod);
    for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a[k], -b[k]);
}

TEST(MapDetect, ForwardAndBackwardEvidenceAgree) {
    RandomStream rng(17);
    for (int i = 0; i < 100; ++i) {
        const auto p = random_params(rng);
        const auto mod = Modulation::of_order(i % 2 ? 4 : 2);
        const std::size_t k = i < 50 ? 1 + i % 10 : 2000;
        const auto f = make_frame(p, mod, k, 1.0, rng);
        const Observation obs{f.y, f.link.h, 1.0};
        TrellisWorkspace ws;
        map_detect(obs, p, mod, {}, &ws);
        const double fwd = ws.log_evidence_forward();
        const double bwd = ws.log_evidence_backward();
        ASSERT_NEAR(fwd, bwd, 1e-9 * std::max(1.0, std::abs(fwd)));
        if (k <= 10) {
            const double want = oracle::enumerate_log_evidence(obs, p, mod);
            ASSERT_NEAR(fwd, want, 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST(MapDetect, MemoryAddsInformation) {
    // Frame-average |LLR| of the MAP detector exceeds the memoryless one under
    // strongly correlated noise.
    RandomStream rng(18);
    const auto mod = Modulation::bpsk();
    const NoiseParams p{0.1, 100.0, 100.0, 0.1};
    double map_sum = 0, ml_sum = 0;
    for (int f = 0; f < 40; ++f) {
        const auto fr = make_frame(p, mod, 2000, 1.0, rng);
        const Observation obs{fr.y, fr.link.h, 1.0};
        for (double v : demap_bits(map_detect(obs, p, mod), mod)) map_sum += std::abs(v);
        for (double v : demap_bits(memoryless_detect(obs, p, mod), mod)) ml_sum += std::abs(v);
    }
    EXPECT_GT(map_sum, ml_sum);
}

TEST(MapDetect, SilentRowsStayUniform) {
    RandomStream rng(19);
    const auto mod = Modulation::qpsk();
    const auto f = make_frame(NoiseParams{}, mod, 20, 1.0, rng);
    std::vector<std::uint8_t> silent(20, 0);
    silent[3] = silent[10] = 1;
    DetectOptions opts;
    opts.silent = silent;
    const auto post = map_detect({f.y, f.link.h, 1.0}, NoiseParams{}, mod, opts);
    for (int m = 0; m < 4; ++m) {
        EXPECT_NEAR(post.prob(3, m), 0.25, 1e-15);
        EXPECT_NEAR(post.prob(10, m), 0.25, 1e-15);
    }
}

TEST(MapDetect, RejectsBadInput) {
    const auto mod = Modulation::bpsk();
    std::vector<cdouble> y{{1, 0}, {std::nan(""), 0}};
    EXPECT_THROW(map_detect({y, {1, 0}, 1.0}, NoiseParams{}, mod), std::invalid_argument);
    y[1] = {0.5, 0};
    NoiseParams bad;
    bad.p_bad = 2.0;
    EXPECT_THROW(map_detect({y, {1, 0}, 1.0}, bad, mod), std::invalid_argument);
    EXPECT_TRUE(map_detect({{}, {1, 0}, 1.0}, NoiseParams{}, mod).empty());
}

TEST(GenieDetect, UsesTrueStateVariance) {
    const std::vector<cdouble> y{{0.5, 0}, {0.5, 0}};
    const std::vector<NoiseState> states{NoiseState::Good, NoiseState::Bad};
    const NoiseParams p{0.1, 10.0, 100.0, 1.0};
    const auto mod = Modulation::bpsk();
    const auto llr = demap_bits(genie_detect({y, {1, 0}, 1.0}, states, p, mod), mod);
    EXPECT_NEAR(llr[0], 4 * 0.5 / 1.0, 1e-12);
    EXPECT_NEAR(llr[1], 4 * 0.5 / 100.0, 1e-12);
}
