#pragma once

#include "relaysim/channel.hpp"
#include "relaysim/noise.hpp"

namespace relaysim::analytic {

/// Average per-state SNRs of one Rayleigh link: gbar_u = P Omega / (R^u sigma_G^2).
struct LinkSnrProfile {
    double gbar_good = 1.0;
    double gbar_bad = 1.0;
    double p_good = 1.0;
    double p_bad = 0.0;

    static LinkSnrProfile make(double power, const LinkGeometry& geom, const NoiseParams& noise);

    double gbar(int u) const { return u == 0 ? gbar_good : gbar_bad; }
    double weight(int u) const { return u == 0 ? p_good : p_bad; }
    /// Both average SNRs multiplied by `factor`.
    LinkSnrProfile scaled(double factor) const;
    void validate() const;
};

struct CoopProfiles {
    LinkSnrProfile sd;
    LinkSnrProfile sm;
    LinkSnrProfile md;
};

/// 1 - sqrt(g / (1 + g)).
double psi(double gbar);

/// Scaled complementary error function e^{x^2} erfc(x), x >= 0.
double erfcx(double x);

/// State-averaged M-PSK symbol error rate over Rayleigh fading, closed form.
double dt_ser_mpsk(const LinkSnrProfile& profile, int order);

/// BPSK bit error rate, p_G psi(gbar_G)/2 + p_B psi(gbar_B)/2.
double dt_ber_bpsk(const LinkSnrProfile& profile);

/// Bit error rate for M in {2, 4}. Gray QPSK carries two BPSK bits at half
/// the symbol SNR each, so M = 4 is the BPSK result at gbar / 2 (exact).
double dt_ber(const LinkSnrProfile& profile, int order);

/// Symbol error rate at the relay (same closed form on the sm profile).
double relay_ser(const LinkSnrProfile& sm, int order);

/// Two-branch MRC bit error rate (BPSK, i.n.d. Rayleigh) averaged over the
/// four state pairs; no error propagated by the relay.
double smd_ber_ner(const LinkSnrProfile& sd, const LinkSnrProfile& md);

/// Destination error probability when the relay forwarded a wrong symbol:
/// sum_{u,v} w_u w_v C gbar_v^md / (C gbar_v^md + gbar_u^sd). C = 1 for BPSK;
/// for higher orders it is a caller-supplied constant.
double smd_ber_er(const LinkSnrProfile& sd, const LinkSnrProfile& md, double c_zm = 1.0);

/// Simple relaying: P_m P^er + (1 - P_m) P^ner. Bit error rate, M in {2, 4}.
double sr_ber(const CoopProfiles& p, int order);

/// Genie selective relaying lower bound: P_m P_DT + (1 - P_m) P^ner.
double sdfr_ber_lower(const CoopProfiles& p, int order);

/// Probability that the good-state relay SNR exceeds `gamma_t`.
double forward_probability(const LinkSnrProfile& sm, double gamma_t);

/// Relay BPSK bit error rate given that its good-state SNR exceeds gamma_t.
/// The same event is gamma_B > gamma_t / R in the bad state, so each state
/// term uses the threshold expressed in its own SNR.
double relay_ber_given_threshold(const LinkSnrProfile& sm, double gamma_t);

/// Relay symbol error rate under the same condition, by quadrature.
double relay_ser_given_threshold(const LinkSnrProfile& sm, double gamma_t, int order);

/// Threshold-based selective relaying (no relay-error knowledge at the
/// destination). `gamma_t` is a linear good-state SNR threshold.
double sdfr_ber_threshold(const CoopProfiles& p, double gamma_t, int order);

} // namespace relaysim::analytic
