#pragma once

#include "slapx/dbp/dbp.hpp"

namespace slapx::protocol {

/// Log-distance path loss: rss(d) = tx - ref_loss - 10 n log10(d) + X_sigma.
struct RadioEnv {
    double tx_power_dbm = 30.0;
    double ref_loss_db = 40.0;  // at 1 m
    double path_loss_exponent = 2.7;
    double shadowing_sigma_db = 3.0;
    double propagation_speed = dbp::kSpeedOfLight;

    /// Mean received power at distance d (d = 0 gives +inf).
    double mean_rss(double d_m) const;
    double distance_from_rss(double rss_dbm) const;
    double rtt_for(double d_m) const { return 2.0 * d_m / propagation_speed; }
};

struct ProxEstimate {
    double d_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double d_rss = 0.0;
    double d_rtt = 0.0;
    double w = 0.0;
};

/// d_hat = w * d_rtt + (1 - w) * d_rss. The interval covers 95% of shadowing on the RSS term.
/// Throws std::invalid_argument if rtt < 0 or w is outside [0, 1].
ProxEstimate prox_verify(double rss_dbm, double rtt_s, const RadioEnv& env, double w);

/// Gate used by the AP: d_hat within th (with a 1e-9 m rounding allowance).
bool within_proximity(const ProxEstimate& e, double th_m);

/// What the AP's radio observed for one request.
struct Measurement {
    double rss_dbm = 0.0;
    double rtt_s = 0.0;
};

/// Noiseless measurement of a device at distance d.
Measurement measure(const RadioEnv& env, double d_m);

}  // namespace slapx::protocol
