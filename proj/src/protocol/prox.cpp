#include "slapx/protocol/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace slapx::protocol {

double RadioEnv::mean_rss(double d_m) const {
    return tx_power_dbm - ref_loss_db - 10.0 * path_loss_exponent * std::log10(d_m);
}

double RadioEnv::distance_from_rss(double rss_dbm) const {
    return std::pow(10.0, (tx_power_dbm - ref_loss_db - rss_dbm) / (10.0 * path_loss_exponent));
}

ProxEstimate prox_verify(double rss_dbm, double rtt_s, const RadioEnv& env, double w) {
    if (!(rtt_s >= 0.0)) throw std::invalid_argument("prox_verify: negative rtt");
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("prox_verify: weight outside [0, 1]");
    ProxEstimate e;
    e.w = w;
    e.d_rtt = env.propagation_speed * rtt_s / 2.0;
    e.d_rss = env.distance_from_rss(rss_dbm);
    e.d_hat = w * e.d_rtt + (1.0 - w) * e.d_rss;
    const double spread = std::pow(10.0, 1.96 * env.shadowing_sigma_db / (10.0 * env.path_loss_exponent));
    e.ci_low = w * e.d_rtt + (1.0 - w) * e.d_rss / spread;
    e.ci_high = w * e.d_rtt + (1.0 - w) * e.d_rss * spread;
    return e;
}

bool within_proximity(const ProxEstimate& e, double th_m) { return e.d_hat <= th_m + 1e-9; }

Measurement measure(const RadioEnv& env, double d_m) { return {env.mean_rss(d_m), env.rtt_for(d_m)}; }

}  // namespace slapx::protocol
