#include "slicemkt/netmodel.hpp"

#include <cmath>
#include <limits>

namespace slicemkt {

const char* to_string(ServiceClass c) {
  switch (c) {
    case ServiceClass::Embb: return "eMBB";
    case ServiceClass::Urllc: return "uRLLC";
    case ServiceClass::Mmtc: return "mMTC";
  }
  return "?";
}

void RadioConfig::validate() const {
  if (system_bandwidth_hz <= 0 || prb_bandwidth_hz <= 0 || num_prbs <= 0)
    throw std::invalid_argument("RadioConfig: bandwidth and PRB count must be positive");
  if (!(std::isfinite(system_bandwidth_hz) && std::isfinite(prb_bandwidth_hz) &&
        std::isfinite(bs_power_dbm) && std::isfinite(noise_density_dbm_hz) &&
        std::isfinite(carrier_freq_mhz)))
    throw std::invalid_argument("RadioConfig: non-finite parameter");
  if (carrier_freq_mhz <= 0)
    throw std::invalid_argument("RadioConfig: carrier frequency must be positive");
  const double tiled = num_prbs * prb_bandwidth_hz;
  if (std::abs(tiled - system_bandwidth_hz) > 1e-6 * system_bandwidth_hz)
    throw std::invalid_argument("RadioConfig: num_prbs * prb_bandwidth_hz != system_bandwidth_hz");
}

double path_loss_db(double distance_m, double freq_mhz) {
  if (distance_m <= 0 || freq_mhz <= 0)
    throw std::domain_error("path_loss_db: distance and frequency must be positive");
  return 20.0 * std::log10(distance_m) + 20.0 * std::log10(freq_mhz) - 27.55;
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double mw_to_dbm(double mw) {
  if (mw <= 0) throw std::domain_error("mw_to_dbm: power must be positive");
  return 10.0 * std::log10(mw);
}

double sinr_linear(const RadioConfig& cfg, const UeState& ue) {
  if (ue.prbs_assigned < 1)
    throw std::invalid_argument("sinr_linear: UE holds no PRBs");
  const double pl_db =
      path_loss_db(ue.distance_m, cfg.carrier_freq_mhz) + ue.shadow_fading_db;
  const double tx_mw =
      dbm_to_mw(cfg.bs_power_dbm) / cfg.num_prbs * ue.prbs_assigned;
  const double rx_mw = tx_mw / std::pow(10.0, pl_db / 10.0);
  const double noise_mw =
      dbm_to_mw(cfg.noise_density_dbm_hz) * (ue.prbs_assigned * cfg.prb_bandwidth_hz);
  return rx_mw / noise_mw;
}

double ue_rate_bps(const RadioConfig& cfg, const UeState& ue, double sinr) {
  if (sinr < 0) throw std::domain_error("ue_rate_bps: negative SINR");
  return ue.prbs_assigned * cfg.prb_bandwidth_hz * std::log2(1.0 + sinr);
}

double tenant_rate_bps(const std::vector<double>& ue_rates) {
  if (ue_rates.empty()) throw std::domain_error("tenant_rate_bps: empty UE list");
  double sum = 0.0;
  for (double r : ue_rates) sum += r;
  return sum;
}

double ue_delay_s(double service_rate_pps, double arrival_rate_pps) {
  if (service_rate_pps <= arrival_rate_pps)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (service_rate_pps - arrival_rate_pps);
}

double tenant_delay_s(const std::vector<double>& ue_delays) {
  if (ue_delays.empty()) throw std::domain_error("tenant_delay_s: empty UE list");
  double sum = 0.0;
  for (double d : ue_delays) sum += d;
  return sum;
}

double qos_rate(double r_bps, const TenantQos& q) {
  // Argument normalized by r_min so eta is unit-free.
  const double z = q.eta * (r_bps - q.r_min_bps) / q.r_min_bps;
  return 1.0 / (1.0 + std::exp(-z));
}

double qos_delay(double tau_s, const TenantQos& q) {
  const double z = q.eta * (q.tau_max_s - tau_s) / q.tau_max_s;
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace slicemkt
