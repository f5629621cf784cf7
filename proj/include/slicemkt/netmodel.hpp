#pragma once

#include <stdexcept>
#include <vector>

namespace slicemkt {

enum class ServiceClass { Embb, Urllc, Mmtc };

const char* to_string(ServiceClass c);

// Per-UE radio state. Shadow fading is an optional additive dB term on the
// path loss, zero unless the scenario enables it.
struct UeState {
  int ue_id = 0;
  int tenant_id = 0;
  double distance_m = 0.0;
  int prbs_assigned = 0;
  double arrival_rate_pps = 0.0;  // Poisson packet arrivals
  ServiceClass service_class = ServiceClass::Embb;
  double shadow_fading_db = 0.0;
};

struct RadioConfig {
  double system_bandwidth_hz = 20e6;
  int num_prbs = 100;
  double prb_bandwidth_hz = 200e3;
  double bs_power_dbm = 30.0;
  double noise_density_dbm_hz = -174.0;
  double carrier_freq_mhz = 2000.0;

  // Throws std::invalid_argument if quantities are non-positive or the PRB
  // grid does not tile the system bandwidth.
  void validate() const;
};

// Sigmoid QoS thresholds for one tenant. eta is the steepness in
// normalized units: the sigmoid argument is scaled by the threshold so eta
// is comparable across service classes.
struct TenantQos {
  double r_min_bps = 0.0;
  double tau_max_s = 0.0;
  double eta = 1.0;
};

// PL(dB) = 20 log10(d) + 20 log10(f) - 27.55, d in meters, f in MHz.
double path_loss_db(double distance_m, double freq_mhz);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

// Single-cell SNR: per-PRB share of BS power through the path loss over
// thermal noise in the allocated bandwidth. Requires prbs_assigned >= 1.
double sinr_linear(const RadioConfig& cfg, const UeState& ue);

// Shannon rate over the UE's allocated bandwidth.
double ue_rate_bps(const RadioConfig& cfg, const UeState& ue, double sinr);

// Sum of per-UE rates (the aggregate written as a sum in the model).
double tenant_rate_bps(const std::vector<double>& ue_rates);

// M/M/1 sojourn time 1/(r - lambda), both in packets/s. Returns +inf when
// the queue is unstable (r <= lambda); callers report it as unmet QoS.
double ue_delay_s(double service_rate_pps, double arrival_rate_pps);

// Sum of per-UE delays; +inf propagates.
double tenant_delay_s(const std::vector<double>& ue_delays);

// Rate satisfaction: sigmoid around r_min, 0.5 at the threshold.
double qos_rate(double r_bps, const TenantQos& q);

// Delay satisfaction: sigmoid around tau_max, decreasing in tau.
double qos_delay(double tau_s, const TenantQos& q);

}  // namespace slicemkt
