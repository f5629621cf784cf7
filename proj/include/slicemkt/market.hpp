#pragma once

#include <vector>

#include "slicemkt/netmodel.hpp"

namespace slicemkt {

enum class Role { Seller, Buyer };

struct TenantProfile {
  int tenant_id = 0;
  Role role = Role::Buyer;
  ServiceClass service_class = ServiceClass::Embb;
  TenantQos qos;
  double reputation = 0.0;  // Omega_n in [0,1]
  int prbs_held = 0;
  int prbs_required = 0;      // w^req
  int prbs_max_sellable = 0;  // w^max, sellers only
  int num_ues = 0;

  void validate() const;
};

struct MarketParams {
  double mno_unit_price = 1.0;          // delta_i, $/Hz
  std::vector<double> price_grid;       // A_m mapped onto currency values
  std::vector<int> qty_grid;            // A_zn, PRB counts
  double signaling_cost_coeff = 0.05;   // C_sig = coeff * |z|^2
  // Currency value of one reputation-weighted, fully-unsatisfied PRB. Scales
  // the QoS-driven side of the coalition value so it is commensurate with the
  // price range.
  double qos_value_coeff = 6.0;
  // Hz-equivalent of one traded PRB in the money terms. Prices are quoted per
  // unit of this bandwidth, so the default of 1 makes prices per-PRB
  // numerically equal to per-unit prices.
  double price_bandwidth_unit = 1.0;
  // If set, seller revenue is additionally weighted by the buyer's QoS
  // satisfaction (the alternative reading of the utility's "(.)" argument).
  bool qos_weighted_revenue = false;

  void validate() const;
};

// Builds the default discrete action sets: 100 price points spanning
// [price_min, price_max] and quantity counts {1..qty_max}.
std::vector<double> make_price_grid(double price_min, double price_max, int points);
std::vector<int> make_qty_grid(int qty_max);

// QoS-driven demand: shortfall scaled by unmet satisfaction and price
// attenuation, snapped to the nearest grid point. Non-increasing in both
// price and satisfaction.
int demand_quantity(double qos_satisfaction, double unit_price,
                    const std::vector<int>& qty_grid, double base_shortfall,
                    double max_price);

// U_m = (delta_m - delta_i) * qty * b. Negative margins are legal.
double seller_utility(double price, double mno_price, double qty,
                      double prb_bandwidth);

struct MemberContribution {
  double reputation = 0.0;
  double qty = 0.0;
};

// v(z) = sum Omega_n * w_n.
double coalition_value(const std::vector<MemberContribution>& members);

// C_sig = coeff * |z|^2.
double signaling_cost(int num_members, double coeff);

// U_z = v(z) - (delta_m * qty * b + C_sig).
double coalition_utility(const std::vector<MemberContribution>& members,
                         double seller_price, double total_qty,
                         const MarketParams& params, double prb_bandwidth);

double summed_reputation(const std::vector<MemberContribution>& members);

}  // namespace slicemkt
