#include "slicemkt/market.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace slicemkt {

void TenantProfile::validate() const {
  if (reputation < 0.0 || reputation > 1.0)
    throw std::invalid_argument("TenantProfile: reputation outside [0,1]");
  if (prbs_held < 0 || prbs_required < 0 || num_ues < 0)
    throw std::invalid_argument("TenantProfile: negative PRB or UE count");
  if (role == Role::Seller) {
    if (prbs_max_sellable < 0)
      throw std::invalid_argument("TenantProfile: negative sellable cap");
    if (prbs_held - prbs_max_sellable < prbs_required)
      throw std::invalid_argument(
          "TenantProfile: seller cannot cover its own requirement after selling the cap");
  }
}

void MarketParams::validate() const {
  if (price_grid.empty() || qty_grid.empty())
    throw std::invalid_argument("MarketParams: empty action grid");
  if (std::adjacent_find(price_grid.begin(), price_grid.end(),
                         [](double a, double b) { return a >= b; }) != price_grid.end())
    throw std::invalid_argument("MarketParams: price grid not strictly increasing");
  if (std::adjacent_find(qty_grid.begin(), qty_grid.end(),
                         [](int a, int b) { return a >= b; }) != qty_grid.end())
    throw std::invalid_argument("MarketParams: qty grid not strictly increasing");
  if (mno_unit_price <= 0)
    throw std::invalid_argument("MarketParams: MNO price must be positive");
  if (signaling_cost_coeff < 0 || qos_value_coeff < 0 || price_bandwidth_unit <= 0)
    throw std::invalid_argument("MarketParams: negative cost/value coefficient");
}

std::vector<double> make_price_grid(double price_min, double price_max, int points) {
  if (points < 1 || price_max < price_min)
    throw std::invalid_argument("make_price_grid: bad range");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = points == 1 ? price_min
                       : price_min + (price_max - price_min) * i / (points - 1);
  return g;
}

std::vector<int> make_qty_grid(int qty_max) {
  if (qty_max < 1) throw std::invalid_argument("make_qty_grid: bad max");
  std::vector<int> g(qty_max);
  for (int i = 0; i < qty_max; ++i) g[i] = i + 1;
  return g;
}

int demand_quantity(double qos_satisfaction, double unit_price,
                    const std::vector<int>& qty_grid, double base_shortfall,
                    double max_price) {
  if (unit_price <= 0) throw std::domain_error("demand_quantity: non-positive price");
  if (qty_grid.empty()) throw std::domain_error("demand_quantity: empty grid");
  const double xi = std::clamp(qos_satisfaction, 0.0, 1.0);
  const double w = base_shortfall * (1.0 - xi) * (max_price / unit_price);
  // Snap to the nearest grid point; clamping handles both extremes.
  int best = qty_grid.front();
  double best_err = std::abs(w - best);
  for (int q : qty_grid) {
    const double err = std::abs(w - q);
    if (err < best_err) {
      best = q;
      best_err = err;
    }
  }
  return best;
}

double seller_utility(double price, double mno_price, double qty,
                      double prb_bandwidth) {
  if (qty < 0) throw std::domain_error("seller_utility: negative quantity");
  return (price - mno_price) * qty * prb_bandwidth;
}

double coalition_value(const std::vector<MemberContribution>& members) {
  if (members.empty()) throw std::domain_error("coalition_value: empty coalition");
  double v = 0.0;
  for (const auto& m : members) v += m.reputation * m.qty;
  return v;
}

double signaling_cost(int num_members, double coeff) {
  if (num_members < 1) throw std::domain_error("signaling_cost: empty coalition");
  return coeff * static_cast<double>(num_members) * num_members;
}

double coalition_utility(const std::vector<MemberContribution>& members,
                         double seller_price, double total_qty,
                         const MarketParams& params, double prb_bandwidth) {
  if (total_qty < 0) throw std::domain_error("coalition_utility: negative quantity");
  const double v = coalition_value(members);
  const double trade_cost = seller_price * total_qty * prb_bandwidth;
  const double sig =
      signaling_cost(static_cast<int>(members.size()), params.signaling_cost_coeff);
  return v - (trade_cost + sig);
}

double summed_reputation(const std::vector<MemberContribution>& members) {
  double s = 0.0;
  for (const auto& m : members) s += m.reputation;
  return s;
}

}  // namespace slicemkt
