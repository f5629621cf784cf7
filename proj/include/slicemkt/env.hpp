#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "slicemkt/coalition.hpp"
#include "slicemkt/config.hpp"
#include "slicemkt/market.hpp"
#include "slicemkt/stackelberg.hpp"

namespace slicemkt {

// Whether buyers bargain through formed coalitions or act individually.
enum class MarketMode { Coalition, Singleton };

struct StepResult {
  std::vector<double> prices;              // currency, per seller
  std::vector<double> buyer_qty;           // PRBs bought, per buyer (share)
  std::vector<int> coalition_qty;          // per coalition, 0 when unmatched
  std::vector<int> coalition_seller;       // matched seller index or -1
  CoalitionPartition partition;
  std::vector<double> seller_rewards;      // U_m(w^{t-1}, delta^t)
  std::vector<double> coalition_utilities; // U_z(w^t, delta^t)
  std::vector<double> buyer_rewards;       // proportional split of the above
  double system_utility = 0.0;             // sum of all logged rewards
  int clip_violations = 0;                 // quantities clipped to seller caps
};

// Single-cell market simulator. Tenants, UE geometry and reputations are
// fixed at reset from the seed; each step is one trading slot.
class MarketEnv {
 public:
  MarketEnv(const ScenarioConfig& cfg, std::uint64_t seed);

  int num_sellers() const { return static_cast<int>(sellers_.size()); }
  int num_buyers() const { return static_cast<int>(buyers_.size()); }
  const ScenarioConfig& config() const { return cfg_; }
  const MarketParams& market() const { return market_; }
  const TenantProfile& seller(int m) const { return sellers_.at(m); }
  const TenantProfile& buyer(int n) const { return buyers_.at(n); }

  // QoS satisfaction of buyer n holding `extra_prbs` bought PRBs on top of
  // its base (linear interpolation between precomputed integer points).
  double buyer_satisfaction(int n, double extra_prbs) const;

  // Action decoding: raw in [-1, 1] snapped to the grids.
  double price_from_action(double raw) const;
  int qty_from_action(double raw) const;

  // Quantities of the previous slot, one per buyer (the seller-side state).
  const std::vector<double>& last_buyer_qty() const { return last_buyer_qty_; }
  const std::vector<double>& last_prices() const { return last_prices_; }

  // One trading slot. Coalition mode re-forms the partition; Singleton mode
  // keeps every buyer alone. Buyer raw actions aggregate into a coalition
  // quantity by reputation weights.
  StepResult step(const std::vector<double>& seller_actions_raw,
                  const std::vector<double>& buyer_actions_raw, MarketMode mode);

  // Coalition benefit at a total quantity, priced at `price`:
  // B_z(w) - price * w * b - C_sig(|z|). The coalition assigns the bought
  // PRBs to its members to maximize the summed QoS value (exact DP over the
  // static satisfaction tables). Used for trading, formation and the oracle.
  double coalition_trade_utility(const std::vector<int>& members, double price,
                                 double total_qty) const;

  // The optimizing internal assignment behind coalition_trade_utility, one
  // entry per member (same order), summing to at most total_qty.
  std::vector<int> member_allocation(const std::vector<int>& members,
                                     int total_qty) const;

  // Formation value: reputation share of the market times the best-case
  // surplus at the reference price (superadditive through pooled reputation).
  double formation_value(const std::vector<int>& members,
                         double reference_price) const;

  CoalitionPartition form_partition(double reference_price, MarketMode mode) const;

  // Exact-oracle view of the current market for a fixed partition and the
  // deterministic reputation/price matching rule.
  StackelbergGame build_game(MarketMode mode) const;

 private:
  ScenarioConfig cfg_;
  MarketParams market_;
  std::vector<TenantProfile> sellers_;
  std::vector<TenantProfile> buyers_;
  std::vector<std::vector<double>> xi_table_;  // [buyer][extra prbs 0..qty_max]
  // Omega_n * kappa * (xi_n(h) - xi_n(0)) at integer h, the QoS value a
  // buyer extracts from h assigned PRBs.
  std::vector<std::vector<double>> member_value_;
  std::vector<double> last_prices_;
  std::vector<double> last_buyer_qty_;
  std::vector<double> last_seller_sold_;

  struct AllocEntry {
    std::vector<double> value;            // [total qty] best summed QoS value
    std::vector<std::vector<int>> alloc;  // [total qty][member] assigned PRBs
  };
  mutable std::unordered_map<std::uint64_t, AllocEntry> alloc_cache_;
  const AllocEntry& best_allocation(const std::vector<int>& members) const;

  double buyer_reputation(int n) const { return buyers_.at(n).reputation; }
  std::vector<int> match_coalitions(const CoalitionPartition& p,
                                    const std::vector<double>& prices) const;
};

}  // namespace slicemkt
