#include "slicemkt/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slicemkt {

namespace {

// Service classes cycle through the reference population: buyers first, so a
// 3-buyer/2-seller market has eMBB/eMBB/uRLLC buyers and uRLLC/mMTC sellers.
constexpr ServiceClass kClassPattern[5] = {ServiceClass::Embb, ServiceClass::Embb,
                                           ServiceClass::Urllc, ServiceClass::Urllc,
                                           ServiceClass::Mmtc};

double arrival_for(const ScenarioConfig& cfg, ServiceClass c) {
  switch (c) {
    case ServiceClass::Embb: return cfg.arrival_embb_pps;
    case ServiceClass::Urllc: return cfg.arrival_urllc_pps;
    case ServiceClass::Mmtc: return cfg.arrival_mmtc_pps;
  }
  return 0.0;
}

TenantQos qos_for(const ScenarioConfig& cfg, ServiceClass c) {
  TenantQos q;
  q.eta = cfg.qos_eta;
  switch (c) {
    case ServiceClass::Embb:
      q.r_min_bps = cfg.r_min_embb_bps;
      q.tau_max_s = 1.0;
      break;
    case ServiceClass::Urllc:
      q.r_min_bps = 1.0;
      q.tau_max_s = cfg.tau_max_urllc_s;
      break;
    case ServiceClass::Mmtc:
      q.r_min_bps = cfg.r_min_mmtc_bps;
      q.tau_max_s = 1.0;
      break;
  }
  return q;
}

int snap_index(double raw, int grid_size) {
  const double t = std::clamp((raw + 1.0) / 2.0, 0.0, 1.0);
  const int idx = static_cast<int>(std::lround(t * (grid_size - 1)));
  return std::clamp(idx, 0, grid_size - 1);
}

}  // namespace

MarketEnv::MarketEnv(const ScenarioConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  const int M = cfg_.num_sellers;
  const int N = cfg_.num_buyers;

  market_.mno_unit_price = cfg_.mno_unit_price;
  market_.price_grid = make_price_grid(cfg_.price_min, cfg_.price_max, cfg_.price_points);
  market_.qty_grid = make_qty_grid(cfg_.qty_max);
  market_.signaling_cost_coeff = cfg_.signaling_cost_coeff;
  market_.qos_value_coeff = cfg_.qos_value_coeff;
  market_.price_bandwidth_unit = 1.0;
  market_.validate();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rep_dist(cfg_.reputation_min,
                                                  cfg_.reputation_max);
  std::uniform_real_distribution<double> pos(0.0, cfg_.area_m);

  // Sellers split the PRB pool left after buyer base holdings; each may sell
  // half its holdings and keeps the rest as its own requirement.
  const int pool = cfg_.radio.num_prbs - N * cfg_.buyer_base_prbs;
  if (pool < M) throw std::invalid_argument("MarketEnv: no PRBs left for sellers");
  int remaining = pool;
  for (int m = 0; m < M; ++m) {
    TenantProfile t;
    t.tenant_id = N + m;  // buyers take ids 0..N-1
    t.role = Role::Seller;
    t.service_class = kClassPattern[(N + m) % 5];
    t.qos = qos_for(cfg_, t.service_class);
    t.reputation = rep_dist(rng);
    t.prbs_held = pool / M + (m < pool % M ? 1 : 0);
    t.prbs_max_sellable = t.prbs_held / 2;
    t.prbs_required = t.prbs_held - t.prbs_max_sellable;
    t.num_ues = cfg_.ues_per_tenant;
    t.validate();
    remaining -= t.prbs_held;
    sellers_.push_back(t);
  }
  if (remaining != 0) throw std::logic_error("MarketEnv: PRB pool mismatch");

  for (int n = 0; n < N; ++n) {
    TenantProfile t;
    t.tenant_id = n;
    t.role = Role::Buyer;
    t.service_class = kClassPattern[n % 5];
    t.qos = qos_for(cfg_, t.service_class);
    t.reputation = rep_dist(rng);
    t.prbs_held = cfg_.buyer_base_prbs;
    t.prbs_required = cfg_.buyer_required_prbs;
    t.num_ues = cfg_.ues_per_tenant;
    t.validate();
    buyers_.push_back(t);
  }

  // Per-buyer satisfaction tables over bought PRBs. The per-PRB transmit
  // power model makes a UE's SINR independent of its allocation, so the slice
  // rate is linear in PRBs and one spectral-efficiency sum per buyer suffices.
  xi_table_.assign(N, std::vector<double>(cfg_.qty_max + 1, 0.0));
  const double half = cfg_.area_m / 2.0;
  for (int n = 0; n < N; ++n) {
    const auto& t = buyers_[n];
    std::vector<double> se_bits_per_prb(t.num_ues);  // rate with one full PRB
    for (int u = 0; u < t.num_ues; ++u) {
      UeState ue;
      ue.ue_id = u;
      ue.tenant_id = t.tenant_id;
      const double dx = pos(rng) - half;
      const double dy = pos(rng) - half;
      ue.distance_m = std::max(1.0, std::hypot(dx, dy));
      ue.prbs_assigned = 1;
      ue.arrival_rate_pps = arrival_for(cfg_, t.service_class);
      ue.service_class = t.service_class;
      const double sinr = sinr_linear(cfg_.radio, ue);
      se_bits_per_prb[u] = ue_rate_bps(cfg_.radio, ue, sinr);
    }
    for (int h = 0; h <= cfg_.qty_max; ++h) {
      const double share =
          static_cast<double>(t.prbs_held + h) / static_cast<double>(t.num_ues);
      if (t.service_class == ServiceClass::Urllc) {
        std::vector<double> delays(t.num_ues);
        const double lambda = arrival_for(cfg_, t.service_class);
        for (int u = 0; u < t.num_ues; ++u) {
          const double service_pps =
              share * se_bits_per_prb[u] / cfg_.packet_size_bits;
          delays[u] = ue_delay_s(service_pps, lambda);
        }
        const double mean_delay = tenant_delay_s(delays) / t.num_ues;
        xi_table_[n][h] = qos_delay(mean_delay, t.qos);
      } else {
        std::vector<double> rates(t.num_ues);
        for (int u = 0; u < t.num_ues; ++u) rates[u] = share * se_bits_per_prb[u];
        const double mean_rate = tenant_rate_bps(rates) / t.num_ues;
        xi_table_[n][h] = qos_rate(mean_rate, t.qos);
      }
    }
  }

  // QoS value of h bought PRBs: the satisfaction gain over the base holding,
  // scaled by reputation and the market's value coefficient. Increasing and
  // satiating, so demand falls smoothly with the unit price.
  member_value_.assign(N, std::vector<double>(cfg_.qty_max + 1, 0.0));
  for (int n = 0; n < N; ++n)
    for (int h = 0; h <= cfg_.qty_max; ++h)
      member_value_[n][h] = buyers_[n].reputation * cfg_.qos_value_coeff *
                            (xi_table_[n][h] - xi_table_[n][0]);

  // Grid midpoints as the initial market state.
  const double mid_price = market_.price_grid[(market_.price_grid.size() - 1) / 2];
  const double mid_qty = market_.qty_grid[(market_.qty_grid.size() - 1) / 2];
  last_prices_.assign(M, mid_price);
  last_buyer_qty_.assign(N, mid_qty);
  last_seller_sold_.resize(M);
  for (int m = 0; m < M; ++m)
    last_seller_sold_[m] =
        std::min(mid_qty, static_cast<double>(sellers_[m].prbs_max_sellable));
}

double MarketEnv::buyer_satisfaction(int n, double extra_prbs) const {
  const auto& table = xi_table_.at(n);
  const double h = std::clamp(extra_prbs, 0.0, static_cast<double>(cfg_.qty_max));
  const int lo = static_cast<int>(std::floor(h));
  const int hi = std::min(lo + 1, cfg_.qty_max);
  const double frac = h - lo;
  return table[lo] * (1.0 - frac) + table[hi] * frac;
}

double MarketEnv::price_from_action(double raw) const {
  return market_.price_grid[snap_index(raw, static_cast<int>(market_.price_grid.size()))];
}

int MarketEnv::qty_from_action(double raw) const {
  return market_.qty_grid[snap_index(raw, static_cast<int>(market_.qty_grid.size()))];
}

const MarketEnv::AllocEntry& MarketEnv::best_allocation(
    const std::vector<int>& members) const {
  std::uint64_t mask = 0;
  for (int n : members) {
    if (n < 0 || n >= 64 || n >= num_buyers())
      throw std::domain_error("best_allocation: bad member id");
    mask |= std::uint64_t{1} << n;
  }
  auto it = alloc_cache_.find(mask);
  if (it != alloc_cache_.end()) return it->second;

  // Exact assignment of up to W bought PRBs across the members, maximizing
  // the summed QoS value; leftovers may stay idle. One DP per member set,
  // cached for the env lifetime (the value tables are static).
  const int W = cfg_.qty_max;
  const int K = static_cast<int>(members.size());
  std::vector<double> dp(W + 1, 0.0);
  std::vector<std::vector<int>> choice(K, std::vector<int>(W + 1, 0));
  for (int k = 0; k < K; ++k) {
    const auto& val = member_value_[members[k]];
    std::vector<double> next(W + 1, 0.0);
    for (int w = 0; w <= W; ++w) {
      double best = dp[w];
      int best_h = 0;
      for (int h = 1; h <= w; ++h) {
        const double c = dp[w - h] + val[h];
        if (c > best) {
          best = c;
          best_h = h;
        }
      }
      next[w] = best;
      choice[k][w] = best_h;
    }
    dp.swap(next);
  }

  AllocEntry entry;
  entry.value = std::move(dp);
  entry.alloc.assign(W + 1, std::vector<int>(K, 0));
  for (int w = 0; w <= W; ++w) {
    int rem = w;
    for (int k = K - 1; k >= 0; --k) {
      const int h = choice[k][rem];
      entry.alloc[w][k] = h;
      rem -= h;
    }
  }
  return alloc_cache_.emplace(mask, std::move(entry)).first->second;
}

std::vector<int> MarketEnv::member_allocation(const std::vector<int>& members,
                                              int total_qty) const {
  if (members.empty())
    throw std::domain_error("member_allocation: empty coalition");
  const int w = std::clamp(total_qty, 0, cfg_.qty_max);
  return best_allocation(members).alloc[w];
}

double MarketEnv::coalition_trade_utility(const std::vector<int>& members,
                                          double price, double total_qty) const {
  if (members.empty())
    throw std::domain_error("coalition_trade_utility: empty coalition");
  const int w =
      std::clamp(static_cast<int>(std::lround(total_qty)), 0, cfg_.qty_max);
  const auto& alloc = best_allocation(members).alloc[w];
  std::vector<MemberContribution> contribs;
  contribs.reserve(members.size());
  for (size_t i = 0; i < members.size(); ++i) {
    const int n = members[i];
    const int h = alloc[i];
    // QoS-customized purchasing amount: satisfaction gain times the value
    // coefficient, weighted by reputation inside coalition_value.
    contribs.push_back({buyer_reputation(n),
                        cfg_.qos_value_coeff *
                            (xi_table_[n][h] - xi_table_[n][0])});
  }
  return coalition_utility(contribs, price, w, market_,
                           market_.price_bandwidth_unit);
}

double MarketEnv::formation_value(const std::vector<int>& members,
                                  double reference_price) const {
  double rep_all = 0.0;
  for (const auto& b : buyers_) rep_all += b.reputation;
  double rep_z = 0.0;
  for (int n : members) rep_z += buyer_reputation(n);
  const double share = rep_all > 0.0 ? rep_z / rep_all
                                     : static_cast<double>(members.size()) /
                                           static_cast<double>(buyers_.size());
  // A coalition trades with a single seller, so its best case is bounded by
  // the largest sellable cap in the market.
  int cap = 0;
  for (const auto& s : sellers_) cap = std::max(cap, s.prbs_max_sellable);
  double best = coalition_trade_utility(members, reference_price, 0.0);
  for (int w : market_.qty_grid) {
    if (w > cap) break;
    best = std::max(best, coalition_trade_utility(members, reference_price, w));
  }
  return share * best;
}

CoalitionPartition MarketEnv::form_partition(double reference_price,
                                             MarketMode mode) const {
  std::vector<int> ids(buyers_.size());
  std::iota(ids.begin(), ids.end(), 0);
  auto rep_fn = [this](int n) { return buyer_reputation(n); };
  auto value_fn = [this, reference_price](const std::vector<int>& z) {
    return formation_value(z, reference_price);
  };
  if (mode == MarketMode::Singleton) return init_partition(ids, value_fn, rep_fn);
  return form_coalitions(ids, value_fn, rep_fn);
}

std::vector<int> MarketEnv::match_coalitions(const CoalitionPartition& p,
                                             const std::vector<double>& prices) const {
  // Coalitions ranked by summed reputation (the winner-selection order);
  // sellers ranked by posted price, cheapest first. The k-th coalition trades
  // with the (k mod M)-th cheapest seller, so every coalition has a
  // counterparty even when coalitions outnumber sellers; a seller's sellable
  // cap is then shared across its matched coalitions in rank order.
  std::vector<int> coal_order(p.coalitions.size());
  std::iota(coal_order.begin(), coal_order.end(), 0);
  std::stable_sort(coal_order.begin(), coal_order.end(), [&](int a, int b) {
    return p.coalitions[a].reputation > p.coalitions[b].reputation;
  });
  std::vector<int> seller_order(sellers_.size());
  std::iota(seller_order.begin(), seller_order.end(), 0);
  std::stable_sort(seller_order.begin(), seller_order.end(),
                   [&](int a, int b) { return prices[a] < prices[b]; });

  std::vector<int> match(p.coalitions.size(), -1);
  for (size_t k = 0; k < coal_order.size(); ++k)
    match[coal_order[k]] = seller_order[k % seller_order.size()];
  return match;
}

StepResult MarketEnv::step(const std::vector<double>& seller_actions_raw,
                           const std::vector<double>& buyer_actions_raw,
                           MarketMode mode) {
  const int M = num_sellers();
  const int N = num_buyers();
  if (static_cast<int>(seller_actions_raw.size()) != M ||
      static_cast<int>(buyer_actions_raw.size()) != N)
    throw std::invalid_argument("MarketEnv::step: action size mismatch");

  StepResult out;
  out.prices.resize(M);
  for (int m = 0; m < M; ++m) out.prices[m] = price_from_action(seller_actions_raw[m]);

  const double ref_price =
      std::accumulate(out.prices.begin(), out.prices.end(), 0.0) / M;
  out.partition = form_partition(ref_price, mode);
  out.coalition_seller = match_coalitions(out.partition, out.prices);

  const size_t Z = out.partition.coalitions.size();
  out.coalition_qty.assign(Z, 0);
  out.coalition_utilities.assign(Z, 0.0);
  out.buyer_qty.assign(N, 0.0);
  out.buyer_rewards.assign(N, 0.0);
  std::vector<double> sold(M, 0.0);
  std::vector<int> cap_left(M);
  for (int m = 0; m < M; ++m) cap_left[m] = sellers_[m].prbs_max_sellable;

  // Process coalitions in reputation rank order so that when several
  // coalitions share a seller, the higher-ranked one consumes the cap first.
  std::vector<int> trade_order(Z);
  std::iota(trade_order.begin(), trade_order.end(), 0);
  std::stable_sort(trade_order.begin(), trade_order.end(), [&](int a, int b) {
    return out.partition.coalitions[a].reputation >
           out.partition.coalitions[b].reputation;
  });

  for (int zi : trade_order) {
    const size_t z = static_cast<size_t>(zi);
    const auto& members = out.partition.coalitions[z].members;
    const int m = out.coalition_seller[z];
    int qty = 0;
    if (m >= 0) {
      // Reputation-weighted aggregation of the members' raw actions.
      double rep_sum = 0.0, agg = 0.0;
      for (int n : members) {
        rep_sum += buyer_reputation(n);
        agg += buyer_reputation(n) * buyer_actions_raw[n];
      }
      agg = rep_sum > 0.0 ? agg / rep_sum : 0.0;
      qty = qty_from_action(agg);
      const int cap = cap_left[m];
      if (qty > cap) {
        qty = cap;
        ++out.clip_violations;
      }
      sold[m] += qty;
      cap_left[m] -= qty;
    }
    out.coalition_qty[z] = qty;
    const double price = m >= 0 ? out.prices[m] : 0.0;
    out.coalition_utilities[z] =
        coalition_trade_utility(members, price, qty);

    // Proportional payoff split by Omega_n * w_n of the realized assignment.
    const std::vector<int> alloc = member_allocation(members, qty);
    auto contrib_fn = [&](int n) {
      for (size_t i = 0; i < members.size(); ++i)
        if (members[i] == n) return buyer_reputation(n) * alloc[i];
      return 0.0;
    };
    const auto split = split_payoff(members, out.coalition_utilities[z], contrib_fn);
    for (size_t i = 0; i < members.size(); ++i) {
      out.buyer_rewards[members[i]] = split[i];
      out.buyer_qty[members[i]] = alloc[i];
    }
  }

  // Sellers are rewarded on the previous slot's realized sales at today's
  // margin: r_m = U_m(w^{t-1}, delta^t).
  out.seller_rewards.resize(M);
  for (int m = 0; m < M; ++m)
    out.seller_rewards[m] =
        seller_utility(out.prices[m], market_.mno_unit_price, last_seller_sold_[m],
                       market_.price_bandwidth_unit);

  out.system_utility =
      std::accumulate(out.seller_rewards.begin(), out.seller_rewards.end(), 0.0) +
      std::accumulate(out.buyer_rewards.begin(), out.buyer_rewards.end(), 0.0);

  last_prices_ = out.prices;
  last_buyer_qty_ = out.buyer_qty;
  last_seller_sold_ = sold;
  return out;
}

StackelbergGame MarketEnv::build_game(MarketMode mode) const {
  // Static oracle view: partition formed at the mid price; the k-th coalition
  // by reputation rank trades with seller k (matching is fixed up front, so
  // the game structure does not depend on the leaders' choices). Coalitions
  // beyond the seller count are dropped here: the brute-force solver needs
  // independent follower problems, and cap sharing across followers would
  // couple them. The SE reference is therefore exact only when coalitions
  // do not outnumber sellers (true for every configuration it gates on).
  const double mid_price = market_.price_grid[(market_.price_grid.size() - 1) / 2];
  CoalitionPartition p = form_partition(mid_price, mode);

  std::vector<int> coal_order(p.coalitions.size());
  std::iota(coal_order.begin(), coal_order.end(), 0);
  std::stable_sort(coal_order.begin(), coal_order.end(), [&](int a, int b) {
    return p.coalitions[a].reputation > p.coalitions[b].reputation;
  });

  StackelbergGame g;
  g.mno_price = market_.mno_unit_price;
  g.leader_price_grids.assign(sellers_.size(), market_.price_grid);
  g.leader_caps.resize(sellers_.size());
  for (size_t m = 0; m < sellers_.size(); ++m)
    g.leader_caps[m] = sellers_[m].prbs_max_sellable;

  std::vector<std::vector<int>> follower_members;
  const size_t pairs = std::min(coal_order.size(), sellers_.size());
  for (size_t k = 0; k < pairs; ++k) {
    const int m = static_cast<int>(k);
    g.follower_match.push_back(m);
    std::vector<int> grid;
    for (int q : market_.qty_grid)
      if (q <= g.leader_caps[m]) grid.push_back(q);
    g.follower_qty_grids.push_back(std::move(grid));
    follower_members.push_back(p.coalitions[coal_order[k]].members);
  }

  const MarketParams params = market_;
  g.follower_utility = [this, follower_members](int f, double price, int w) {
    return coalition_trade_utility(follower_members[f], price, w);
  };
  g.leader_utility = [params](int, double price, int w) {
    return seller_utility(price, params.mno_unit_price, w,
                          params.price_bandwidth_unit);
  };
  g.validate();
  return g;
}

}  // namespace slicemkt
