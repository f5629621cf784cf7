#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "slicemkt/env.hpp"
#include "slicemkt/market.hpp"

using namespace slicemkt;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig s;
  s.ues_per_tenant = 10;  // keep the satisfaction tables cheap
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("env");

TEST_CASE("construction conserves the PRB pool") {
  const ScenarioConfig s = small_config();
  MarketEnv env(s, 7);
  REQUIRE(env.num_sellers() == s.num_sellers);
  REQUIRE(env.num_buyers() == s.num_buyers);
  int held = s.num_buyers * s.buyer_base_prbs;
  for (int m = 0; m < env.num_sellers(); ++m) {
    const auto& t = env.seller(m);
    held += t.prbs_held;
    CHECK(t.prbs_max_sellable == t.prbs_held / 2);
    CHECK(t.prbs_required + t.prbs_max_sellable == t.prbs_held);
  }
  CHECK(held == s.radio.num_prbs);
  for (int n = 0; n < env.num_buyers(); ++n) {
    CHECK(env.buyer(n).reputation >= s.reputation_min);
    CHECK(env.buyer(n).reputation <= s.reputation_max);
  }
}

TEST_CASE("tenant draws are deterministic in the seed") {
  const ScenarioConfig s = small_config();
  MarketEnv a(s, 11), b(s, 11), c(s, 12);
  bool all_equal = true, any_diff = false;
  for (int n = 0; n < a.num_buyers(); ++n) {
    all_equal &= a.buyer(n).reputation == b.buyer(n).reputation;
    any_diff |= a.buyer(n).reputation != c.buyer(n).reputation;
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("satisfaction is a monotone [0,1] interpolation") {
  MarketEnv env(small_config(), 3);
  for (int n = 0; n < env.num_buyers(); ++n) {
    double prev = -1.0;
    for (int h = 0; h <= env.config().qty_max; ++h) {
      const double xi = env.buyer_satisfaction(n, h);
      CHECK(xi >= 0.0);
      CHECK(xi <= 1.0);
      CHECK(xi >= prev);
      prev = xi;
    }
    const double mid = env.buyer_satisfaction(n, 4.5);
    const double expect =
        0.5 * (env.buyer_satisfaction(n, 4) + env.buyer_satisfaction(n, 5));
    CHECK(mid == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("action decoding snaps to the grid ends") {
  MarketEnv env(small_config(), 3);
  const auto& s = env.config();
  CHECK(env.price_from_action(-1.0) == doctest::Approx(s.price_min));
  CHECK(env.price_from_action(1.0) == doctest::Approx(s.price_max));
  CHECK(env.price_from_action(-5.0) == doctest::Approx(s.price_min));
  CHECK(env.qty_from_action(-1.0) == 1);
  CHECK(env.qty_from_action(1.0) == s.qty_max);
  CHECK(env.qty_from_action(9.0) == s.qty_max);
}

TEST_CASE("member allocation matches a brute-force split") {
  MarketEnv env(small_config(), 5);
  const std::vector<int> members = {0, 1};
  const auto& cfg = env.config();
  auto value = [&](int n, int h) {
    return env.buyer(n).reputation * cfg.qos_value_coeff *
           (env.buyer_satisfaction(n, h) - env.buyer_satisfaction(n, 0));
  };
  for (int w : {0, 1, 5, 12, 30, cfg.qty_max}) {
    const auto alloc = env.member_allocation(members, w);
    REQUIRE(alloc.size() == members.size());
    CHECK(alloc[0] + alloc[1] <= w);
    const double got = value(0, alloc[0]) + value(1, alloc[1]);
    double best = 0.0;
    for (int h0 = 0; h0 <= w; ++h0)
      for (int h1 = 0; h0 + h1 <= w; ++h1)
        best = std::max(best, value(0, h0) + value(1, h1));
    CHECK(got == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("coalition utility falls with price at a fixed quantity") {
  MarketEnv env(small_config(), 5);
  const std::vector<int> members = {0, 2};
  const int w = 10;
  const double lo = env.coalition_trade_utility(members, 1.0, w);
  const double hi = env.coalition_trade_utility(members, 2.0, w);
  // Same internal assignment, so the difference is exactly the price delta.
  CHECK(lo - hi == doctest::Approx(1.0 * w).epsilon(1e-9));
}

TEST_CASE("singleton mode never merges buyers") {
  MarketEnv env(small_config(), 9);
  const StepResult out = env.step({0.2, -0.3}, {0.1, 0.4, -0.2}, MarketMode::Singleton);
  REQUIRE(out.partition.coalitions.size() ==
          static_cast<size_t>(env.num_buyers()));
  for (const auto& c : out.partition.coalitions) CHECK(c.members.size() == 1);
}

TEST_CASE("step bookkeeping: rewards sum exactly to the system utility") {
  for (MarketMode mode : {MarketMode::Coalition, MarketMode::Singleton}) {
    MarketEnv env(small_config(), 17);
    for (int t = 0; t < 5; ++t) {
      const StepResult out =
          env.step({0.5 - 0.2 * t, -0.5 + 0.1 * t}, {0.9, -0.4, 0.3}, mode);
      const double sellers = std::accumulate(out.seller_rewards.begin(),
                                             out.seller_rewards.end(), 0.0);
      const double buyers = std::accumulate(out.buyer_rewards.begin(),
                                            out.buyer_rewards.end(), 0.0);
      CHECK(out.system_utility == sellers + buyers);  // exact, not approximate
      const double coals = std::accumulate(out.coalition_utilities.begin(),
                                           out.coalition_utilities.end(), 0.0);
      CHECK(buyers == doctest::Approx(coals).epsilon(1e-9));
    }
  }
}

TEST_CASE("quantities never exceed the matched seller's cap") {
  MarketEnv env(small_config(), 21);
  const StepResult out = env.step({1.0, 1.0}, {1.0, 1.0, 1.0}, MarketMode::Singleton);
  std::vector<double> sold(env.num_sellers(), 0.0);
  for (size_t z = 0; z < out.coalition_qty.size(); ++z) {
    const int m = out.coalition_seller[z];
    if (m >= 0) sold[m] += out.coalition_qty[z];
  }
  for (int m = 0; m < env.num_sellers(); ++m)
    CHECK(sold[m] <= env.seller(m).prbs_max_sellable);
  CHECK(out.clip_violations > 0);  // everyone demanded the maximum
}

TEST_CASE("seller rewards settle on the previous slot's sales") {
  MarketEnv env(small_config(), 23);
  const StepResult first = env.step({0.0, 0.0}, {0.2, 0.2, 0.2}, MarketMode::Singleton);
  std::vector<double> sold(env.num_sellers(), 0.0);
  for (size_t z = 0; z < first.coalition_qty.size(); ++z)
    if (first.coalition_seller[z] >= 0)
      sold[first.coalition_seller[z]] += first.coalition_qty[z];
  const StepResult second = env.step({0.6, -0.6}, {0.2, 0.2, 0.2}, MarketMode::Singleton);
  for (int m = 0; m < env.num_sellers(); ++m) {
    const double expect = seller_utility(second.prices[m],
                                         env.market().mno_unit_price, sold[m],
                                         env.market().price_bandwidth_unit);
    CHECK(second.seller_rewards[m] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("steps replay identically for identical seeds and actions") {
  MarketEnv a(small_config(), 31), b(small_config(), 31);
  for (int t = 0; t < 4; ++t) {
    const std::vector<double> sp = {0.3 - 0.1 * t, -0.2 + 0.05 * t};
    const std::vector<double> bq = {0.1 * t, -0.3, 0.7 - 0.2 * t};
    const StepResult ra = a.step(sp, bq, MarketMode::Coalition);
    const StepResult rb = b.step(sp, bq, MarketMode::Coalition);
    CHECK(ra.system_utility == rb.system_utility);
    CHECK(ra.prices == rb.prices);
    CHECK(ra.buyer_qty == rb.buyer_qty);
    CHECK(ra.partition.describe() == rb.partition.describe());
  }
}

TEST_CASE("oracle view exposes a valid game with per-seller caps") {
  MarketEnv env(small_config(), 41);
  const StackelbergGame g = env.build_game(MarketMode::Singleton);
  REQUIRE(g.leader_price_grids.size() == static_cast<size_t>(env.num_sellers()));
  REQUIRE(g.follower_qty_grids.size() <= static_cast<size_t>(env.num_buyers()));
  for (size_t f = 0; f < g.follower_qty_grids.size(); ++f) {
    const int m = g.follower_match[f];
    CHECK(g.follower_qty_grids[f].back() <= g.leader_caps[m]);
  }
  // Follower utilities respond to price exactly like the trading utility.
  const double u_lo = g.follower_utility(0, 1.0, 5);
  const double u_hi = g.follower_utility(0, 2.0, 5);
  CHECK(u_lo - u_hi == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_SUITE_END();
