#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace slicemkt {

// Discrete two-stage game: leaders post prices from their grids, followers
// answer with grid quantities. Follower f trades with leader follower_match[f];
// its utility depends only on that leader's price.
struct StackelbergGame {
  std::vector<std::vector<double>> leader_price_grids;  // A_m
  std::vector<std::vector<int>> follower_qty_grids;     // A_zn, <= matched cap
  std::vector<int> leader_caps;                         // w_m^max
  std::vector<int> follower_match;                      // leader index per follower
  double mno_price = 1.0;

  // U_zn(w, delta): (follower, matched leader's price, quantity).
  std::function<double(int, double, int)> follower_utility;
  // U_m(delta, w): (leader, price, quantity sold to one matched follower);
  // summed over matched followers by the solver.
  std::function<double(int, double, int)> leader_utility;

  void validate() const;
};

struct FollowerResponse {
  std::vector<int> quantities;
  std::vector<bool> infeasible;  // empty feasible set, quantity forced to 0
};

struct EquilibriumSolution {
  std::vector<double> prices;
  std::vector<int> quantities;
  std::vector<double> leader_utilities;
  std::vector<double> follower_utilities;
  bool epsilon_equilibrium = false;  // no exact grid Nash among leaders
  double epsilon = 0.0;              // max unilateral leader improvement left
};

struct SeCheck {
  bool pass = false;
  double max_gain = 0.0;  // largest utility gain over all unilateral deviations
};

// Per-follower argmax over its quantity grid at the given prices; ties break
// to the smaller quantity.
FollowerResponse follower_best_response(const StackelbergGame& game,
                                        const std::vector<double>& prices);

// Exhaustive search over the joint leader price grid with followers playing
// exact best responses: returns the lexicographically smallest profile where
// no leader can unilaterally improve. Falls back to the profile minimizing
// the maximum improvement, flagged epsilon_equilibrium.
std::vector<double> leader_optimize(const StackelbergGame& game,
                                    std::uint64_t budget = 100000000ULL);

EquilibriumSolution solve_se_bruteforce(const StackelbergGame& game,
                                        std::uint64_t budget = 100000000ULL);

// Checks every unilateral grid deviation: followers at fixed prices, leaders
// with their matched followers re-best-responding.
SeCheck verify_se(const StackelbergGame& game, const EquilibriumSolution& cand,
                  double tolerance = 1e-9);

// Structural hash over grids, caps, matching and sampled utility values, for
// tagging golden solutions.
std::uint64_t game_hash(const StackelbergGame& game);

// Line-oriented golden-file round trip.
std::string solution_to_line(std::uint64_t hash, const EquilibriumSolution& s);
bool solution_from_line(const std::string& line, std::uint64_t& hash,
                        EquilibriumSolution& s);

}  // namespace slicemkt
