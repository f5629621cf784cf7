#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "slicemkt/stackelberg.hpp"

using namespace slicemkt;

#ifndef SLICEMKT_TEST_DATA_DIR
#define SLICEMKT_TEST_DATA_DIR "."
#endif

namespace {

// Quadratic market family: follower f buys w at price p with utility
// a_f*w - b_f*w^2 - p*w; leader m earns (p - c_m)*w. Follower responses
// depend only on the matched leader's price, so leaders decouple and an
// exact grid Nash always exists.
struct QuadMarket {
  std::vector<double> a, b;  // follower taste / curvature
  std::vector<double> c;     // leader cost
};

StackelbergGame make_quad_game(const QuadMarket& mk,
                               const std::vector<std::vector<double>>& price_grids,
                               const std::vector<std::vector<int>>& qty_grids,
                               const std::vector<int>& caps,
                               const std::vector<int>& match) {
  StackelbergGame g;
  g.leader_price_grids = price_grids;
  g.follower_qty_grids = qty_grids;
  g.leader_caps = caps;
  g.follower_match = match;
  g.follower_utility = [mk](int f, double price, int w) {
    return mk.a[f] * w - mk.b[f] * w * w - price * w;
  };
  g.leader_utility = [mk](int m, double price, int w) {
    return (price - mk.c[m]) * w;
  };
  return g;
}

// Independent oracle for the decoupled family: each leader maximizes its own
// revenue over its price grid with matched followers best-responding; the
// smallest argmax price reproduces the solver's lexicographic tie-break.
EquilibriumSolution decoupled_oracle(const StackelbergGame& g) {
  const size_t M = g.leader_price_grids.size();
  const size_t N = g.follower_qty_grids.size();
  EquilibriumSolution sol;
  sol.prices.resize(M);
  sol.leader_utilities.assign(M, 0.0);
  sol.quantities.assign(N, 0);
  sol.follower_utilities.assign(N, 0.0);

  auto br_qty = [&](size_t f, double price) {
    const auto& grid = g.follower_qty_grids[f];
    int best_q = grid.front();
    double best_u = g.follower_utility(static_cast<int>(f), price, best_q);
    for (int q : grid) {
      const double u = g.follower_utility(static_cast<int>(f), price, q);
      if (u > best_u + 1e-12) {
        best_u = u;
        best_q = q;
      }
    }
    return best_q;
  };

  for (size_t m = 0; m < M; ++m) {
    double best_u = -1e300;
    double best_p = g.leader_price_grids[m].front();
    for (double p : g.leader_price_grids[m]) {
      double u = 0.0;
      for (size_t f = 0; f < N; ++f)
        if (g.follower_match[f] == static_cast<int>(m))
          u += g.leader_utility(static_cast<int>(m), p, br_qty(f, p));
      if (u > best_u + 1e-12) {
        best_u = u;
        best_p = p;
      }
    }
    sol.prices[m] = best_p;
    sol.leader_utilities[m] = best_u;
  }
  for (size_t f = 0; f < N; ++f) {
    const double p = sol.prices[g.follower_match[f]];
    sol.quantities[f] = br_qty(f, p);
    sol.follower_utilities[f] = g.follower_utility(static_cast<int>(f), p, sol.quantities[f]);
  }
  return sol;
}

std::vector<double> linspace_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

std::vector<int> qty_grid_to(int hi) {
  std::vector<int> g;
  for (int q = 1; q <= hi; ++q) g.push_back(q);
  return g;
}

// Fixed fixtures for the golden file.
std::vector<StackelbergGame> golden_games() {
  std::vector<StackelbergGame> games;
  {
    QuadMarket mk{{8.0}, {0.25}, {1.0}};
    games.push_back(make_quad_game(mk, {linspace_grid(1.0, 4.0, 31)},
                                   {qty_grid_to(12)}, {12}, {0}));
  }
  {
    QuadMarket mk{{6.0, 9.0}, {0.3, 0.5}, {1.0, 1.5}};
    games.push_back(make_quad_game(
        mk, {linspace_grid(1.0, 3.0, 21), linspace_grid(1.5, 4.0, 26)},
        {qty_grid_to(8), qty_grid_to(6)}, {8, 6}, {0, 1}));
  }
  {
    // both followers buy from leader 0; leader 1 has nobody matched
    QuadMarket mk{{7.0, 5.0}, {0.4, 0.2}, {1.2, 1.0}};
    games.push_back(make_quad_game(
        mk, {linspace_grid(1.2, 3.5, 24), linspace_grid(1.0, 2.0, 11)},
        {qty_grid_to(7), qty_grid_to(9)}, {16, 9}, {0, 0}));
  }
  return games;
}

}  // namespace

TEST_SUITE_BEGIN("stackelberg");

TEST_CASE("validation") {
  QuadMarket mk{{5.0}, {0.5}, {1.0}};
  auto g = make_quad_game(mk, {{1.0, 2.0}}, {{1, 2, 3}}, {3}, {0});
  CHECK_NOTHROW(g.validate());

  auto bad = g;
  bad.follower_match = {1};  // unknown leader
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.leader_caps = {2};  // grid exceeds cap
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.leader_utility = nullptr;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = g;
  bad.leader_price_grids = {{}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("follower best response: concave interior optimum") {
  // U(w) = 8w - 0.5 w^2 - pw; continuous argmax (8 - p) maps onto the grid
  QuadMarket mk{{8.0}, {0.5}, {1.0}};
  auto g = make_quad_game(mk, {{2.0}}, {qty_grid_to(10)}, {10}, {0});
  auto br = follower_best_response(g, {2.0});
  CHECK(br.quantities[0] == 6);
  CHECK_FALSE(br.infeasible[0]);

  br = follower_best_response(g, {5.0});
  CHECK(br.quantities[0] == 3);

  // cap binds when the interior optimum lies beyond the grid
  auto capped = make_quad_game(mk, {{2.0}}, {qty_grid_to(4)}, {4}, {0});
  CHECK(follower_best_response(capped, {2.0}).quantities[0] == 4);
}

TEST_CASE("follower best response: ties break to the smaller quantity") {
  StackelbergGame g;
  g.leader_price_grids = {{1.0}};
  g.follower_qty_grids = {{1, 2, 3}};
  g.leader_caps = {3};
  g.follower_match = {0};
  g.follower_utility = [](int, double, int) { return 1.0; };  // flat
  g.leader_utility = [](int, double, int w) { return static_cast<double>(w); };
  CHECK(follower_best_response(g, {1.0}).quantities[0] == 1);
}

TEST_CASE("one-leader game solved by hand") {
  // Follower: 8w - 0.25 w^2 - pw, so w*(p) = round((8 - p)/0.5) clipped.
  // Leader revenue (p - 1) * w*(p) over p in {1, 2, ..., 6}.
  QuadMarket mk{{8.0}, {0.25}, {1.0}};
  auto g = make_quad_game(mk, {{1, 2, 3, 4, 5, 6}}, {qty_grid_to(14)}, {14}, {0});
  double best_u = -1e300;
  double best_p = 0.0;
  int best_w = 0;
  for (double p : g.leader_price_grids[0]) {
    const int w = std::min(14, static_cast<int>(std::lround((8.0 - p) / 0.5)));
    const double u = (p - 1.0) * w;
    if (u > best_u) {
      best_u = u;
      best_p = p;
      best_w = w;
    }
  }
  auto sol = solve_se_bruteforce(g);
  CHECK_FALSE(sol.epsilon_equilibrium);
  CHECK(sol.prices[0] == doctest::Approx(best_p));
  CHECK(sol.quantities[0] == best_w);
  CHECK(sol.leader_utilities[0] == doctest::Approx(best_u));
  CHECK(verify_se(g, sol).pass);
}

TEST_CASE("random decoupled games match the independent oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> rd(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    QuadMarket mk;
    mk.a = {4.0 + 6.0 * rd(rng), 4.0 + 6.0 * rd(rng)};
    mk.b = {0.2 + 0.5 * rd(rng), 0.2 + 0.5 * rd(rng)};
    mk.c = {0.8 + 0.8 * rd(rng), 0.8 + 0.8 * rd(rng)};
    const int np0 = 5 + static_cast<int>(rd(rng) * 12);
    const int np1 = 5 + static_cast<int>(rd(rng) * 12);
    const int cap0 = 3 + static_cast<int>(rd(rng) * 8);
    const int cap1 = 3 + static_cast<int>(rd(rng) * 8);
    std::vector<int> match{trial % 3 == 0 ? 0 : 0, trial % 2 == 0 ? 1 : 0};
    std::vector<int> caps{cap0, cap1};
    auto g = make_quad_game(
        mk,
        {linspace_grid(1.0, 2.0 + 2.0 * rd(rng), np0),
         linspace_grid(1.0, 2.0 + 2.0 * rd(rng), np1)},
        {qty_grid_to(std::min(cap0, caps[match[0]])),
         qty_grid_to(std::min(cap1, caps[match[1]]))},
        caps, match);

    auto sol = solve_se_bruteforce(g);
    auto ref = decoupled_oracle(g);
    REQUIRE_FALSE(sol.epsilon_equilibrium);
    for (size_t m = 0; m < 2; ++m) {
      CHECK(sol.prices[m] == doctest::Approx(ref.prices[m]));
      CHECK(sol.leader_utilities[m] == doctest::Approx(ref.leader_utilities[m]));
    }
    for (size_t f = 0; f < 2; ++f) CHECK(sol.quantities[f] == ref.quantities[f]);
    CHECK(verify_se(g, sol).pass);
  }
}

TEST_CASE("verify_se rejects perturbed solutions") {
  QuadMarket mk{{8.0, 7.0}, {0.3, 0.4}, {1.0, 1.2}};
  auto g = make_quad_game(
      mk, {linspace_grid(1.0, 3.0, 15), linspace_grid(1.0, 3.0, 15)},
      {qty_grid_to(9), qty_grid_to(7)}, {9, 7}, {0, 1});
  auto sol = solve_se_bruteforce(g);
  REQUIRE(verify_se(g, sol).pass);

  // a non-best-response follower quantity must be flagged
  auto bad = sol;
  bad.quantities[0] = sol.quantities[0] == 1 ? 2 : sol.quantities[0] - 1;
  auto check = verify_se(g, bad);
  CHECK_FALSE(check.pass);
  CHECK(check.max_gain > 0.0);

  // a suboptimal leader price must be flagged
  bad = sol;
  bad.prices[1] = g.leader_price_grids[1].front() == sol.prices[1]
                      ? g.leader_price_grids[1].back()
                      : g.leader_price_grids[1].front();
  {
    std::vector<double> p = bad.prices;
    bad.quantities = follower_best_response(g, p).quantities;
  }
  CHECK_FALSE(verify_se(g, bad).pass);
}

TEST_CASE("budget guard") {
  QuadMarket mk{{8.0}, {0.25}, {1.0}};
  auto g = make_quad_game(mk, {linspace_grid(1.0, 2.0, 100)},
                          {qty_grid_to(50)}, {50}, {0});
  CHECK_THROWS_WITH_AS(solve_se_bruteforce(g, 100),
                       "solve_se_bruteforce: oracle infeasible at this scale",
                       std::runtime_error);
  CHECK_NOTHROW(solve_se_bruteforce(g));
}

TEST_CASE("game hash distinguishes games and is stable") {
  auto games = golden_games();
  CHECK(game_hash(games[0]) == game_hash(games[0]));
  CHECK(game_hash(games[0]) != game_hash(games[1]));
  CHECK(game_hash(games[0]) != game_hash(games[2]));

  // behavioral change only (same grids): sampled utilities must differ
  auto tweaked = games[0];
  auto base_follower = games[0].follower_utility;
  tweaked.follower_utility = [base_follower](int f, double p, int w) {
    return base_follower(f, p, w) + 0.125;
  };
  CHECK(game_hash(tweaked) != game_hash(games[0]));
}

TEST_CASE("solution line round trip") {
  auto games = golden_games();
  for (const auto& g : games) {
    auto sol = solve_se_bruteforce(g);
    const auto h = game_hash(g);
    const std::string line = solution_to_line(h, sol);
    std::uint64_t h2 = 0;
    EquilibriumSolution back;
    REQUIRE(solution_from_line(line, h2, back));
    CHECK(h2 == h);
    CHECK(solution_to_line(h2, back) == line);  // byte-identical re-emit
    REQUIRE(back.prices.size() == sol.prices.size());
    for (size_t m = 0; m < sol.prices.size(); ++m)
      CHECK(back.prices[m] == sol.prices[m]);
    CHECK(back.quantities == sol.quantities);
  }
  std::uint64_t h = 0;
  EquilibriumSolution s;
  CHECK_FALSE(solution_from_line("nonsense 1 2", h, s));
  CHECK_FALSE(solution_from_line("se 5 2 1 1.0", h, s));  // truncated
}

TEST_CASE("golden equilibria") {
  const std::string path = std::string(SLICEMKT_TEST_DATA_DIR) + "/golden_se.txt";
  auto games = golden_games();

  if (std::getenv("SLICEMKT_REGEN_GOLDEN") != nullptr) {
    std::ofstream out(path);
    REQUIRE(out.good());
    for (const auto& g : games)
      out << solution_to_line(game_hash(g), solve_se_bruteforce(g)) << '\n';
    MESSAGE("regenerated ", path);
    return;
  }

  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file: ", path);
  std::string line;
  size_t idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    REQUIRE(idx < games.size());
    std::uint64_t h = 0;
    EquilibriumSolution expect;
    REQUIRE(solution_from_line(line, h, expect));
    CHECK(h == game_hash(games[idx]));
    auto sol = solve_se_bruteforce(games[idx]);
    CHECK(solution_to_line(game_hash(games[idx]), sol) == line);
    CHECK(verify_se(games[idx], sol).pass);
    ++idx;
  }
  CHECK(idx == games.size());
}

TEST_SUITE_END();
