#include "slicemkt/stackelberg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace slicemkt {

namespace {

constexpr double kStrict = 1e-12;  // strictness margin for improvements

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::uint64_t double_bits(double d) {
  std::uint64_t u;
  std::memcpy(&u, &d, sizeof(u));
  return u;
}

// Utility of leader m at a joint profile: sum over matched followers.
double leader_profile_utility(const StackelbergGame& g, int m, double price,
                              const FollowerResponse& br) {
  double u = 0.0;
  for (size_t f = 0; f < g.follower_match.size(); ++f)
    if (g.follower_match[f] == static_cast<int>(m))
      u += g.leader_utility(static_cast<int>(m), price, br.quantities[f]);
  return u;
}

}  // namespace

void StackelbergGame::validate() const {
  if (leader_price_grids.empty() || follower_qty_grids.empty())
    throw std::invalid_argument("StackelbergGame: no leaders or followers");
  for (const auto& g : leader_price_grids)
    if (g.empty()) throw std::invalid_argument("StackelbergGame: empty price grid");
  if (leader_caps.size() != leader_price_grids.size())
    throw std::invalid_argument("StackelbergGame: caps/leaders mismatch");
  if (follower_match.size() != follower_qty_grids.size())
    throw std::invalid_argument("StackelbergGame: match/followers mismatch");
  for (size_t f = 0; f < follower_qty_grids.size(); ++f) {
    const int m = follower_match[f];
    if (m < 0 || m >= static_cast<int>(leader_price_grids.size()))
      throw std::invalid_argument("StackelbergGame: follower matched to unknown leader");
    for (int q : follower_qty_grids[f])
      if (q > leader_caps[m])
        throw std::invalid_argument("StackelbergGame: quantity grid exceeds seller cap");
  }
  if (!follower_utility || !leader_utility)
    throw std::invalid_argument("StackelbergGame: missing utility evaluator");
}

FollowerResponse follower_best_response(const StackelbergGame& game,
                                        const std::vector<double>& prices) {
  FollowerResponse out;
  const size_t nf = game.follower_qty_grids.size();
  out.quantities.resize(nf, 0);
  out.infeasible.resize(nf, false);
  for (size_t f = 0; f < nf; ++f) {
    const double price = prices[game.follower_match[f]];
    const auto& grid = game.follower_qty_grids[f];
    if (grid.empty()) {
      out.infeasible[f] = true;
      continue;
    }
    int best_q = grid.front();
    double best_u = game.follower_utility(static_cast<int>(f), price, best_q);
    for (size_t i = 1; i < grid.size(); ++i) {
      const double u = game.follower_utility(static_cast<int>(f), price, grid[i]);
      if (u > best_u + kStrict) {  // ties keep the smaller quantity
        best_u = u;
        best_q = grid[i];
      }
    }
    out.quantities[f] = best_q;
  }
  return out;
}

std::vector<double> leader_optimize(const StackelbergGame& game,
                                    std::uint64_t budget) {
  return solve_se_bruteforce(game, budget).prices;
}

EquilibriumSolution solve_se_bruteforce(const StackelbergGame& game,
                                        std::uint64_t budget) {
  game.validate();
  const size_t M = game.leader_price_grids.size();
  const size_t N = game.follower_qty_grids.size();

  std::uint64_t profiles = 1;
  std::uint64_t qty_work = 0;
  for (const auto& g : game.follower_qty_grids) qty_work += g.size();
  for (const auto& g : game.leader_price_grids) {
    if (profiles > budget / g.size())
      throw std::runtime_error("solve_se_bruteforce: oracle infeasible at this scale");
    profiles *= g.size();
  }
  if (profiles * std::max<std::uint64_t>(qty_work, 1) > budget)
    throw std::runtime_error("solve_se_bruteforce: oracle infeasible at this scale");

  // Evaluate every joint price profile once.
  std::vector<std::vector<double>> leader_u(profiles, std::vector<double>(M));
  std::vector<FollowerResponse> responses(profiles);
  std::vector<size_t> idx(M, 0);
  std::vector<double> prices(M);
  for (std::uint64_t p = 0; p < profiles; ++p) {
    for (size_t m = 0; m < M; ++m) prices[m] = game.leader_price_grids[m][idx[m]];
    responses[p] = follower_best_response(game, prices);
    for (size_t m = 0; m < M; ++m)
      leader_u[p][m] =
          leader_profile_utility(game, static_cast<int>(m), prices[m], responses[p]);
    // mixed-radix increment, last leader fastest: profile order is
    // lexicographic in the price vector
    for (size_t m = M; m-- > 0;) {
      if (++idx[m] < game.leader_price_grids[m].size()) break;
      idx[m] = 0;
    }
  }

  // Stride of leader m in the flat profile index.
  std::vector<std::uint64_t> stride(M, 1);
  for (size_t m = M - 1; m-- > 0;)
    stride[m] = stride[m + 1] * game.leader_price_grids[m + 1].size();

  std::int64_t best_profile = -1;
  std::int64_t best_eps_profile = -1;
  double best_eps = 0.0;
  std::vector<size_t> digits(M);
  for (std::uint64_t p = 0; p < profiles; ++p) {
    std::uint64_t rem = p;
    for (size_t m = 0; m < M; ++m) {
      digits[m] = rem / stride[m];
      rem %= stride[m];
    }
    double worst = 0.0;  // max unilateral improvement at this profile
    for (size_t m = 0; m < M && worst <= kStrict; ++m) {
      const std::uint64_t base = p - digits[m] * stride[m];
      for (size_t a = 0; a < game.leader_price_grids[m].size(); ++a) {
        const double gain = leader_u[base + a * stride[m]][m] - leader_u[p][m];
        worst = std::max(worst, gain);
      }
    }
    if (worst <= kStrict) {
      best_profile = static_cast<std::int64_t>(p);
      break;  // lexicographic order: first Nash is the smallest price vector
    }
    if (best_eps_profile < 0 || worst < best_eps) {
      best_eps_profile = static_cast<std::int64_t>(p);
      best_eps = worst;
    }
  }

  EquilibriumSolution sol;
  const std::uint64_t chosen = static_cast<std::uint64_t>(
      best_profile >= 0 ? best_profile : best_eps_profile);
  if (best_profile < 0) {
    sol.epsilon_equilibrium = true;
    sol.epsilon = best_eps;
  }
  std::uint64_t rem = chosen;
  sol.prices.resize(M);
  for (size_t m = 0; m < M; ++m) {
    sol.prices[m] = game.leader_price_grids[m][rem / stride[m]];
    rem %= stride[m];
  }
  sol.quantities = responses[chosen].quantities;
  sol.leader_utilities = leader_u[chosen];
  sol.follower_utilities.resize(N);
  for (size_t f = 0; f < N; ++f)
    sol.follower_utilities[f] = game.follower_utility(
        static_cast<int>(f), sol.prices[game.follower_match[f]], sol.quantities[f]);
  return sol;
}

SeCheck verify_se(const StackelbergGame& game, const EquilibriumSolution& cand,
                  double tolerance) {
  game.validate();
  SeCheck check;
  double max_gain = -std::numeric_limits<double>::infinity();

  // Follower deviations at fixed prices.
  for (size_t f = 0; f < game.follower_qty_grids.size(); ++f) {
    const double price = cand.prices[game.follower_match[f]];
    const double cur = game.follower_utility(static_cast<int>(f), price,
                                             cand.quantities[f]);
    for (int q : game.follower_qty_grids[f]) {
      const double gain = game.follower_utility(static_cast<int>(f), price, q) - cur;
      max_gain = std::max(max_gain, gain);
    }
  }

  // Leader deviations; matched followers re-best-respond to the new price.
  std::vector<double> prices = cand.prices;
  for (size_t m = 0; m < game.leader_price_grids.size(); ++m) {
    FollowerResponse cur_br;
    cur_br.quantities = cand.quantities;
    const double cur =
        leader_profile_utility(game, static_cast<int>(m), cand.prices[m], cur_br);
    const double saved = prices[m];
    for (double alt : game.leader_price_grids[m]) {
      prices[m] = alt;
      const FollowerResponse br = follower_best_response(game, prices);
      const double gain =
          leader_profile_utility(game, static_cast<int>(m), alt, br) - cur;
      max_gain = std::max(max_gain, gain);
    }
    prices[m] = saved;
  }

  check.max_gain = max_gain;
  check.pass = max_gain <= tolerance;
  return check;
}

std::uint64_t game_hash(const StackelbergGame& game) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  hash_mix(h, game.leader_price_grids.size());
  hash_mix(h, game.follower_qty_grids.size());
  hash_mix(h, double_bits(game.mno_price));
  for (const auto& g : game.leader_price_grids) {
    hash_mix(h, g.size());
    for (double v : g) hash_mix(h, double_bits(v));
  }
  for (const auto& g : game.follower_qty_grids) {
    hash_mix(h, g.size());
    for (int v : g) hash_mix(h, static_cast<std::uint64_t>(v));
  }
  for (int c : game.leader_caps) hash_mix(h, static_cast<std::uint64_t>(c));
  for (int m : game.follower_match) hash_mix(h, static_cast<std::uint64_t>(m));
  // Sample the evaluators so behaviorally different games hash differently.
  for (size_t f = 0; f < game.follower_qty_grids.size(); ++f) {
    const auto& qs = game.follower_qty_grids[f];
    const auto& ps = game.leader_price_grids[game.follower_match[f]];
    if (qs.empty()) continue;
    for (double price : {ps.front(), ps.back()})
      for (int q : {qs.front(), qs.back()})
        hash_mix(h, double_bits(game.follower_utility(static_cast<int>(f), price, q)));
  }
  return h;
}

std::string solution_to_line(std::uint64_t hash, const EquilibriumSolution& s) {
  std::ostringstream os;
  os << "se " << hash << ' ' << s.prices.size() << ' ' << s.quantities.size();
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << ' ' << buf;
  };
  for (double p : s.prices) put(p);
  for (int q : s.quantities) os << ' ' << q;
  for (double u : s.leader_utilities) put(u);
  for (double u : s.follower_utilities) put(u);
  os << ' ' << (s.epsilon_equilibrium ? 1 : 0);
  put(s.epsilon);
  return os.str();
}

bool solution_from_line(const std::string& line, std::uint64_t& hash,
                        EquilibriumSolution& s) {
  std::istringstream is(line);
  std::string tag;
  size_t nm = 0, nf = 0;
  if (!(is >> tag >> hash >> nm >> nf) || tag != "se") return false;
  s = EquilibriumSolution{};
  s.prices.resize(nm);
  s.quantities.resize(nf);
  s.leader_utilities.resize(nm);
  s.follower_utilities.resize(nf);
  for (auto& v : s.prices)
    if (!(is >> v)) return false;
  for (auto& v : s.quantities)
    if (!(is >> v)) return false;
  for (auto& v : s.leader_utilities)
    if (!(is >> v)) return false;
  for (auto& v : s.follower_utilities)
    if (!(is >> v)) return false;
  int flag = 0;
  if (!(is >> flag >> s.epsilon)) return false;
  s.epsilon_equilibrium = flag != 0;
  return true;
}

}  // namespace slicemkt
