#include "slicemkt/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "slicemkt/agent.hpp"
#include "slicemkt/replay.hpp"
#include "slicemkt/stackelberg.hpp"

namespace slicemkt {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void put_csv(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

struct OracleRef {
  bool available = false;
  std::vector<double> prices;  // sorted ascending
  double total_qty = 0.0;
  int num_followers = 0;
};

OracleRef solve_oracle(const MarketEnv& env, MarketMode mode) {
  OracleRef ref;
  try {
    const StackelbergGame game = env.build_game(mode);
    const EquilibriumSolution sol = solve_se_bruteforce(game, 5000000ULL);
    ref.prices = sol.prices;
    std::sort(ref.prices.begin(), ref.prices.end());
    for (int q : sol.quantities) ref.total_qty += q;
    ref.num_followers = static_cast<int>(sol.quantities.size());
    ref.available = true;
  } catch (const std::runtime_error&) {
    // oracle infeasible at this scale; the SE-gap column stays at -1
  }
  return ref;
}

double se_gap(const OracleRef& ref, const ScenarioConfig& cfg,
              const StepResult& out) {
  if (!ref.available) return -1.0;
  std::vector<double> prices = out.prices;
  std::sort(prices.begin(), prices.end());
  const double prange = cfg.price_max - cfg.price_min;
  double price_gap = 0.0;
  for (size_t m = 0; m < prices.size(); ++m)
    price_gap += std::abs(prices[m] - ref.prices[m]) / prange;
  price_gap /= static_cast<double>(prices.size());

  double total_qty = 0.0;
  for (int q : out.coalition_qty) total_qty += q;
  const double qty_gap =
      std::abs(total_qty - ref.total_qty) /
      (static_cast<double>(cfg.qty_max) * std::max(1, ref.num_followers));
  return 0.5 * (price_gap + qty_gap);
}

}  // namespace

TrainingHistory train_strategy(const ScenarioConfig& cfg, Strategy strategy,
                               std::uint64_t seed) {
  MarketEnv env(cfg, seed);
  const int M = env.num_sellers();
  const int N = env.num_buyers();
  const int state_dim = N + M;   // [w_prev (N); prices (M)], normalized
  const int action_dim = M + N;  // sellers then buyers, raw in [-1, 1]
  const auto& tp = cfg.training;
  const MarketMode mode =
      strategy == Strategy::CostMaddpg ? MarketMode::Coalition : MarketMode::Singleton;

  TrainingHistory hist;
  hist.strategy = strategy;
  hist.seed = seed;
  hist.num_sellers = M;
  hist.num_buyers = N;
  hist.rows.reserve(tp.iterations);

  const bool learns = strategy != Strategy::Random;
  // CoST/ST critics are centralized (they see the joint action); SA-DDPG keeps
  // one independent DDPG per entity whose critic sees only its own action, so
  // every single agent maximizes its own cumulative reward in isolation.
  const bool central_critic =
      strategy == Strategy::CostMaddpg || strategy == Strategy::StMaddpg;

  std::vector<AgentNet> agents;
  if (learns) {
    for (int m = 0; m < M; ++m) {
      AgentConfig ac;
      ac.state_dim = N;
      ac.action_dim = 1;
      ac.joint_action_dim = central_critic ? action_dim : 1;
      ac.own_action_offset = central_critic ? m : 0;
      ac.gamma = tp.gamma;
      ac.tau = tp.tau;
      ac.lr_actor = tp.lr_actor;
      ac.lr_critic = tp.lr_critic;
      // Leaders use the max-over-own-action critic target only when
      // the critic actually models the joint action.
      ac.target_mode =
          central_critic ? TargetMode::StackelbergMax : TargetMode::Standard;
      ac.own_action_points = tp.own_action_points;
      agents.emplace_back(ac, mix_seed(seed, m));
    }
    for (int n = 0; n < N; ++n) {
      AgentConfig ac;
      ac.state_dim = M;
      ac.action_dim = 1;
      ac.joint_action_dim = central_critic ? action_dim : 1;
      ac.own_action_offset = central_critic ? M + n : 0;
      ac.gamma = tp.gamma;
      ac.tau = tp.tau;
      ac.lr_actor = tp.lr_actor;
      ac.lr_critic = tp.lr_critic;
      ac.target_mode = TargetMode::Standard;  // followers use plain DDPG targets
      agents.emplace_back(ac, mix_seed(seed, M + n));
    }
  }

  ReplayBuffer buffer(static_cast<std::size_t>(tp.replay_capacity));
  std::mt19937_64 noise_rng(mix_seed(seed, 1000));
  std::mt19937_64 sample_rng(mix_seed(seed, 2000));
  std::mt19937_64 random_rng(mix_seed(seed, 3000));
  std::uniform_int_distribution<int> rand_price(0, cfg.price_points - 1);
  std::uniform_int_distribution<int> rand_qty(0, cfg.qty_max - 1);

  const OracleRef oracle = solve_oracle(env, mode);

  const auto norm_qty = [&](double q) { return q / cfg.qty_max; };
  const auto norm_price = [&](double p) {
    return (p - cfg.price_min) / (cfg.price_max - cfg.price_min);
  };

  Transition pending;
  bool has_pending = false;
  const std::size_t learn_after =
      static_cast<std::size_t>(std::max(tp.batch_size, tp.warmup));

  for (int t = 0; t < tp.iterations; ++t) {
    const double noise = learns ? noise_scale_at(t, tp.iterations, tp.noise_initial,
                                                 tp.noise_floor,
                                                 tp.noise_decay_fraction)
                                : 0.0;

    Eigen::VectorXd w_prev(N);
    for (int n = 0; n < N; ++n) w_prev(n) = norm_qty(env.last_buyer_qty()[n]);

    // Choose the joint action.
    Eigen::VectorXd action(action_dim);
    if (learns) {
      for (int m = 0; m < M; ++m)
        action(m) = explore(agents[m].act(w_prev), noise, noise_rng)(0);
    } else {
      for (int m = 0; m < M; ++m)
        action(m) = 2.0 * rand_price(random_rng) / (cfg.price_points - 1) - 1.0;
      for (int n = 0; n < N; ++n)
        action(M + n) = cfg.qty_max == 1
                            ? -1.0
                            : 2.0 * rand_qty(random_rng) / (cfg.qty_max - 1) - 1.0;
    }

    // Followers observe the prices just posted.
    Eigen::VectorXd cur_prices(M);
    for (int m = 0; m < M; ++m)
      cur_prices(m) = norm_price(env.price_from_action(action(m)));
    if (learns) {
      for (int n = 0; n < N; ++n)
        action(M + n) = explore(agents[M + n].act(cur_prices), noise, noise_rng)(0);
    }

    std::vector<double> seller_raw(M), buyer_raw(N);
    for (int m = 0; m < M; ++m) seller_raw[m] = action(m);
    for (int n = 0; n < N; ++n) buyer_raw[n] = action(M + n);
    const StepResult out = env.step(seller_raw, buyer_raw, mode);

    // Transition bookkeeping: the follower's state is this slot's prices, so
    // the previous slot's transition completes only now.
    Eigen::VectorXd states(state_dim);
    states << w_prev, cur_prices;
    Eigen::VectorXd rewards(action_dim);
    for (int m = 0; m < M; ++m) rewards(m) = out.seller_rewards[m] * tp.reward_scale;
    for (int n = 0; n < N; ++n)
      rewards(M + n) = out.buyer_rewards[n] * tp.reward_scale;

    if (has_pending) {
      pending.next_states = states;
      buffer.push(pending);
    }
    pending.states = states;
    pending.actions = action;
    pending.rewards = rewards;
    has_pending = true;

    // Learning step on a shared batch.
    double critic_loss = 0.0, actor_q = 0.0;
    if (learns && buffer.size() >= learn_after) {
      const auto idx =
          buffer.sample_indices(static_cast<std::size_t>(tp.batch_size), sample_rng);
      const int B = tp.batch_size;
      Eigen::MatrixXd S(state_dim, B), Sn(state_dim, B), A(action_dim, B),
          An(action_dim, B), R(action_dim, B);
      for (int i = 0; i < B; ++i) {
        const Transition& tr = buffer.at(idx[i]);
        S.col(i) = tr.states;
        Sn.col(i) = tr.next_states;
        A.col(i) = tr.actions;
        R.col(i) = tr.rewards;
      }
      // Next joint actions start from the stored ones; each agent's
      // critic-target routine substitutes its own slice.
      An = A;

      try {
        for (size_t a = 0; a < agents.size(); ++a) {
          AgentNet& ag = agents[a];
          Eigen::MatrixXd s_slice, sn_slice;
          if (static_cast<int>(a) < M) {
            s_slice = S.topRows(N);
            sn_slice = Sn.topRows(N);
          } else {
            s_slice = S.middleRows(N, M);
            sn_slice = Sn.middleRows(N, M);
          }
          // Decentralized critics are fed only the agent's own action column.
          const Eigen::MatrixXd a_slice =
              central_critic ? A : Eigen::MatrixXd(A.row(a));
          const Eigen::MatrixXd an_slice =
              central_critic ? An : Eigen::MatrixXd(An.row(a));
          const Eigen::VectorXd r = R.row(a).transpose();
          critic_loss += critic_update(ag, s_slice, a_slice, r, sn_slice, an_slice);
          actor_q += actor_update(ag, s_slice, a_slice);
          soft_update_targets(ag);
        }
      } catch (const std::runtime_error&) {
        hist.aborted = true;
      }
      critic_loss /= static_cast<double>(agents.size());
      actor_q /= static_cast<double>(agents.size());
    }

    IterationRow row;
    row.iteration = t;
    row.prices = out.prices;
    row.buyer_qty = out.buyer_qty;
    row.seller_rewards = out.seller_rewards;
    row.buyer_rewards = out.buyer_rewards;
    row.system_utility = out.system_utility;
    row.critic_loss_mean = critic_loss;
    row.actor_q_mean = actor_q;
    row.noise_scale = noise;
    row.clip_violations = out.clip_violations;
    row.se_gap = se_gap(oracle, cfg, out);
    row.partition = out.partition.describe();
    hist.rows.push_back(std::move(row));

    if (hist.aborted) break;
  }
  return hist;
}

void history_to_csv(std::ostream& os, const TrainingHistory& h) {
  os << "iteration";
  for (int m = 0; m < h.num_sellers; ++m) os << ",price_" << m;
  for (int n = 0; n < h.num_buyers; ++n) os << ",qty_" << n;
  for (int m = 0; m < h.num_sellers; ++m) os << ",seller_reward_" << m;
  for (int n = 0; n < h.num_buyers; ++n) os << ",buyer_reward_" << n;
  os << ",system_utility,critic_loss,actor_q,noise,clip_violations,se_gap,partition\n";
  for (const auto& r : h.rows) {
    os << r.iteration;
    for (double v : r.prices) { os << ','; put_csv(os, v); }
    for (double v : r.buyer_qty) { os << ','; put_csv(os, v); }
    for (double v : r.seller_rewards) { os << ','; put_csv(os, v); }
    for (double v : r.buyer_rewards) { os << ','; put_csv(os, v); }
    os << ','; put_csv(os, r.system_utility);
    os << ','; put_csv(os, r.critic_loss_mean);
    os << ','; put_csv(os, r.actor_q_mean);
    os << ','; put_csv(os, r.noise_scale);
    os << ',' << r.clip_violations;
    os << ','; put_csv(os, r.se_gap);
    os << ",\"" << r.partition << "\"\n";
  }
}

double window_mean_system_utility(const TrainingHistory& h, int from, int to) {
  from = std::max(0, from);
  to = std::min(to, static_cast<int>(h.rows.size()));
  if (to <= from) throw std::domain_error("window_mean_system_utility: empty window");
  double s = 0.0;
  for (int i = from; i < to; ++i) s += h.rows[i].system_utility;
  return s / static_cast<double>(to - from);
}

}  // namespace slicemkt
