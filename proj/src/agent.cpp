#include "slicemkt/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace slicemkt {

AgentNet::AgentNet(const AgentConfig& c, std::uint64_t seed) : cfg(c) {
  if (cfg.state_dim <= 0 || cfg.action_dim <= 0 ||
      cfg.joint_action_dim < cfg.action_dim)
    throw std::invalid_argument("AgentNet: bad dimensions");
  if (cfg.own_action_offset < 0 ||
      cfg.own_action_offset + cfg.action_dim > cfg.joint_action_dim)
    throw std::invalid_argument("AgentNet: own action slice out of range");
  std::mt19937_64 rng(seed);
  actor = Mlp(cfg.state_dim, cfg.hidden, cfg.action_dim, OutputActivation::Tanh, rng);
  critic = Mlp(cfg.state_dim + cfg.joint_action_dim, cfg.hidden, 1,
               OutputActivation::Identity, rng);
  target_actor = actor;
  target_critic = critic;
  actor_opt.lr = cfg.lr_actor;
  critic_opt.lr = cfg.lr_critic;
  actor_opt.init(actor);
  critic_opt.init(critic);
}

Eigen::VectorXd AgentNet::act(const Eigen::VectorXd& state) const {
  return mlp_forward(actor, state);
}

Eigen::VectorXd critic_targets(const AgentNet& agent,
                               const Eigen::VectorXd& rewards,
                               const Eigen::MatrixXd& next_states,
                               const Eigen::MatrixXd& next_joint_actions) {
  const auto& cfg = agent.cfg;
  const Eigen::Index batch = next_states.cols();
  Eigen::MatrixXd joint = next_joint_actions;
  Eigen::VectorXd q(batch);

  if (cfg.target_mode == TargetMode::Standard) {
    joint.middleRows(cfg.own_action_offset, cfg.action_dim) =
        mlp_forward(agent.target_actor, next_states);
    Eigen::MatrixXd in(cfg.state_dim + cfg.joint_action_dim, batch);
    in.topRows(cfg.state_dim) = next_states;
    in.bottomRows(cfg.joint_action_dim) = joint;
    q = mlp_forward(agent.target_critic, in).row(0);
  } else {
    // max over a uniform grid of the agent's own next action
    const int k = std::max(2, cfg.own_action_points);
    q.setConstant(batch, -std::numeric_limits<double>::infinity());
    Eigen::MatrixXd in(cfg.state_dim + cfg.joint_action_dim, batch);
    in.topRows(cfg.state_dim) = next_states;
    for (int i = 0; i < k; ++i) {
      const double a = -1.0 + 2.0 * i / (k - 1);
      joint.middleRows(cfg.own_action_offset, cfg.action_dim).setConstant(a);
      in.bottomRows(cfg.joint_action_dim) = joint;
      Eigen::VectorXd qi = mlp_forward(agent.target_critic, in).row(0);
      q = q.cwiseMax(qi);
    }
  }
  return rewards + cfg.gamma * q;
}

double critic_update(AgentNet& agent, const Eigen::MatrixXd& states,
                     const Eigen::MatrixXd& joint_actions,
                     const Eigen::VectorXd& rewards,
                     const Eigen::MatrixXd& next_states,
                     const Eigen::MatrixXd& next_joint_actions) {
  const auto& cfg = agent.cfg;
  const Eigen::Index batch = states.cols();
  const Eigen::VectorXd y =
      critic_targets(agent, rewards, next_states, next_joint_actions);

  Eigen::MatrixXd in(cfg.state_dim + cfg.joint_action_dim, batch);
  in.topRows(cfg.state_dim) = states;
  in.bottomRows(cfg.joint_action_dim) = joint_actions;

  MlpCache cache;
  Eigen::VectorXd q = mlp_forward(agent.critic, in, &cache).row(0);
  const Eigen::VectorXd td = q - y;
  const double loss = td.squaredNorm() / static_cast<double>(batch);
  if (!std::isfinite(loss))
    throw std::runtime_error("critic_update: non-finite loss (diverged)");

  // d/dq of mean squared error
  Eigen::MatrixXd upstream = (2.0 / static_cast<double>(batch)) * td.transpose();
  const MlpGrads g = mlp_backward(agent.critic, cache, upstream);
  agent.critic_opt.step(agent.critic, g);
  return loss;
}

double actor_update(AgentNet& agent, const Eigen::MatrixXd& states,
                    const Eigen::MatrixXd& joint_actions) {
  const auto& cfg = agent.cfg;
  const Eigen::Index batch = states.cols();

  MlpCache actor_cache;
  Eigen::MatrixXd own = mlp_forward(agent.actor, states, &actor_cache);

  Eigen::MatrixXd in(cfg.state_dim + cfg.joint_action_dim, batch);
  in.topRows(cfg.state_dim) = states;
  in.bottomRows(cfg.joint_action_dim) = joint_actions;
  in.middleRows(cfg.state_dim + cfg.own_action_offset, cfg.action_dim) = own;

  MlpCache critic_cache;
  Eigen::VectorXd q = mlp_forward(agent.critic, in, &critic_cache).row(0);
  const double mean_q = q.mean();
  if (!std::isfinite(mean_q))
    throw std::runtime_error("actor_update: non-finite objective (diverged)");

  // dQ/d(input), restricted to the agent's own action rows; ascend
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, batch);
  const MlpGrads critic_g = mlp_backward(agent.critic, critic_cache, ones);
  Eigen::MatrixXd dq_da = critic_g.input.middleRows(
      cfg.state_dim + cfg.own_action_offset, cfg.action_dim);
  Eigen::MatrixXd upstream = -dq_da / static_cast<double>(batch);
  if (!upstream.allFinite())
    throw std::runtime_error("actor_update: non-finite gradient (diverged)");

  const MlpGrads g = mlp_backward(agent.actor, actor_cache, upstream);
  agent.actor_opt.step(agent.actor, g);
  return mean_q;
}

void soft_update_targets(AgentNet& agent) {
  soft_update(agent.target_actor, agent.actor, agent.cfg.tau);
  soft_update(agent.target_critic, agent.critic, agent.cfg.tau);
}

Eigen::VectorXd explore(const Eigen::VectorXd& action, double noise_scale,
                        std::mt19937_64& rng) {
  if (noise_scale <= 0.0) return action;
  std::normal_distribution<double> dist(0.0, noise_scale);
  Eigen::VectorXd out = action;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out(i) = std::clamp(out(i) + dist(rng), -1.0, 1.0);
  return out;
}

double noise_scale_at(int iteration, int total_iterations, double initial,
                      double floor, double decay_fraction) {
  const double horizon = std::max(1.0, decay_fraction * total_iterations);
  const double t = std::min(1.0, iteration / horizon);
  return std::max(floor, initial + (floor - initial) * t);
}

}  // namespace slicemkt
