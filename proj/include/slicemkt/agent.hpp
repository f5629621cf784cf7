#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "slicemkt/mlp.hpp"

namespace slicemkt {

// Target bootstrap for the critic: Standard follows the target actor's next
// action; StackelbergMax maximizes the target critic over a discretization of
// the agent's own next action.
enum class TargetMode { Standard, StackelbergMax };

struct AgentConfig {
  int state_dim = 0;
  int action_dim = 1;
  int joint_action_dim = 1;  // critic sees all agents' actions
  int own_action_offset = 0; // slice of this agent inside the joint vector
  int hidden = 128;
  double gamma = 0.9;
  double tau = 0.001;
  double lr_actor = 0.001;
  double lr_critic = 0.001;
  TargetMode target_mode = TargetMode::Standard;
  int own_action_points = 16;  // discretization for StackelbergMax
};

// Actor, critic and their target copies. Targets start bit-identical to the
// online networks.
struct AgentNet {
  AgentConfig cfg;
  Mlp actor, critic, target_actor, target_critic;
  Adam actor_opt, critic_opt;

  AgentNet(const AgentConfig& cfg, std::uint64_t seed);

  // Deterministic policy action for a single state.
  Eigen::VectorXd act(const Eigen::VectorXd& state) const;
};

// y = r + gamma * Q'(s', a') with a' = next joint actions; the agent's own
// slice is replaced by its target actor's action (Standard) or maximized over
// its own-action grid (StackelbergMax). Columns are samples.
Eigen::VectorXd critic_targets(const AgentNet& agent,
                               const Eigen::VectorXd& rewards,
                               const Eigen::MatrixXd& next_states,
                               const Eigen::MatrixXd& next_joint_actions);

// One squared-TD-error minimization step; returns the pre-step loss.
double critic_update(AgentNet& agent, const Eigen::MatrixXd& states,
                     const Eigen::MatrixXd& joint_actions,
                     const Eigen::VectorXd& rewards,
                     const Eigen::MatrixXd& next_states,
                     const Eigen::MatrixXd& next_joint_actions);

// Deterministic policy gradient ascent step; other agents' actions come from
// the batch. Returns the mean critic value at the actor's actions.
double actor_update(AgentNet& agent, const Eigen::MatrixXd& states,
                    const Eigen::MatrixXd& joint_actions);

void soft_update_targets(AgentNet& agent);

// Gaussian exploration noise, clipped to [-1, 1].
Eigen::VectorXd explore(const Eigen::VectorXd& action, double noise_scale,
                        std::mt19937_64& rng);

// Linear decay from `initial` to `floor` over the first decay_fraction of the
// run, flat afterwards.
double noise_scale_at(int iteration, int total_iterations, double initial,
                      double floor, double decay_fraction);

}  // namespace slicemkt
