#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>

namespace slicemkt {

enum class OutputActivation { Tanh, Identity };

// Fixed-topology 3-layer perceptron: relu, relu, then tanh (actors) or
// identity (critics). Columns are samples, so batched passes are GEMMs.
struct Mlp {
  int in = 0;
  int hidden = 128;
  int out = 0;
  OutputActivation out_act = OutputActivation::Tanh;

  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;

  Mlp() = default;
  Mlp(int in_dim, int hidden_dim, int out_dim, OutputActivation act,
      std::mt19937_64& rng);

  std::size_t num_params() const;
};

struct MlpCache {
  Eigen::MatrixXd x, z1, a1, z2, a2, y;
};

// Forward pass over a batch (columns). Throws on non-finite input.
Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x,
                            MlpCache* cache = nullptr);

struct MlpGrads {
  Eigen::MatrixXd w1, w2, w3;
  Eigen::VectorXd b1, b2, b3;
  Eigen::MatrixXd input;  // gradient w.r.t. the input batch

  void set_zero(const Mlp& net);
};

// Reverse-mode gradients of sum_i <upstream_i, y_i> through the cached pass.
MlpGrads mlp_backward(const Mlp& net, const MlpCache& cache,
                      const Eigen::MatrixXd& upstream);

// Adam with bias correction; a zero gradient leaves parameters unchanged.
struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;

  void init(const Mlp& net);
  void step(Mlp& net, const MlpGrads& g);

 private:
  MlpGrads m_, v_;
  bool ready_ = false;
};

// theta' <- tau * theta + (1 - tau) * theta'
void soft_update(Mlp& target, const Mlp& online, double tau);

// Versioned line-oriented checkpoint; save -> load -> save is byte-identical.
void mlp_save(std::ostream& os, const Mlp& net);
Mlp mlp_load(std::istream& is);

}  // namespace slicemkt
