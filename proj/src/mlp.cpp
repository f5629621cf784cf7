#include "slicemkt/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace slicemkt {

namespace {

Eigen::MatrixXd uniform_init(int rows, int cols, std::mt19937_64& rng) {
  // +-1/sqrt(fan_in)
  const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = dist(rng);
  return m;
}

void write_matrix(std::ostream& os, const char* tag, const Eigen::MatrixXd& m) {
  os << tag << ' ' << m.rows() << ' ' << m.cols();
  char buf[32];
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      os << ' ' << buf;
    }
  os << '\n';
}

Eigen::MatrixXd read_matrix(std::istream& is, const std::string& expect_tag) {
  std::string tag;
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> tag >> rows >> cols) || tag != expect_tag)
    throw std::runtime_error("mlp_load: bad checkpoint near tag " + expect_tag);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      if (!(is >> m(r, c))) throw std::runtime_error("mlp_load: truncated matrix");
  return m;
}

}  // namespace

Mlp::Mlp(int in_dim, int hidden_dim, int out_dim, OutputActivation act,
         std::mt19937_64& rng)
    : in(in_dim), hidden(hidden_dim), out(out_dim), out_act(act) {
  if (in <= 0 || hidden <= 0 || out <= 0)
    throw std::invalid_argument("Mlp: non-positive layer size");
  w1 = uniform_init(hidden, in, rng);
  b1 = Eigen::VectorXd::Zero(hidden);
  w2 = uniform_init(hidden, hidden, rng);
  b2 = Eigen::VectorXd::Zero(hidden);
  w3 = uniform_init(out, hidden, rng);
  b3 = Eigen::VectorXd::Zero(out);
}

std::size_t Mlp::num_params() const {
  return static_cast<std::size_t>(w1.size() + w2.size() + w3.size() + b1.size() +
                                  b2.size() + b3.size());
}

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x,
                            MlpCache* cache) {
  if (x.rows() != net.in) throw std::invalid_argument("mlp_forward: input dim mismatch");
  if (!x.allFinite()) throw std::invalid_argument("mlp_forward: non-finite input");
  Eigen::MatrixXd z1 = (net.w1 * x).colwise() + net.b1;
  Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
  Eigen::MatrixXd z2 = (net.w2 * a1).colwise() + net.b2;
  Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
  Eigen::MatrixXd y = (net.w3 * a2).colwise() + net.b3;
  if (net.out_act == OutputActivation::Tanh) y = y.array().tanh();
  if (cache) {
    cache->x = x;
    cache->z1 = std::move(z1);
    cache->a1 = std::move(a1);
    cache->z2 = std::move(z2);
    cache->a2 = std::move(a2);
    cache->y = y;
  }
  return y;
}

void MlpGrads::set_zero(const Mlp& net) {
  w1 = Eigen::MatrixXd::Zero(net.w1.rows(), net.w1.cols());
  w2 = Eigen::MatrixXd::Zero(net.w2.rows(), net.w2.cols());
  w3 = Eigen::MatrixXd::Zero(net.w3.rows(), net.w3.cols());
  b1 = Eigen::VectorXd::Zero(net.b1.size());
  b2 = Eigen::VectorXd::Zero(net.b2.size());
  b3 = Eigen::VectorXd::Zero(net.b3.size());
  input.resize(0, 0);
}

MlpGrads mlp_backward(const Mlp& net, const MlpCache& cache,
                      const Eigen::MatrixXd& upstream) {
  if (cache.x.size() == 0)
    throw std::logic_error("mlp_backward: forward cache missing");
  if (upstream.rows() != net.out || upstream.cols() != cache.x.cols())
    throw std::invalid_argument("mlp_backward: upstream shape mismatch");

  Eigen::MatrixXd dz3 = upstream;
  if (net.out_act == OutputActivation::Tanh)
    dz3.array() *= 1.0 - cache.y.array().square();

  MlpGrads g;
  g.w3.noalias() = dz3 * cache.a2.transpose();
  g.b3 = dz3.rowwise().sum();

  Eigen::MatrixXd dz2 = net.w3.transpose() * dz3;
  dz2.array() *= (cache.z2.array() > 0.0).cast<double>();
  g.w2.noalias() = dz2 * cache.a1.transpose();
  g.b2 = dz2.rowwise().sum();

  Eigen::MatrixXd dz1 = net.w2.transpose() * dz2;
  dz1.array() *= (cache.z1.array() > 0.0).cast<double>();
  g.w1.noalias() = dz1 * cache.x.transpose();
  g.b1 = dz1.rowwise().sum();

  g.input.noalias() = net.w1.transpose() * dz1;
  return g;
}

void Adam::init(const Mlp& net) {
  m_.set_zero(net);
  v_.set_zero(net);
  step_count = 0;
  ready_ = true;
}

void Adam::step(Mlp& net, const MlpGrads& g) {
  if (!ready_) init(net);
  ++step_count;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  auto update = [&](auto& param, auto& m, auto& v, const auto& grad) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    param.array() -=
        lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
  };
  update(net.w1, m_.w1, v_.w1, g.w1);
  update(net.w2, m_.w2, v_.w2, g.w2);
  update(net.w3, m_.w3, v_.w3, g.w3);
  update(net.b1, m_.b1, v_.b1, g.b1);
  update(net.b2, m_.b2, v_.b2, g.b2);
  update(net.b3, m_.b3, v_.b3, g.b3);
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.in != online.in || target.hidden != online.hidden ||
      target.out != online.out)
    throw std::invalid_argument("soft_update: shape mismatch");
  target.w1 = tau * online.w1 + (1.0 - tau) * target.w1;
  target.w2 = tau * online.w2 + (1.0 - tau) * target.w2;
  target.w3 = tau * online.w3 + (1.0 - tau) * target.w3;
  target.b1 = tau * online.b1 + (1.0 - tau) * target.b1;
  target.b2 = tau * online.b2 + (1.0 - tau) * target.b2;
  target.b3 = tau * online.b3 + (1.0 - tau) * target.b3;
}

void mlp_save(std::ostream& os, const Mlp& net) {
  os << "slicemkt-mlp v1 " << net.in << ' ' << net.hidden << ' ' << net.out << ' '
     << (net.out_act == OutputActivation::Tanh ? "tanh" : "identity") << '\n';
  write_matrix(os, "W1", net.w1);
  write_matrix(os, "b1", net.b1);
  write_matrix(os, "W2", net.w2);
  write_matrix(os, "b2", net.b2);
  write_matrix(os, "W3", net.w3);
  write_matrix(os, "b3", net.b3);
}

Mlp mlp_load(std::istream& is) {
  std::string magic, version, act;
  Mlp net;
  if (!(is >> magic >> version >> net.in >> net.hidden >> net.out >> act) ||
      magic != "slicemkt-mlp" || version != "v1")
    throw std::runtime_error("mlp_load: bad checkpoint header");
  net.out_act = act == "tanh" ? OutputActivation::Tanh : OutputActivation::Identity;
  net.w1 = read_matrix(is, "W1");
  net.b1 = read_matrix(is, "b1");
  net.w2 = read_matrix(is, "W2");
  net.b2 = read_matrix(is, "b2");
  net.w3 = read_matrix(is, "W3");
  net.b3 = read_matrix(is, "b3");
  return net;
}

}  // namespace slicemkt
