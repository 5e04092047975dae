#pragma once

#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "coex/marl/config.hpp"
#include "coex/ndgrad/graph.hpp"
#include "coex/ndgrad/params.hpp"

namespace coex::marl {

/// Tracked graph leaves for every tensor of a ParamSet; build once per graph.
class ParamVars {
 public:
  ParamVars(nd::Graph& g, const nd::ParamSet& params);
  nd::Var at(const std::string& name) const;
  /// Gradients of all leaves after backward.
  nd::GradMap grads(const nd::Graph& g) const;

 private:
  std::map<std::string, nd::Var> vars_;
};

/// Two-hidden-layer perceptron, relu hidden activations. Parameters live in
/// a ParamSet under <prefix>.{w1,b1,w2,b2,w3,b3}.
struct Mlp {
  std::size_t in = 0;
  std::size_t hidden = 0;
  std::size_t out = 0;
  std::string prefix;

  void init(nd::ParamSet& ps, std::mt19937_64& rng, bool zero_output = false) const;
  std::vector<double> forward(const nd::ParamSet& ps, std::span<const double> x) const;
  nd::Tensor forward(const nd::ParamSet& ps, const nd::Tensor& input) const;
  nd::Var forward(nd::Graph& g, const ParamVars& pv, nd::Var input) const;
};

/// Shared-parameter per-agent Q function over (observation + one-hot agent
/// identity). Dependent variants add a correction head that also sees a
/// multi-hot encoding of the already-computed predecessor actions; the
/// dependent Q is the sum of the independent Q and the correction.
class AgentNet {
 public:
  AgentNet(std::size_t obs_dim, std::size_t n_agents, int n_actions, std::size_t hidden_dim,
           bool with_correction);

  void init(nd::ParamSet& ps, std::mt19937_64& rng) const;

  std::size_t q_input_dim() const { return obs_dim_ + n_; }
  std::size_t corr_input_dim() const {
    return obs_dim_ + n_ + (n_ - 1) * static_cast<std::size_t>(k_);
  }

  /// Writes observation + one-hot identity into dst (q_input_dim doubles).
  void write_q_input(std::span<const double> obs, std::size_t agent, double* dst) const;
  /// As write_q_input plus (n-1) x k multi-hot slots: slot j holds the j-th
  /// predecessor's action, remaining slots zero.
  void write_corr_input(std::span<const double> obs, std::size_t agent,
                        std::span<const int> prefix, double* dst) const;

  std::vector<double> q_values(const nd::ParamSet& ps, std::span<const double> obs,
                               std::size_t agent) const;
  std::vector<double> correction(const nd::ParamSet& ps, std::span<const double> obs,
                                 std::size_t agent, std::span<const int> prefix) const;

  const Mlp& q_mlp() const { return q_; }
  const Mlp& corr_mlp() const { return corr_; }
  bool has_correction() const { return with_correction_; }
  std::size_t n_agents() const { return n_; }
  int n_actions() const { return k_; }

 private:
  std::size_t obs_dim_;
  std::size_t n_;
  int k_;
  bool with_correction_;
  Mlp q_;
  Mlp corr_;
};

/// Joint-value mixing function. vdn sums the per-agent values; monotonic
/// generates nonnegative mixing weights from the global state through an
/// absolute-value transform (two mixing layers plus a state bias), so
/// dQ_joint/dQ_i >= 0 everywhere.
class Mixer {
 public:
  Mixer(MixerKind kind, std::size_t n_agents, std::size_t state_dim, std::size_t embed_dim);

  void init(nd::ParamSet& ps, std::mt19937_64& rng) const;
  double forward(const nd::ParamSet& ps, std::span<const double> agent_qs,
                 std::span<const double> state) const;
  /// qcols (batch x n), states (batch x state_dim) -> (batch x 1).
  nd::Var forward(nd::Graph& g, const ParamVars& pv, nd::Var qcols,
                  const nd::Tensor& states) const;

  MixerKind kind() const { return kind_; }
  bool has_params() const { return kind_ == MixerKind::monotonic; }

 private:
  MixerKind kind_;
  std::size_t n_;
  std::size_t state_dim_;
  std::size_t embed_;
};

}  // namespace coex::marl
