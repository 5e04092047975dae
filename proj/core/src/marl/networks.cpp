#include "coex/marl/networks.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "coex/util/errors.hpp"

namespace coex::marl {

Variant parse_marl_variant(const std::string& name) {
  if (name == "coe") return Variant::coe;
  if (name == "cond-iq") return Variant::cond_iq;
  if (name == "cond-cq") return Variant::cond_cq;
  if (name == "ucb-ind") return Variant::ucb_ind;
  if (name == "ucb-cen") return Variant::ucb_cen;
  if (name == "eps-greedy") return Variant::eps_greedy;
  throw ConfigError("unknown variant: " + name);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::coe: return "coe";
    case Variant::cond_iq: return "cond-iq";
    case Variant::cond_cq: return "cond-cq";
    case Variant::ucb_ind: return "ucb-ind";
    case Variant::ucb_cen: return "ucb-cen";
    case Variant::eps_greedy: return "eps-greedy";
  }
  return "?";
}

MixerKind parse_mixer(const std::string& name) {
  if (name == "vdn") return MixerKind::vdn;
  if (name == "monotonic") return MixerKind::monotonic;
  throw ConfigError("unknown mixer: " + name);
}

std::string to_string(MixerKind m) {
  return m == MixerKind::vdn ? "vdn" : "monotonic";
}

void COEConfig::validate() const {
  if (c_act < 0.0 || c_rew < 0.0 || c_boot < 0.0) {
    throw ConfigError("optimism scales must be >= 0");
  }
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must be in [0,1]");
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (tau < 0.0 || tau > 1.0) throw ConfigError("tau must be in [0,1]");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (buffer_capacity < batch_size) throw ConfigError("buffer smaller than batch");
  if (train_interval < 1) throw ConfigError("train interval must be >= 1");
  if (feature_bits < 1 || feature_bits > 64) throw ConfigError("feature dim must be in 1..64");
  if (epsilon.anneal_steps < 1) throw ConfigError("epsilon anneal steps must be >= 1");
  if (epsilon.start < 0.0 || epsilon.start > 1.0 || epsilon.end < 0.0 || epsilon.end > 1.0) {
    throw ConfigError("epsilon must be in [0,1]");
  }
  if (hidden_dim < 1 || mixer_embed_dim < 1) throw ConfigError("network dims must be >= 1");
}

ParamVars::ParamVars(nd::Graph& g, const nd::ParamSet& params) {
  for (const auto& [name, entry] : params) {
    vars_.emplace(name, g.leaf(entry.value, /*tracked=*/true));
  }
}

nd::Var ParamVars::at(const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw ConfigError("no graph leaf for parameter " + name);
  return it->second;
}

nd::GradMap ParamVars::grads(const nd::Graph& g) const {
  nd::GradMap out;
  for (const auto& [name, var] : vars_) out.emplace(name, g.grad(var));
  return out;
}

void Mlp::init(nd::ParamSet& ps, std::mt19937_64& rng, bool zero_output) const {
  ps.add(prefix + ".w1", nd::init_uniform({in, hidden}, in, rng));
  ps.add(prefix + ".b1", nd::init_uniform({hidden}, in, rng));
  ps.add(prefix + ".w2", nd::init_uniform({hidden, hidden}, hidden, rng));
  ps.add(prefix + ".b2", nd::init_uniform({hidden}, hidden, rng));
  if (zero_output) {
    ps.add(prefix + ".w3", nd::Tensor::zeros({hidden, out}));
    ps.add(prefix + ".b3", nd::Tensor::zeros({out}));
  } else {
    ps.add(prefix + ".w3", nd::init_uniform({hidden, out}, hidden, rng));
    ps.add(prefix + ".b3", nd::init_uniform({out}, hidden, rng));
  }
}

nd::Tensor Mlp::forward(const nd::ParamSet& ps, const nd::Tensor& input) const {
  const std::size_t b = input.rows();
  auto layer = [&](const nd::Tensor& x, const std::string& w, const std::string& bias,
                   bool relu) {
    const nd::Tensor& wt = ps.at(prefix + w);
    const nd::Tensor& bt = ps.at(prefix + bias);
    nd::Tensor y({b, wt.cols()});
    for (std::size_t i = 0; i < b; ++i) {
      std::memcpy(y.data() + i * wt.cols(), bt.data(), wt.cols() * sizeof(double));
    }
    nd::gemm_acc(x.data(), wt.data(), y.data(), b, wt.rows(), wt.cols());
    if (relu) {
      for (std::size_t i = 0; i < y.numel(); ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
    }
    return y;
  };
  nd::Tensor h1 = layer(input, ".w1", ".b1", true);
  nd::Tensor h2 = layer(h1, ".w2", ".b2", true);
  return layer(h2, ".w3", ".b3", false);
}

std::vector<double> Mlp::forward(const nd::ParamSet& ps, std::span<const double> x) const {
  nd::Tensor input({1, in});
  std::memcpy(input.data(), x.data(), in * sizeof(double));
  nd::Tensor y = forward(ps, input);
  return std::vector<double>(y.data(), y.data() + out);
}

nd::Var Mlp::forward(nd::Graph& g, const ParamVars& pv, nd::Var input) const {
  nd::Var h1 = g.activation(g.affine(input, pv.at(prefix + ".w1"), pv.at(prefix + ".b1")),
                            nd::Act::relu);
  nd::Var h2 = g.activation(g.affine(h1, pv.at(prefix + ".w2"), pv.at(prefix + ".b2")),
                            nd::Act::relu);
  return g.affine(h2, pv.at(prefix + ".w3"), pv.at(prefix + ".b3"));
}

AgentNet::AgentNet(std::size_t obs_dim, std::size_t n_agents, int n_actions,
                   std::size_t hidden_dim, bool with_correction)
    : obs_dim_(obs_dim), n_(n_agents), k_(n_actions), with_correction_(with_correction) {
  if (n_ == 0 || k_ <= 0) throw ConfigError("agent net needs agents and actions");
  q_ = Mlp{q_input_dim(), hidden_dim, static_cast<std::size_t>(k_), "agent"};
  if (with_correction_ && n_ > 1) {
    corr_ = Mlp{corr_input_dim(), hidden_dim, static_cast<std::size_t>(k_), "corr"};
  } else {
    with_correction_ = with_correction_ && n_ > 1;
  }
}

void AgentNet::init(nd::ParamSet& ps, std::mt19937_64& rng) const {
  q_.init(ps, rng);
  // zero output layer: the dependent Q starts equal to the independent Q
  if (with_correction_) corr_.init(ps, rng, /*zero_output=*/true);
}

void AgentNet::write_q_input(std::span<const double> obs, std::size_t agent, double* dst) const {
  std::memcpy(dst, obs.data(), obs_dim_ * sizeof(double));
  std::fill(dst + obs_dim_, dst + obs_dim_ + n_, 0.0);
  dst[obs_dim_ + agent] = 1.0;
}

void AgentNet::write_corr_input(std::span<const double> obs, std::size_t agent,
                                std::span<const int> prefix, double* dst) const {
  write_q_input(obs, agent, dst);
  double* slots = dst + obs_dim_ + n_;
  std::fill(slots, slots + (n_ - 1) * static_cast<std::size_t>(k_), 0.0);
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    slots[j * static_cast<std::size_t>(k_) + static_cast<std::size_t>(prefix[j])] = 1.0;
  }
}

std::vector<double> AgentNet::q_values(const nd::ParamSet& ps, std::span<const double> obs,
                                       std::size_t agent) const {
  std::vector<double> input(q_input_dim());
  write_q_input(obs, agent, input.data());
  return q_.forward(ps, input);
}

std::vector<double> AgentNet::correction(const nd::ParamSet& ps, std::span<const double> obs,
                                         std::size_t agent, std::span<const int> prefix) const {
  if (!with_correction_) throw ConfigError("agent net has no correction head");
  std::vector<double> input(corr_input_dim());
  write_corr_input(obs, agent, prefix, input.data());
  return corr_.forward(ps, input);
}

Mixer::Mixer(MixerKind kind, std::size_t n_agents, std::size_t state_dim, std::size_t embed_dim)
    : kind_(kind), n_(n_agents), state_dim_(state_dim), embed_(embed_dim) {}

void Mixer::init(nd::ParamSet& ps, std::mt19937_64& rng) const {
  if (kind_ == MixerKind::vdn) return;
  ps.add("mixer.hw1", nd::init_uniform({state_dim_, n_ * embed_}, state_dim_, rng));
  ps.add("mixer.hb1", nd::init_uniform({n_ * embed_}, state_dim_, rng));
  ps.add("mixer.bw1", nd::init_uniform({state_dim_, embed_}, state_dim_, rng));
  ps.add("mixer.bb1", nd::init_uniform({embed_}, state_dim_, rng));
  ps.add("mixer.hw2", nd::init_uniform({state_dim_, embed_}, state_dim_, rng));
  ps.add("mixer.hb2", nd::init_uniform({embed_}, state_dim_, rng));
  ps.add("mixer.vw", nd::init_uniform({state_dim_, 1}, state_dim_, rng));
  ps.add("mixer.vb", nd::init_uniform({1}, state_dim_, rng));
}

double Mixer::forward(const nd::ParamSet& ps, std::span<const double> agent_qs,
                      std::span<const double> state) const {
  if (agent_qs.size() != n_) throw ConfigError("mixer: wrong number of agent values");
  if (kind_ == MixerKind::vdn) {
    double acc = 0.0;
    for (double q : agent_qs) acc += q;
    return acc;
  }
  auto affine_row = [&](const char* w, const char* b, std::vector<double>& out) {
    const nd::Tensor& wt = ps.at(w);
    const nd::Tensor& bt = ps.at(b);
    out.assign(bt.data(), bt.data() + bt.numel());
    for (std::size_t d = 0; d < state_dim_; ++d) {
      const double s = state[d];
      const double* row = wt.data() + d * wt.cols();
      for (std::size_t j = 0; j < wt.cols(); ++j) out[j] += s * row[j];
    }
  };
  std::vector<double> w1, b1, w2, v;
  affine_row("mixer.hw1", "mixer.hb1", w1);
  affine_row("mixer.bw1", "mixer.bb1", b1);
  affine_row("mixer.hw2", "mixer.hb2", w2);
  affine_row("mixer.vw", "mixer.vb", v);
  for (double& x : w1) x = std::fabs(x);
  for (double& x : w2) x = std::fabs(x);
  double out = v[0];
  for (std::size_t j = 0; j < embed_; ++j) {
    double h = b1[j];
    for (std::size_t i = 0; i < n_; ++i) h += agent_qs[i] * w1[i * embed_ + j];
    h = h > 0.0 ? h : std::expm1(h);  // elu
    out += h * w2[j];
  }
  return out;
}

nd::Var Mixer::forward(nd::Graph& g, const ParamVars& pv, nd::Var qcols,
                       const nd::Tensor& states) const {
  if (kind_ == MixerKind::vdn) return g.rowsum(qcols);
  nd::Var s = g.constant(states);
  nd::Var w1 = g.activation(g.affine(s, pv.at("mixer.hw1"), pv.at("mixer.hb1")), nd::Act::abs);
  nd::Var b1 = g.affine(s, pv.at("mixer.bw1"), pv.at("mixer.bb1"));
  nd::Var hidden =
      g.activation(g.add(g.bmm_vec_mat(qcols, w1, n_, embed_), b1), nd::Act::elu);
  nd::Var w2 = g.activation(g.affine(s, pv.at("mixer.hw2"), pv.at("mixer.hb2")), nd::Act::abs);
  nd::Var v = g.affine(s, pv.at("mixer.vw"), pv.at("mixer.vb"));
  return g.add(g.bmm_vec_mat(hidden, w2, embed_, 1), v);
}

}  // namespace coex::marl
