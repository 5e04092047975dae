#pragma once

#include <cstdint>
#include <string>

#include "coex/ndgrad/params.hpp"

namespace coex::marl {

enum class Variant { coe, cond_iq, cond_cq, ucb_ind, ucb_cen, eps_greedy };
enum class MixerKind { vdn, monotonic };

Variant parse_marl_variant(const std::string& name);
std::string to_string(Variant v);
MixerKind parse_mixer(const std::string& name);
std::string to_string(MixerKind m);

/// Linear epsilon anneal from start to end over anneal_steps.
struct EpsSchedule {
  double start = 1.0;
  double end = 0.0;
  std::uint64_t anneal_steps = 50000;

  double at(std::uint64_t step) const {
    if (step >= anneal_steps) return end;
    const double frac = static_cast<double>(step) / static_cast<double>(anneal_steps);
    return start + (end - start) * frac;
  }
};

struct COEConfig {
  Variant variant = Variant::coe;
  MixerKind mixer = MixerKind::monotonic;
  double c_act = 0.01;
  double c_rew = 0.0;
  double c_boot = 0.0;
  double gamma = 0.99;
  double lr = 3e-4;
  std::size_t batch_size = 32;
  std::size_t buffer_capacity = 50000;
  double tau = 0.01;
  std::uint64_t train_interval = 1;
  std::size_t feature_bits = 8;  // SimHash feature dimension k
  EpsSchedule epsilon;
  std::size_t hidden_dim = 64;
  std::size_t mixer_embed_dim = 32;
  bool standardize_rewards = true;
  bool exact_counting = false;   // bypass SimHash (discrete-state oracle mode)
  bool permute_order = false;    // per-episode random action-computation order
  bool freeze_correction = false;  // diagnostic: keep correction nets at init
  nd::OptimRule optim_rule = nd::OptimRule::adam;

  void validate() const;
};

}  // namespace coex::marl
