#pragma once

// Enumerable 2-agent deterministic coordination MDP plus a value-iteration
// oracle. Test-only: the oracle never touches the training code.
//
// States 0..2 are live, 3 is terminal; both agents have actions {0,1}.
//   s0: (1,1) -> s1 r=0;  (0,0) -> terminal r=0.3;  mixed -> s2 r=0
//   s1: (1,1) -> terminal r=1.0;  otherwise terminal r=0
//   s2: any joint action -> terminal r=0.1
// The optimal policy coordinates (1,1) twice: V*(s0) = gamma * 1.

#include <array>
#include <memory>
#include <vector>

#include "coex/envs/env.hpp"

namespace coex::testing {

class ToyCoordMdp final : public coex::envs::Env {
 public:
  static constexpr int kStates = 4;  // 3 is terminal
  static constexpr int kAgents = 2;
  static constexpr int kActions = 2;

  struct Outcome {
    int next = 3;
    double reward = 0.0;
  };

  static Outcome dynamics(int state, int a0, int a1) {
    if (state == 0) {
      if (a0 == 1 && a1 == 1) return {1, 0.0};
      if (a0 == 0 && a1 == 0) return {3, 0.3};
      return {2, 0.0};
    }
    if (state == 1) {
      if (a0 == 1 && a1 == 1) return {3, 1.0};
      return {3, 0.0};
    }
    return {3, 0.1};  // state 2
  }

  coex::envs::EnvState reset(std::uint64_t) override { return begin_episode(); }

  coex::envs::EnvState begin_episode() override {
    state_ = 0;
    t_ = 0;
    return make_state();
  }

  coex::envs::StepResult step(const coex::envs::JointAction& a) override {
    const Outcome o = dynamics(state_, a[0], a[1]);
    state_ = o.next;
    t_ += 1;
    coex::envs::StepResult sr;
    sr.reward = o.reward;
    sr.done = state_ == 3;
    sr.next = make_state();
    return sr;
  }

  std::vector<int> action_space() const override { return {kActions, kActions}; }
  std::vector<double> global_state() const override { return encode(state_); }
  std::size_t num_agents() const override { return kAgents; }
  std::size_t state_dim() const override { return kStates; }
  std::size_t obs_dim() const override { return kStates; }
  std::unique_ptr<coex::envs::Env> clone() const override {
    return std::make_unique<ToyCoordMdp>(*this);
  }
  void reseed(std::uint64_t) override {}

  static std::vector<double> encode(int state) {
    std::vector<double> s(kStates, 0.0);
    s[static_cast<std::size_t>(state)] = 1.0;
    return s;
  }

 private:
  coex::envs::EnvState make_state() const {
    coex::envs::EnvState st;
    st.state = encode(state_);
    st.obs.assign(kAgents, st.state);
    st.t = t_;
    return st;
  }

  int state_ = 0;
  int t_ = 0;
};

/// Exact Q* by value iteration over the enumerated MDP.
struct ToyOracle {
  // q[state][a0*2+a1]
  std::array<std::array<double, 4>, 3> q{};
  std::array<double, 4> v{};  // v[3] = 0

  explicit ToyOracle(double gamma) {
    v.fill(0.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
      for (int s = 0; s < 3; ++s) {
        for (int a0 = 0; a0 < 2; ++a0) {
          for (int a1 = 0; a1 < 2; ++a1) {
            const ToyCoordMdp::Outcome o = ToyCoordMdp::dynamics(s, a0, a1);
            q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a0 * 2 + a1)] =
                o.reward + (o.next == 3 ? 0.0 : gamma * v[static_cast<std::size_t>(o.next)]);
          }
        }
      }
      for (int s = 0; s < 3; ++s) {
        double best = q[static_cast<std::size_t>(s)][0];
        for (int a = 1; a < 4; ++a) {
          best = std::max(best, q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]);
        }
        v[static_cast<std::size_t>(s)] = best;
      }
    }
  }
};

}  // namespace coex::testing
