#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "coex/ndgrad/tensor.hpp"

namespace coex::nd {

enum class Act { relu, elu, abs };

/// Handle into a Graph; cheap to copy.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

/// Reverse-mode tape over dense tensors. A graph is built fresh for each
/// loss evaluation; nodes are appended in topological order, so backward is
/// a single reverse sweep. Gradients accumulate into tracked nodes only.
class Graph {
 public:
  Var leaf(Tensor value, bool tracked = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  const Tensor& value(Var v) const { return nodes_[v.idx].value; }
  const Tensor& grad(Var v) const { return nodes_[v.idx].grad; }
  double scalar_value(Var v) const { return nodes_[v.idx].value[0]; }
  std::size_t size() const { return nodes_.size(); }

  /// y = x W + b with x (m x k), W (k x p), b (p). Gradients flow to all
  /// three inputs.
  Var affine(Var x, Var w, Var b);
  Var matmul(Var a, Var b);
  Var activation(Var x, Act kind);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double c);
  /// (m x n) -> (m x 1) row sums.
  Var rowsum(Var x);
  /// Mean of squared differences; the target is a detached constant, so the
  /// backward pass reaches pred only.
  Var mse(Var pred, Tensor target);
  /// out[i] = x[i, idx[i]]; (m x n) -> (m x 1).
  Var gather_cols(Var x, std::vector<std::size_t> idx);
  /// Column-wise concatenation of same-height matrices.
  Var hstack(const std::vector<Var>& parts);
  /// Per-row vector-matrix product: v (m x r), wflat (m x r*c) holding a
  /// row-major (r x c) matrix per row; out (m x c). Both sides get gradients.
  Var bmm_vec_mat(Var v, Var wflat, std::size_t r, std::size_t c);

  /// Seeds d(loss)=1 and sweeps the tape in reverse. loss must be scalar.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated only when tracked
    bool tracked = false;
    std::function<void(Graph&)> backprop;
  };

  Var push(Tensor value, bool tracked, std::function<void(Graph&)> backprop);
  Node& node(Var v) { return nodes_[v.idx]; }
  bool tracked(Var v) const { return nodes_[v.idx].tracked; }

  std::vector<Node> nodes_;
};

}  // namespace coex::nd
