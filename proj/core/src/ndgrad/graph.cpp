#include "coex/ndgrad/graph.hpp"

#include <cmath>
#include <memory>

#include "coex/util/errors.hpp"

namespace coex::nd {

Var Graph::push(Tensor value, bool is_tracked, std::function<void(Graph&)> backprop) {
  Node n;
  n.value = std::move(value);
  n.tracked = is_tracked;
  if (is_tracked) n.grad = Tensor::zeros(n.value.shape());
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Graph::leaf(Tensor value, bool is_tracked) {
  return push(std::move(value), is_tracked, nullptr);
}

Var Graph::affine(Var x, Var w, Var b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  const std::size_t m = xv.rows(), k = xv.cols(), p = wv.cols();
  if (wv.rows() != k || bv.numel() != p) {
    throw ConfigError("affine: shapes not conformable");
  }
  Tensor out({m, p});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) out.at(i, j) = bv[j];
  }
  gemm_acc(xv.data(), wv.data(), out.data(), m, k, p);

  bool tr = tracked(x) || tracked(w) || tracked(b);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [x, w, b, yi, m, k, p](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      const Tensor& xv2 = g.nodes_[x.idx].value;
      const Tensor& wv2 = g.nodes_[w.idx].value;
      if (g.tracked(x)) {
        gemm_bt_acc(gy.data(), wv2.data(), g.nodes_[x.idx].grad.data(), m, p, k);
      }
      if (g.tracked(w)) {
        gemm_at_acc(xv2.data(), gy.data(), g.nodes_[w.idx].grad.data(), k, m, p);
      }
      if (g.tracked(b)) {
        Tensor& gb = g.nodes_[b.idx].grad;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < p; ++j) gb[j] += gy.at(i, j);
        }
      }
    };
  }
  return y;
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  const std::size_t m = av.rows(), k = av.cols(), p = bv.cols();
  if (bv.rows() != k) throw ConfigError("matmul: shapes not conformable");
  Tensor out({m, p});
  gemm_acc(av.data(), bv.data(), out.data(), m, k, p);
  bool tr = tracked(a) || tracked(b);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [a, b, yi, m, k, p](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      if (g.tracked(a)) {
        gemm_bt_acc(gy.data(), g.nodes_[b.idx].value.data(), g.nodes_[a.idx].grad.data(), m, p, k);
      }
      if (g.tracked(b)) {
        gemm_at_acc(g.nodes_[a.idx].value.data(), gy.data(), g.nodes_[b.idx].grad.data(), k, m, p);
      }
    };
  }
  return y;
}

Var Graph::activation(Var x, Act kind) {
  const Tensor& xv = value(x);
  Tensor out(xv.shape());
  const std::size_t n = xv.numel();
  switch (kind) {
    case Act::relu:
      for (std::size_t i = 0; i < n; ++i) out[i] = xv[i] > 0.0 ? xv[i] : 0.0;
      break;
    case Act::elu:
      for (std::size_t i = 0; i < n; ++i) out[i] = xv[i] > 0.0 ? xv[i] : std::expm1(xv[i]);
      break;
    case Act::abs:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(xv[i]);
      break;
  }
  bool tr = tracked(x);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [x, yi, kind, n](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      const Tensor& xv2 = g.nodes_[x.idx].value;
      Tensor& gx = g.nodes_[x.idx].grad;
      switch (kind) {
        case Act::relu:
          for (std::size_t i = 0; i < n; ++i) gx[i] += xv2[i] > 0.0 ? gy[i] : 0.0;
          break;
        case Act::elu:
          for (std::size_t i = 0; i < n; ++i) {
            gx[i] += xv2[i] > 0.0 ? gy[i] : gy[i] * std::exp(xv2[i]);
          }
          break;
        case Act::abs:
          // subgradient 0 at exactly 0
          for (std::size_t i = 0; i < n; ++i) {
            if (xv2[i] > 0.0) {
              gx[i] += gy[i];
            } else if (xv2[i] < 0.0) {
              gx[i] -= gy[i];
            }
          }
          break;
      }
    };
  }
  return y;
}

namespace {
void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) throw ConfigError(std::string(op) + ": shape mismatch");
}
}  // namespace

Var Graph::add(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape(av, bv, "add");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] + bv[i];
  bool tr = tracked(a) || tracked(b);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [a, b, yi](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      if (g.tracked(a)) {
        Tensor& ga = g.nodes_[a.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i];
      }
      if (g.tracked(b)) {
        Tensor& gb = g.nodes_[b.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) gb[i] += gy[i];
      }
    };
  }
  return y;
}

Var Graph::sub(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape(av, bv, "sub");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] - bv[i];
  bool tr = tracked(a) || tracked(b);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [a, b, yi](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      if (g.tracked(a)) {
        Tensor& ga = g.nodes_[a.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i];
      }
      if (g.tracked(b)) {
        Tensor& gb = g.nodes_[b.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) gb[i] -= gy[i];
      }
    };
  }
  return y;
}

Var Graph::mul(Var a, Var b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  check_same_shape(av, bv, "mul");
  Tensor out(av.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] * bv[i];
  bool tr = tracked(a) || tracked(b);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [a, b, yi](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      const Tensor& av2 = g.nodes_[a.idx].value;
      const Tensor& bv2 = g.nodes_[b.idx].value;
      if (g.tracked(a)) {
        Tensor& ga = g.nodes_[a.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) ga[i] += gy[i] * bv2[i];
      }
      if (g.tracked(b)) {
        Tensor& gb = g.nodes_[b.idx].grad;
        for (std::size_t i = 0; i < gy.numel(); ++i) gb[i] += gy[i] * av2[i];
      }
    };
  }
  return y;
}

Var Graph::scale(Var x, double c) {
  const Tensor& xv = value(x);
  Tensor out(xv.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = xv[i] * c;
  bool tr = tracked(x);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [x, yi, c](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      Tensor& gx = g.nodes_[x.idx].grad;
      for (std::size_t i = 0; i < gy.numel(); ++i) gx[i] += gy[i] * c;
    };
  }
  return y;
}

Var Graph::rowsum(Var x) {
  const Tensor& xv = value(x);
  const std::size_t m = xv.rows(), n = xv.cols();
  Tensor out({m, 1});
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += xv.at(i, j);
    out[i] = acc;
  }
  bool tr = tracked(x);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [x, yi, m, n](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      Tensor& gx = g.nodes_[x.idx].grad;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += gy[i];
      }
    };
  }
  return y;
}

Var Graph::mse(Var pred, Tensor target) {
  const Tensor& pv = value(pred);
  check_same_shape(pv, target, "mse");
  const std::size_t n = pv.numel();
  if (n == 0) throw ConfigError("mse: empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pv[i] - target[i];
    acc += d * d;
  }
  Tensor out({1}, {acc / static_cast<double>(n)});
  bool tr = tracked(pred);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    auto tgt = std::make_shared<Tensor>(std::move(target));
    nodes_[yi].backprop = [pred, yi, tgt, n](Graph& g) {
      const double gy = g.nodes_[yi].grad[0];
      const Tensor& pv2 = g.nodes_[pred.idx].value;
      Tensor& gp = g.nodes_[pred.idx].grad;
      const double scale = 2.0 * gy / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) gp[i] += scale * (pv2[i] - (*tgt)[i]);
    };
  }
  return y;
}

Var Graph::gather_cols(Var x, std::vector<std::size_t> idx) {
  const Tensor& xv = value(x);
  const std::size_t m = xv.rows(), n = xv.cols();
  if (idx.size() != m) throw ConfigError("gather_cols: one index per row required");
  Tensor out({m, 1});
  for (std::size_t i = 0; i < m; ++i) {
    if (idx[i] >= n) throw ConfigError("gather_cols: column index out of range");
    out[i] = xv.at(i, idx[i]);
  }
  bool tr = tracked(x);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    auto ids = std::make_shared<std::vector<std::size_t>>(std::move(idx));
    nodes_[yi].backprop = [x, yi, ids, n](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      Tensor& gx = g.nodes_[x.idx].grad;
      for (std::size_t i = 0; i < ids->size(); ++i) gx[i * n + (*ids)[i]] += gy[i];
    };
  }
  return y;
}

Var Graph::hstack(const std::vector<Var>& parts) {
  if (parts.empty()) throw ConfigError("hstack: no parts");
  const std::size_t m = value(parts[0]).rows();
  std::size_t total = 0;
  bool tr = false;
  for (Var p : parts) {
    if (value(p).rows() != m) throw ConfigError("hstack: row mismatch");
    total += value(p).cols();
    tr = tr || tracked(p);
  }
  Tensor out({m, total});
  std::size_t off = 0;
  for (Var p : parts) {
    const Tensor& pv = value(p);
    const std::size_t c = pv.cols();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < c; ++j) out.at(i, off + j) = pv.at(i, j);
    }
    off += c;
  }
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    auto ps = std::make_shared<std::vector<Var>>(parts);
    nodes_[yi].backprop = [yi, ps, m, total](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      std::size_t off2 = 0;
      for (Var p : *ps) {
        const std::size_t c = g.nodes_[p.idx].value.cols();
        if (g.tracked(p)) {
          Tensor& gp = g.nodes_[p.idx].grad;
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < c; ++j) gp[i * c + j] += gy[i * total + off2 + j];
          }
        }
        off2 += c;
      }
    };
  }
  return y;
}

Var Graph::bmm_vec_mat(Var v, Var wflat, std::size_t r, std::size_t c) {
  const Tensor& vv = value(v);
  const Tensor& wv = value(wflat);
  const std::size_t m = vv.rows();
  if (vv.cols() != r || wv.rows() != m || wv.cols() != r * c) {
    throw ConfigError("bmm_vec_mat: shapes not conformable");
  }
  Tensor out({m, c});
  for (std::size_t s = 0; s < m; ++s) {
    const double* vs = vv.data() + s * r;
    const double* ws = wv.data() + s * r * c;
    double* os = out.data() + s * c;
    for (std::size_t i = 0; i < r; ++i) {
      const double vi = vs[i];
      for (std::size_t j = 0; j < c; ++j) os[j] += vi * ws[i * c + j];
    }
  }
  bool tr = tracked(v) || tracked(wflat);
  Var y = push(std::move(out), tr, nullptr);
  if (tr) {
    int yi = y.idx;
    nodes_[yi].backprop = [v, wflat, yi, m, r, c](Graph& g) {
      const Tensor& gy = g.nodes_[yi].grad;
      const Tensor& vv2 = g.nodes_[v.idx].value;
      const Tensor& wv2 = g.nodes_[wflat.idx].value;
      for (std::size_t s = 0; s < m; ++s) {
        const double* gs = gy.data() + s * c;
        const double* vs = vv2.data() + s * r;
        const double* ws = wv2.data() + s * r * c;
        if (g.tracked(v)) {
          double* gv = g.nodes_[v.idx].grad.data() + s * r;
          for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < c; ++j) acc += gs[j] * ws[i * c + j];
            gv[i] += acc;
          }
        }
        if (g.tracked(wflat)) {
          double* gw = g.nodes_[wflat.idx].grad.data() + s * r * c;
          for (std::size_t i = 0; i < r; ++i) {
            const double vi = vs[i];
            for (std::size_t j = 0; j < c; ++j) gw[i * c + j] += gs[j] * vi;
          }
        }
      }
    };
  }
  return y;
}

void Graph::backward(Var loss) {
  if (!loss.valid() || value(loss).numel() != 1) {
    throw ConfigError("backward: loss must be a scalar");
  }
  if (!nodes_[loss.idx].tracked) return;  // nothing depends on tracked inputs
  nodes_[loss.idx].grad[0] = 1.0;
  for (int i = loss.idx; i >= 0; --i) {
    if (nodes_[i].tracked && nodes_[i].backprop) nodes_[i].backprop(*this);
  }
}

}  // namespace coex::nd
