// Minimal reverse-mode differentiation tape.
//
// Nodes are appended in evaluation order and hold their forward value plus
// an adjoint buffer; backward() seeds the scalar output with 1 and visits
// the nodes in exact reverse order. Values are row-major (rows x cols)
// buffers; vectors have cols = 1.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikerl/numeric.hpp"

namespace spikerl {

class Tape {
 public:
  using NodeId = int;

  NodeId value(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return push(Op::Leaf, -1, -1, n, 1, std::move(v));
  }

  NodeId value_matrix(std::vector<double> v, int rows, int cols) {
    if (static_cast<int>(v.size()) != rows * cols) {
      throw std::invalid_argument("tape: matrix payload does not match shape");
    }
    return push(Op::Leaf, -1, -1, rows, cols, std::move(v));
  }

  NodeId scalar(double v) { return value({v}); }

  NodeId add(NodeId a, NodeId b) {
    check_same_size(a, b, "add");
    auto v = node(a).val;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += node(b).val[i];
    return push(Op::Add, a, b, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId sub(NodeId a, NodeId b) {
    check_same_size(a, b, "sub");
    auto v = node(a).val;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= node(b).val[i];
    return push(Op::Sub, a, b, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId mul(NodeId a, NodeId b) {
    check_same_size(a, b, "mul");
    auto v = node(a).val;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= node(b).val[i];
    return push(Op::Mul, a, b, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId scale(NodeId a, double c) {
    auto v = node(a).val;
    for (double& x : v) x *= c;
    const NodeId id = push(Op::Scale, a, -1, node(a).rows, node(a).cols, std::move(v));
    node(id).c = c;
    return id;
  }

  // y = A x with A rows x cols and x a cols-vector.
  NodeId matvec(NodeId a, NodeId x) {
    const auto& A = node(a);
    const auto& X = node(x);
    if (X.cols != 1 || A.cols != X.rows) throw std::invalid_argument("tape: matvec shape mismatch");
    std::vector<double> v(static_cast<std::size_t>(A.rows), 0.0);
    for (int i = 0; i < A.rows; ++i) {
      double acc = 0.0;
      for (int j = 0; j < A.cols; ++j) {
        acc += A.val[static_cast<std::size_t>(i) * A.cols + j] * X.val[static_cast<std::size_t>(j)];
      }
      v[static_cast<std::size_t>(i)] = acc;
    }
    return push(Op::MatVec, a, x, A.rows, 1, std::move(v));
  }

  NodeId sigmoid(NodeId a) {
    auto v = node(a).val;
    for (double& x : v) x = spikerl::sigmoid(x);
    return push(Op::Sigmoid, a, -1, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId exp(NodeId a) {
    auto v = node(a).val;
    for (double& x : v) x = std::exp(x);
    return push(Op::Exp, a, -1, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId log(NodeId a) {
    auto v = node(a).val;
    for (double& x : v) x = std::log(x);
    return push(Op::Log, a, -1, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId softmax(NodeId a) {
    auto v = spikerl::softmax(node(a).val);
    return push(Op::Softmax, a, -1, node(a).rows, node(a).cols, std::move(v));
  }

  NodeId gather(NodeId a, int index) {
    if (index < 0 || index >= static_cast<int>(node(a).val.size())) {
      throw std::out_of_range("tape: gather index out of range");
    }
    std::vector<double> v{node(a).val[static_cast<std::size_t>(index)]};
    const NodeId id = push(Op::Gather, a, -1, 1, 1, std::move(v));
    node(id).index = index;
    return id;
  }

  NodeId sum(NodeId a) {
    double acc = 0.0;
    for (double x : node(a).val) acc += x;
    return push(Op::Sum, a, -1, 1, 1, {acc});
  }

  NodeId broadcast(NodeId a, int n) {
    if (node(a).val.size() != 1) throw std::invalid_argument("tape: broadcast expects a scalar");
    std::vector<double> v(static_cast<std::size_t>(n), node(a).val[0]);
    return push(Op::Broadcast, a, -1, n, 1, std::move(v));
  }

  // Same buffer, new shape.
  NodeId reshape(NodeId a, int rows, int cols) {
    if (static_cast<int>(node(a).val.size()) != rows * cols) {
      throw std::invalid_argument("tape: reshape size mismatch");
    }
    auto v = node(a).val;
    return push(Op::Reshape, a, -1, rows, cols, std::move(v));
  }

  NodeId concat(std::span<const NodeId> parts) {
    std::vector<double> v;
    for (NodeId p : parts) v.insert(v.end(), node(p).val.begin(), node(p).val.end());
    const int n = static_cast<int>(v.size());
    const NodeId id = push(Op::Concat, -1, -1, n, 1, std::move(v));
    node(id).srcs.assign(parts.begin(), parts.end());
    return id;
  }

  NodeId dot(NodeId a, NodeId b) { return sum(mul(a, b)); }

  std::span<const double> val(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].val; }
  std::span<const double> adjoint(NodeId id) const {
    return nodes_[static_cast<std::size_t>(id)].adj;
  }

  // Exact reverse-mode sweep from a scalar output node.
  void backward(NodeId out) {
    if (node(out).val.size() != 1) throw std::invalid_argument("tape: backward needs a scalar output");
    for (auto& n : nodes_) n.adj.assign(n.val.size(), 0.0);
    node(out).adj[0] = 1.0;
    for (int id = out; id >= 0; --id) {
      propagate(id);
    }
  }

 private:
  enum class Op {
    Leaf,
    Add,
    Sub,
    Mul,
    Scale,
    MatVec,
    Sigmoid,
    Exp,
    Log,
    Softmax,
    Gather,
    Sum,
    Broadcast,
    Reshape,
    Concat
  };

  struct Node {
    Op op;
    int a = -1, b = -1;
    int rows = 0, cols = 1;
    double c = 0.0;
    int index = 0;
    std::vector<int> srcs;
    std::vector<double> val;
    std::vector<double> adj;
  };

  Node& node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  NodeId push(Op op, int a, int b, int rows, int cols, std::vector<double> v) {
    Node n;
    n.op = op;
    n.a = a;
    n.b = b;
    n.rows = rows;
    n.cols = cols;
    n.val = std::move(v);
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void check_same_size(NodeId a, NodeId b, const char* what) const {
    if (node(a).val.size() != node(b).val.size()) {
      throw std::invalid_argument(std::string("tape: size mismatch in ") + what);
    }
  }

  void propagate(NodeId id) {
    Node& n = node(id);
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::Add: {
        auto& A = node(n.a);
        auto& B = node(n.b);
        for (std::size_t i = 0; i < n.adj.size(); ++i) {
          A.adj[i] += n.adj[i];
          B.adj[i] += n.adj[i];
        }
        break;
      }
      case Op::Sub: {
        auto& A = node(n.a);
        auto& B = node(n.b);
        for (std::size_t i = 0; i < n.adj.size(); ++i) {
          A.adj[i] += n.adj[i];
          B.adj[i] -= n.adj[i];
        }
        break;
      }
      case Op::Mul: {
        auto& A = node(n.a);
        auto& B = node(n.b);
        for (std::size_t i = 0; i < n.adj.size(); ++i) {
          A.adj[i] += n.adj[i] * B.val[i];
          B.adj[i] += n.adj[i] * A.val[i];
        }
        break;
      }
      case Op::Scale: {
        auto& A = node(n.a);
        for (std::size_t i = 0; i < n.adj.size(); ++i) A.adj[i] += n.c * n.adj[i];
        break;
      }
      case Op::MatVec: {
        auto& A = node(n.a);
        auto& X = node(n.b);
        for (int i = 0; i < A.rows; ++i) {
          const double g = n.adj[static_cast<std::size_t>(i)];
          for (int j = 0; j < A.cols; ++j) {
            A.adj[static_cast<std::size_t>(i) * A.cols + j] += g * X.val[static_cast<std::size_t>(j)];
            X.adj[static_cast<std::size_t>(j)] += g * A.val[static_cast<std::size_t>(i) * A.cols + j];
          }
        }
        break;
      }
      case Op::Sigmoid: {
        auto& A = node(n.a);
        for (std::size_t i = 0; i < n.adj.size(); ++i) {
          A.adj[i] += n.adj[i] * n.val[i] * (1.0 - n.val[i]);
        }
        break;
      }
      case Op::Exp: {
        auto& A = node(n.a);
        for (std::size_t i = 0; i < n.adj.size(); ++i) A.adj[i] += n.adj[i] * n.val[i];
        break;
      }
      case Op::Log: {
        auto& A = node(n.a);
        for (std::size_t i = 0; i < n.adj.size(); ++i) A.adj[i] += n.adj[i] / A.val[i];
        break;
      }
      case Op::Softmax: {
        auto& A = node(n.a);
        double gy = 0.0;
        for (std::size_t i = 0; i < n.adj.size(); ++i) gy += n.adj[i] * n.val[i];
        for (std::size_t i = 0; i < n.adj.size(); ++i) {
          A.adj[i] += n.val[i] * (n.adj[i] - gy);
        }
        break;
      }
      case Op::Gather: {
        node(n.a).adj[static_cast<std::size_t>(n.index)] += n.adj[0];
        break;
      }
      case Op::Sum: {
        auto& A = node(n.a);
        for (double& g : A.adj) g += n.adj[0];
        break;
      }
      case Op::Broadcast: {
        auto& A = node(n.a);
        for (double g : n.adj) A.adj[0] += g;
        break;
      }
      case Op::Reshape: {
        auto& A = node(n.a);
        for (std::size_t i = 0; i < n.adj.size(); ++i) A.adj[i] += n.adj[i];
        break;
      }
      case Op::Concat: {
        std::size_t off = 0;
        for (int src : n.srcs) {
          auto& S = node(src);
          for (std::size_t i = 0; i < S.adj.size(); ++i) S.adj[i] += n.adj[off + i];
          off += S.adj.size();
        }
        break;
      }
    }
  }

  std::vector<Node> nodes_;
};

}  // namespace spikerl
