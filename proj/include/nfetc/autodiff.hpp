#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "nfetc/tensor.hpp"

namespace nfetc {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  double scalar() const { return value()[0]; }

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records operations in creation order and replays them backwards to
/// accumulate exact gradients. Nodes are appended only, so creation order is
/// already a topological order.
class Tape {
 public:
  // Called during backward with the node's own id; pushes the node's gradient
  // into its parents through Tape::accumulate.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var variable(Tensor value);

  // Records a derived value. The node requires a gradient iff any parent does.
  Var record(Tensor value, std::span<const Var> parents, BackwardFn backward);

  // Reverse pass from a scalar (size-1) loss. May be called repeatedly;
  // gradients are reset each time.
  void backward(Var loss);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Adds into a node's gradient buffer when that node requires a gradient.
  template <typename Fn>
  void accumulate(std::size_t id, Fn&& fn) {
    Node& node = nodes_[id];
    if (!node.requires_grad) return;
    fn(node.grad);
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(Tensor value, bool requires_grad, BackwardFn backward);

  std::vector<Node> nodes_;
  bool has_grads_ = false;
};

// Differentiable operations. All inputs must come from the same tape.
// Matrices are rank 2, vectors rank 1; a scalar is a size-1 vector.

Var matmul(Var a, Var b);  // [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m]
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // element-wise
Var scale(Var a, double factor);
Var div(Var a, Var divisor);  // divisor is a scalar
Var sigmoid(Var a);
Var tanh(Var a);
Var log(Var a, double floor = 0.0);  // log(max(a, floor)); zero gradient below the floor
Var softmax(Var v);
Var sum(Var a);
Var sum_squares(Var a);
Var add_n(std::span<const Var> terms);
Var concat(std::span<const Var> parts);  // vectors only
Var slice(Var v, std::size_t offset, std::size_t length);
Var row(Var m, std::size_t index);  // row of a matrix as a vector
Var pick(Var v, std::size_t index);  // single element as a scalar
Var stack_columns(std::span<const Var> columns);  // T vectors of length d -> [d,T]

// Value-level helpers shared with code that does not need a tape.
Tensor matmul(const Tensor& a, const Tensor& b);
std::vector<double> softmax(std::span<const double> logits);

}  // namespace nfetc
