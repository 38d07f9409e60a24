#pragma once

#include <map>
#include <string>
#include <vector>

#include "nfetc/autodiff.hpp"
#include "nfetc/tensor.hpp"

namespace nfetc {

/// Named model parameters in insertion order. Frozen entries are never bound
/// as differentiable leaves and never updated by an optimizer.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    bool trainable = true;
  };

  void add(std::string name, Tensor value, bool trainable = true);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool trainable(const std::string& name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Sum of squares over trainable entries only.
  double l2_squared() const;

  bool operator==(const ParamSet& other) const;

 private:
  const Entry& entry(const std::string& name) const;

  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
};

using GradientMap = std::map<std::string, Tensor>;

/// Parameters placed on a tape for one forward/backward pass.
class BoundParams {
 public:
  BoundParams(Tape& tape, const ParamSet& params);

  Var operator[](const std::string& name) const;
  const std::map<std::string, Var>& vars() const { return vars_; }

  // Differentiable sum of squares over trainable parameters.
  Var l2_squared(Tape& tape) const;

 private:
  std::map<std::string, Var> vars_;
  std::vector<std::string> trainable_;
};

/// Runs the reverse pass from `loss` and returns one gradient per trainable
/// parameter. Parameters the loss does not depend on get zeros.
GradientMap gradients(Var loss, const ParamSet& params, const BoundParams& bound);

}  // namespace nfetc
