#include "nfetc/param_set.hpp"

#include "nfetc/error.hpp"

namespace nfetc {

void ParamSet::add(std::string name, Tensor value, bool trainable) {
  if (contains(name)) throw Error("duplicate parameter name '" + name + "'");
  index_[name] = entries_.size();
  entries_.push_back(Entry{std::move(name), std::move(value), trainable});
}

const ParamSet::Entry& ParamSet::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error("unknown parameter '" + name + "'");
  return entries_[it->second];
}

Tensor& ParamSet::get(const std::string& name) { return const_cast<Entry&>(entry(name)).value; }
const Tensor& ParamSet::get(const std::string& name) const { return entry(name).value; }
bool ParamSet::trainable(const std::string& name) const { return entry(name).trainable; }

double ParamSet::l2_squared() const {
  double s = 0.0;
  for (const auto& e : entries_) {
    if (e.trainable) s += e.value.squared_norm();
  }
  return s;
}

bool ParamSet::operator==(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.trainable != b.trainable || !(a.value == b.value)) return false;
  }
  return true;
}

BoundParams::BoundParams(Tape& tape, const ParamSet& params) {
  for (const auto& e : params.entries()) {
    vars_.emplace(e.name, e.trainable ? tape.variable(e.value) : tape.constant(e.value));
    if (e.trainable) trainable_.push_back(e.name);
  }
}

Var BoundParams::operator[](const std::string& name) const {
  auto it = vars_.find(name);
  if (it == vars_.end()) throw Error("parameter '" + name + "' is not bound");
  return it->second;
}

Var BoundParams::l2_squared(Tape& tape) const {
  std::vector<Var> terms;
  for (const auto& name : trainable_) terms.push_back(sum_squares(vars_.at(name)));
  if (terms.empty()) return tape.constant(Tensor::scalar(0.0));
  return add_n(terms);
}

GradientMap gradients(Var loss, const ParamSet& params, const BoundParams& bound) {
  loss.tape().backward(loss);
  GradientMap out;
  for (const auto& e : params.entries()) {
    if (!e.trainable) continue;
    Var v = bound[e.name];
    out.emplace(e.name, v.tape().requires_grad(v.id()) ? v.grad() : Tensor(e.value.shape(), 0.0));
  }
  return out;
}

}  // namespace nfetc
