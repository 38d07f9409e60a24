#include "nfetc/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "nfetc/error.hpp"

namespace nfetc {

const Tensor& Var::value() const { return tape_->value(id_); }
const Tensor& Var::grad() const { return tape_->grad(id_); }

Var Tape::push(Tensor value, bool requires_grad, BackwardFn backward) {
  if (!value.all_finite()) {
    throw NumericError("non-finite value produced at tape node " + std::to_string(nodes_.size()));
  }
  nodes_.push_back(Node{std::move(value), Tensor(), requires_grad, std::move(backward)});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) { return push(std::move(value), false, nullptr); }

Var Tape::variable(Tensor value) { return push(std::move(value), true, nullptr); }

Var Tape::record(Tensor value, std::span<const Var> parents, BackwardFn backward) {
  bool needs = false;
  for (const Var& p : parents) {
    if (p.tape_ != this) throw Error("operand recorded on a different tape");
    needs = needs || nodes_[p.id_].requires_grad;
  }
  return push(std::move(value), needs, needs ? std::move(backward) : nullptr);
}

const Tensor& Tape::grad(std::size_t id) const {
  if (!has_grads_) throw Error("gradients requested before backward()");
  return nodes_[id].grad;
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw Error("loss recorded on a different tape");
  if (value(loss.id_).size() != 1) {
    throw ShapeError("loss must be scalar, got shape " + shape_string(value(loss.id_).shape()));
  }
  for (std::size_t i = 0; i <= loss.id_; ++i) {
    Node& node = nodes_[i];
    node.grad = node.requires_grad ? Tensor(node.value.shape(), 0.0) : Tensor();
  }
  has_grads_ = true;
  if (!nodes_[loss.id_].requires_grad) return;
  nodes_[loss.id_].grad[0] = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    if (nodes_[i].requires_grad && nodes_[i].backward) nodes_[i].backward(*this, i);
  }
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                     shape_string(b.shape()));
  }
}

void require_rank(const Var& a, std::size_t rank, const char* op) {
  if (a.value().rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                     shape_string(a.shape()));
  }
}

template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv_from_output) {
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(std::move(out), parents, [pa, deriv_from_output](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& g = t.grad(self);
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * deriv_from_output(y[i]);
    });
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || (b.rank() != 1 && b.rank() != 2)) {
    throw ShapeError("matmul: unsupported ranks " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols();
  if (b.rows() != k) {
    throw ShapeError("matmul: inner extents differ " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  if (b.rank() == 1) {
    Tensor out({m});
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = a.data() + i * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += arow[p] * b[p];
      out[i] = s;
    }
    return out;
  }
  const std::size_t n = b.cols();
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* orow = out.data() + i * n;
    const double* arow = a.data() + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ShapeError("softmax of an empty vector");
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Var matmul(Var a, Var b) {
  Tensor out = matmul(a.value(), b.value());
  const std::size_t pa = a.id(), pb = b.id();
  Var parents[] = {a, b};
  return a.tape().record(std::move(out), parents, [pa, pb](Tape& t, std::size_t self) {
    const Tensor& A = t.value(pa);
    const Tensor& B = t.value(pb);
    const Tensor& G = t.grad(self);
    const std::size_t m = A.rows(), k = A.cols();
    if (B.rank() == 1) {
      // dA = g b^T, db = A^T g
      t.accumulate(pa, [&](Tensor& gA) {
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = G[i];
          double* row = gA.data() + i * k;
          for (std::size_t p = 0; p < k; ++p) row[p] += gi * B[p];
        }
      });
      t.accumulate(pb, [&](Tensor& gB) {
        for (std::size_t i = 0; i < m; ++i) {
          const double gi = G[i];
          const double* row = A.data() + i * k;
          for (std::size_t p = 0; p < k; ++p) gB[p] += gi * row[p];
        }
      });
      return;
    }
    const std::size_t n = B.cols();
    // dA = G B^T
    t.accumulate(pa, [&](Tensor& gA) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = G.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = B.data() + p * n;
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += grow[j] * brow[j];
          gA.data()[i * k + p] += s;
        }
      }
    });
    // dB = A^T G
    t.accumulate(pb, [&](Tensor& gB) {
      for (std::size_t i = 0; i < m; ++i) {
        const double* grow = G.data() + i * n;
        const double* arow = A.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
          const double av = arow[p];
          double* gbrow = gB.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
        }
      }
    });
  });
}

Var transpose(Var a) {
  require_rank(a, 2, "transpose");
  const Tensor& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  Tensor out({c, r});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = x.at(i, j);
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(std::move(out), parents, [pa, r, c](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ga.at(i, j) += g.at(j, i);
    });
  });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  out += b.value();
  const std::size_t pa = a.id(), pb = b.id();
  Var parents[] = {a, b};
  return a.tape().record(std::move(out), parents, [pa, pb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pa, [&](Tensor& ga) { ga += g; });
    t.accumulate(pb, [&](Tensor& gb) { gb += g; });
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const std::size_t pa = a.id(), pb = b.id();
  Var parents[] = {a, b};
  return a.tape().record(std::move(out), parents, [pa, pb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pa, [&](Tensor& ga) { ga += g; });
    t.accumulate(pb, [&](Tensor& gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
    });
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t pa = a.id(), pb = b.id();
  Var parents[] = {a, b};
  return a.tape().record(std::move(out), parents, [pa, pb](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& A = t.value(pa);
    const Tensor& B = t.value(pb);
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * B[i];
    });
    t.accumulate(pb, [&](Tensor& gb) {
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * A[i];
    });
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factor;
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(std::move(out), parents, [pa, factor](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * factor;
    });
  });
}

Var div(Var a, Var divisor) {
  if (divisor.size() != 1) throw ShapeError("div: divisor must be scalar");
  const double d = divisor.scalar();
  if (d == 0.0) throw NumericError("div: division by zero");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= d;
  const std::size_t pa = a.id(), pd = divisor.id();
  Var parents[] = {a, divisor};
  return a.tape().record(std::move(out), parents, [pa, pd](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    const double d = t.value(pd)[0];
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] / d;
    });
    // d(a_i/d)/dd = -y_i/d
    t.accumulate(pd, [&](Tensor& gd) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * y[i];
      gd[0] -= s / d;
    });
  });
}

Var sigmoid(Var a) {
  return unary(
      a, [](double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); },
      [](double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double y) { return 1.0 - y * y; });
}

Var log(Var a, double floor) {
  Tensor out(a.shape());
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::max(x[i], floor);
    if (v <= 0.0) throw NumericError("log of a non-positive value");
    out[i] = std::log(v);
  }
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(std::move(out), parents, [pa, floor](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& x = t.value(pa);
    t.accumulate(pa, [&](Tensor& ga) {
      for (std::size_t i = 0; i < ga.size(); ++i) {
        if (x[i] >= floor) ga[i] += g[i] / x[i];
      }
    });
  });
}

Var softmax(Var v) {
  require_rank(v, 1, "softmax");
  Tensor out = Tensor::vector(softmax(v.value().values()));
  const std::size_t pv = v.id();
  Var parents[] = {v};
  return v.tape().record(std::move(out), parents, [pv](Tape& t, std::size_t self) {
    const Tensor& y = t.value(self);
    const Tensor& g = t.grad(self);
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
    t.accumulate(pv, [&](Tensor& gv) {
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += y[i] * (g[i] - dot);
    });
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(Tensor::scalar(s), parents, [pa](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    t.accumulate(pa, [&](Tensor& ga) {
      for (double& v : ga.values()) v += g;
    });
  });
}

Var sum_squares(Var a) {
  const std::size_t pa = a.id();
  Var parents[] = {a};
  return a.tape().record(Tensor::scalar(a.value().squared_norm()), parents,
                         [pa](Tape& t, std::size_t self) {
                           const double g = t.grad(self)[0];
                           const Tensor& x = t.value(pa);
                           t.accumulate(pa, [&](Tensor& ga) {
                             for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * g * x[i];
                           });
                         });
}

Var add_n(std::span<const Var> terms) {
  if (terms.empty()) throw ShapeError("add_n of no terms");
  Tensor out = terms[0].value();
  std::vector<std::size_t> ids{terms[0].id()};
  for (std::size_t i = 1; i < terms.size(); ++i) {
    require_same_shape(terms[0], terms[i], "add_n");
    out += terms[i].value();
    ids.push_back(terms[i].id());
  }
  return terms[0].tape().record(std::move(out), terms, [ids](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (std::size_t id : ids) t.accumulate(id, [&](Tensor& gi) { gi += g; });
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat of no parts");
  std::vector<double> values;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    require_rank(p, 1, "concat");
    values.insert(values.end(), p.value().values().begin(), p.value().values().end());
    ids.push_back(p.id());
  }
  return parts[0].tape().record(Tensor::vector(std::move(values)), parts,
                                [ids](Tape& t, std::size_t self) {
                                  const Tensor& g = t.grad(self);
                                  std::size_t offset = 0;
                                  for (std::size_t id : ids) {
                                    const std::size_t n = t.value(id).size();
                                    t.accumulate(id, [&](Tensor& gi) {
                                      for (std::size_t i = 0; i < n; ++i) gi[i] += g[offset + i];
                                    });
                                    offset += n;
                                  }
                                });
}

Var slice(Var v, std::size_t offset, std::size_t length) {
  require_rank(v, 1, "slice");
  if (length == 0 || offset + length > v.size()) {
    throw ShapeError("slice [" + std::to_string(offset) + ", +" + std::to_string(length) +
                     ") out of range for " + shape_string(v.shape()));
  }
  const auto src = v.value().values();
  Tensor out = Tensor::vector(std::vector<double>(src.begin() + offset, src.begin() + offset + length));
  const std::size_t pv = v.id();
  Var parents[] = {v};
  return v.tape().record(std::move(out), parents, [pv, offset, length](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pv, [&](Tensor& gv) {
      for (std::size_t i = 0; i < length; ++i) gv[offset + i] += g[i];
    });
  });
}

Var row(Var m, std::size_t index) {
  require_rank(m, 2, "row");
  if (index >= m.value().rows()) throw ShapeError("row index out of range");
  const std::size_t cols = m.value().cols();
  const double* begin = m.value().data() + index * cols;
  Tensor out = Tensor::vector(std::vector<double>(begin, begin + cols));
  const std::size_t pm = m.id();
  Var parents[] = {m};
  return m.tape().record(std::move(out), parents, [pm, index, cols](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(pm, [&](Tensor& gm) {
      for (std::size_t j = 0; j < cols; ++j) gm.at(index, j) += g[j];
    });
  });
}

Var pick(Var v, std::size_t index) {
  if (index >= v.size()) throw ShapeError("pick index out of range");
  const std::size_t pv = v.id();
  Var parents[] = {v};
  return v.tape().record(Tensor::scalar(v.value()[index]), parents,
                         [pv, index](Tape& t, std::size_t self) {
                           const double g = t.grad(self)[0];
                           t.accumulate(pv, [&](Tensor& gv) { gv[index] += g; });
                         });
}

Var stack_columns(std::span<const Var> columns) {
  if (columns.empty()) throw ShapeError("stack_columns of no columns");
  const std::size_t d = columns[0].size();
  const std::size_t n = columns.size();
  Tensor out({d, n});
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < n; ++j) {
    require_rank(columns[j], 1, "stack_columns");
    if (columns[j].size() != d) throw ShapeError("stack_columns: ragged columns");
    for (std::size_t i = 0; i < d; ++i) out.at(i, j) = columns[j].value()[i];
    ids.push_back(columns[j].id());
  }
  return columns[0].tape().record(std::move(out), columns, [ids, d](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      t.accumulate(ids[j], [&](Tensor& gc) {
        for (std::size_t i = 0; i < d; ++i) gc[i] += g.at(i, j);
      });
    }
  });
}

}  // namespace nfetc
