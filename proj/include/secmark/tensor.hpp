// Copyright 2026 Secmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "secmark/errors.hpp"

namespace secmark {

namespace detail {

inline std::string shape_str(const std::vector<int>& shape) {
  std::string s = "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

inline size_t shape_size(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  return n;
}

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<EigenRowMat>;
using CMatMap = Eigen::Map<const EigenRowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

}  // namespace detail

struct TensorNode {
  std::vector<int> shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode*)> backward_fn;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

// Handle to a node in the computation graph. Ops build child nodes that hold
// shared ownership of their parents; backward() walks the DAG once in
// reverse topological order.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
    auto node = std::make_shared<TensorNode>();
    node->data.assign(detail::shape_size(shape), 0.0);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
  }

  static Tensor from(std::vector<double> data, std::vector<int> shape,
                     bool requires_grad = false) {
    if (data.size() != detail::shape_size(shape))
      throw ShapeError("data length " + std::to_string(data.size()) +
                       " does not match shape " + detail::shape_str(shape));
    auto node = std::make_shared<TensorNode>();
    node->data = std::move(data);
    node->shape = std::move(shape);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
  }

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  size_t size() const { return node_->data.size(); }
  std::vector<double>& data() { return node_->data; }
  const std::vector<double>& data() const { return node_->data; }
  std::vector<double>& grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  bool requires_grad() const { return node_->requires_grad; }
  std::shared_ptr<TensorNode> node() const { return node_; }

  double item() const {
    if (node_->data.size() != 1)
      throw ShapeError("item() needs a scalar, got shape " +
                       detail::shape_str(node_->shape));
    return node_->data[0];
  }

  void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

  // Reverse-mode sweep from a scalar output.
  void backward() {
    if (node_->data.size() != 1)
      throw ShapeError("backward() needs a scalar root, got shape " +
                       detail::shape_str(node_->shape));
    // Iterative post-order topological sort.
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> seen;
    std::vector<std::pair<TensorNode*, size_t>> stack;
    stack.push_back({node_.get(), 0});
    seen.insert(node_.get());
    while (!stack.empty()) {
      auto& [cur, idx] = stack.back();
      if (idx < cur->parents.size()) {
        TensorNode* parent = cur->parents[idx++].get();
        if (parent->requires_grad && seen.insert(parent).second)
          stack.push_back({parent, 0});
      } else {
        order.push_back(cur);
        stack.pop_back();
      }
    }
    node_->ensure_grad();
    node_->grad[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
      if ((*it)->backward_fn) (*it)->backward_fn(*it);
  }

 private:
  std::shared_ptr<TensorNode> node_;
};

namespace detail {

inline Tensor make_op(std::vector<int> shape, std::vector<double> data,
                      std::vector<Tensor> parents,
                      std::function<void(TensorNode*)> backward_fn) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  for (const Tensor& p : parents) {
    node->parents.push_back(p.node());
    if (p.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) node->backward_fn = std::move(backward_fn);
  return Tensor(std::move(node));
}

inline void check_same_shape(const Tensor& a, const Tensor& b,
                             const char* op) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shapes " + shape_str(a.shape()) +
                     " and " + shape_str(b.shape()) + " differ");
}

inline void accumulate(TensorNode* dst, const std::vector<double>& g) {
  dst->ensure_grad();
  for (size_t i = 0; i < g.size(); ++i) dst->grad[i] += g[i];
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::check_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return detail::make_op(a.shape(), std::move(out), {a, b},
                         [](TensorNode* self) {
                           for (auto& p : self->parents)
                             if (p->requires_grad)
                               detail::accumulate(p.get(), self->grad);
                         });
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  detail::check_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return detail::make_op(
      a.shape(), std::move(out), {a, b}, [](TensorNode* self) {
        TensorNode* a = self->parents[0].get();
        TensorNode* b = self->parents[1].get();
        if (a->requires_grad) {
          a->ensure_grad();
          for (size_t i = 0; i < self->grad.size(); ++i)
            a->grad[i] += self->grad[i] * b->data[i];
        }
        if (b->requires_grad) {
          b->ensure_grad();
          for (size_t i = 0; i < self->grad.size(); ++i)
            b->grad[i] += self->grad[i] * a->data[i];
        }
      });
}

inline Tensor scale(const Tensor& a, double s) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * s;
  return detail::make_op(a.shape(), std::move(out), {a},
                         [s](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (size_t i = 0; i < self->grad.size(); ++i)
                             a->grad[i] += self->grad[i] * s;
                         });
}

// [m,k] x [k,n] -> [m,n]
inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 ||
      a.shape()[1] != b.shape()[0])
    throw ShapeError("matmul: shapes " + detail::shape_str(a.shape()) +
                     " and " + detail::shape_str(b.shape()) +
                     " are not compatible");
  const int m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  std::vector<double> out(static_cast<size_t>(m) * n);
  {
    detail::CMatMap ma(a.data().data(), m, k);
    detail::CMatMap mb(b.data().data(), k, n);
    detail::MatMap mo(out.data(), m, n);
    mo.noalias() = ma * mb;
  }
  return detail::make_op(
      {m, n}, std::move(out), {a, b}, [m, k, n](TensorNode* self) {
        TensorNode* a = self->parents[0].get();
        TensorNode* b = self->parents[1].get();
        detail::CMatMap g(self->grad.data(), m, n);
        if (a->requires_grad) {
          a->ensure_grad();
          detail::CMatMap mb(b->data.data(), k, n);
          detail::MatMap ga(a->grad.data(), m, k);
          ga.noalias() += g * mb.transpose();
        }
        if (b->requires_grad) {
          b->ensure_grad();
          detail::CMatMap ma(a->data.data(), m, k);
          detail::MatMap gb(b->grad.data(), k, n);
          gb.noalias() += ma.transpose() * g;
        }
      });
}

// [m,k] x [k] -> [m]
inline Tensor matvec(const Tensor& a, const Tensor& x) {
  if (a.shape().size() != 2 || x.shape().size() != 1 ||
      a.shape()[1] != x.shape()[0])
    throw ShapeError("matvec: shapes " + detail::shape_str(a.shape()) +
                     " and " + detail::shape_str(x.shape()) +
                     " are not compatible");
  const int m = a.shape()[0], k = a.shape()[1];
  std::vector<double> out(m);
  {
    detail::CMatMap ma(a.data().data(), m, k);
    detail::CVecMap vx(x.data().data(), k);
    detail::VecMap vo(out.data(), m);
    vo.noalias() = ma * vx;
  }
  return detail::make_op(
      {m}, std::move(out), {a, x}, [m, k](TensorNode* self) {
        TensorNode* a = self->parents[0].get();
        TensorNode* x = self->parents[1].get();
        detail::CVecMap g(self->grad.data(), m);
        if (a->requires_grad) {
          a->ensure_grad();
          detail::CVecMap vx(x->data.data(), k);
          detail::MatMap ga(a->grad.data(), m, k);
          ga.noalias() += g * vx.transpose();
        }
        if (x->requires_grad) {
          x->ensure_grad();
          detail::CMatMap ma(a->data.data(), m, k);
          detail::VecMap gx(x->grad.data(), k);
          gx.noalias() += ma.transpose() * g;
        }
      });
}

inline Tensor sigmoid(const Tensor& a) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const double x = a.data()[i];
    out[i] = x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                    : std::exp(x) / (1.0 + std::exp(x));
  }
  return detail::make_op(a.shape(), std::move(out), {a},
                         [](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (size_t i = 0; i < self->grad.size(); ++i) {
                             const double s = self->data[i];
                             a->grad[i] += self->grad[i] * s * (1.0 - s);
                           }
                         });
}

inline Tensor tanh_op(const Tensor& a) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a.data()[i]);
  return detail::make_op(a.shape(), std::move(out), {a},
                         [](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (size_t i = 0; i < self->grad.size(); ++i) {
                             const double t = self->data[i];
                             a->grad[i] += self->grad[i] * (1.0 - t * t);
                           }
                         });
}

inline Tensor relu(const Tensor& a) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = a.data()[i] > 0 ? a.data()[i] : 0.0;
  return detail::make_op(a.shape(), std::move(out), {a},
                         [](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (size_t i = 0; i < self->grad.size(); ++i)
                             if (self->data[i] > 0)
                               a->grad[i] += self->grad[i];
                         });
}

// 1-D softmax.
inline Tensor softmax(const Tensor& a) {
  if (a.shape().size() != 1)
    throw ShapeError("softmax: expected a vector, got shape " +
                     detail::shape_str(a.shape()) + " vs [n]");
  std::vector<double> out(a.size());
  const double mx = *std::max_element(a.data().begin(), a.data().end());
  double z = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(a.data()[i] - mx);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return detail::make_op(
      a.shape(), std::move(out), {a}, [](TensorNode* self) {
        TensorNode* a = self->parents[0].get();
        a->ensure_grad();
        double gp = 0.0;
        for (size_t i = 0; i < self->grad.size(); ++i)
          gp += self->grad[i] * self->data[i];
        for (size_t i = 0; i < self->grad.size(); ++i)
          a->grad[i] += self->data[i] * (self->grad[i] - gp);
      });
}

// Concatenation of 1-D tensors.
inline Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: empty input vs [n]");
  std::vector<double> out;
  std::vector<int> sizes;
  for (const Tensor& p : parts) {
    if (p.shape().size() != 1)
      throw ShapeError("concat: expected vectors, got shape " +
                       detail::shape_str(p.shape()) + " vs [n]");
    sizes.push_back(p.shape()[0]);
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  const int total = static_cast<int>(out.size());
  return detail::make_op(
      {total}, std::move(out), parts, [sizes](TensorNode* self) {
        size_t at = 0;
        for (size_t pi = 0; pi < self->parents.size(); ++pi) {
          TensorNode* p = self->parents[pi].get();
          if (p->requires_grad) {
            p->ensure_grad();
            for (int j = 0; j < sizes[pi]; ++j)
              p->grad[j] += self->grad[at + j];
          }
          at += sizes[pi];
        }
      });
}

// Inverted-scaling dropout with an externally supplied 0/1 mask so training
// steps and gradient checks see the exact same network.
inline Tensor dropout_apply(const Tensor& a, const std::vector<double>& mask,
                            double rate) {
  if (mask.size() != a.size())
    throw ShapeError("dropout: mask length " + std::to_string(mask.size()) +
                     " vs shape " + detail::shape_str(a.shape()));
  if (rate < 0 || rate >= 1)
    throw ConfigError("dropout rate must be in [0,1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> out(a.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = a.data()[i] * mask[i] * keep_scale;
  return detail::make_op(a.shape(), std::move(out), {a},
                         [mask, keep_scale](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (size_t i = 0; i < self->grad.size(); ++i)
                             a->grad[i] +=
                                 self->grad[i] * mask[i] * keep_scale;
                         });
}

// [T,C] time-major -> [C]; ties keep the earliest time step.
inline Tensor max_over_time(const Tensor& a) {
  if (a.shape().size() != 2)
    throw ShapeError("max_over_time: expected shape [T,C], got " +
                     detail::shape_str(a.shape()));
  const int t_len = a.shape()[0], c = a.shape()[1];
  std::vector<double> out(c);
  std::vector<int> arg(c, 0);
  for (int j = 0; j < c; ++j) {
    double best = a.data()[j];
    for (int t = 1; t < t_len; ++t) {
      const double v = a.data()[static_cast<size_t>(t) * c + j];
      if (v > best) {
        best = v;
        arg[j] = t;
      }
    }
    out[j] = best;
  }
  return detail::make_op({c}, std::move(out), {a},
                         [arg, c](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (int j = 0; j < c; ++j)
                             a->grad[static_cast<size_t>(arg[j]) * c + j] +=
                                 self->grad[j];
                         });
}

// Gathers table rows into [n,E]. Gradients scatter-add back; row 0 (the
// padding row) receives none so it stays a constant.
inline Tensor rows(const Tensor& table, const std::vector<int>& ids) {
  if (table.shape().size() != 2)
    throw ShapeError("rows: expected shape [V,E], got " +
                     detail::shape_str(table.shape()));
  const int v = table.shape()[0], e = table.shape()[1];
  std::vector<double> out(ids.size() * static_cast<size_t>(e));
  for (size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= v)
      throw DataError("row id " + std::to_string(ids[t]) +
                      " out of range for table with " + std::to_string(v) +
                      " rows");
    std::copy_n(&table.data()[static_cast<size_t>(ids[t]) * e], e,
                &out[t * e]);
  }
  return detail::make_op(
      {static_cast<int>(ids.size()), e}, std::move(out), {table},
      [ids, e](TensorNode* self) {
        TensorNode* table = self->parents[0].get();
        table->ensure_grad();
        for (size_t t = 0; t < ids.size(); ++t) {
          if (ids[t] == 0) continue;
          for (int j = 0; j < e; ++j)
            table->grad[static_cast<size_t>(ids[t]) * e + j] +=
                self->grad[t * e + j];
        }
      });
}

// Row t of an [n,E] tensor as an [E] vector.
inline Tensor row(const Tensor& a, int t) {
  if (a.shape().size() != 2)
    throw ShapeError("row: expected a matrix, got shape " +
                     detail::shape_str(a.shape()));
  const int e = a.shape()[1];
  if (t < 0 || t >= a.shape()[0])
    throw ShapeError("row " + std::to_string(t) + " out of range for shape " +
                     detail::shape_str(a.shape()));
  std::vector<double> out(a.data().begin() + static_cast<size_t>(t) * e,
                          a.data().begin() + static_cast<size_t>(t + 1) * e);
  return detail::make_op({e}, std::move(out), {a},
                         [t, e](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (int j = 0; j < e; ++j)
                             a->grad[static_cast<size_t>(t) * e + j] +=
                                 self->grad[j];
                         });
}

// Contiguous sub-vector [start, start+len) of a 1-D tensor.
inline Tensor slice(const Tensor& a, int start, int len) {
  if (a.shape().size() != 1)
    throw ShapeError("slice: expected a vector, got shape " +
                     detail::shape_str(a.shape()));
  if (start < 0 || len < 0 || start + len > a.shape()[0])
    throw ShapeError("slice [" + std::to_string(start) + "," +
                     std::to_string(start + len) + ") out of range for shape " +
                     detail::shape_str(a.shape()));
  std::vector<double> out(a.data().begin() + start,
                          a.data().begin() + start + len);
  return detail::make_op({len}, std::move(out), {a},
                         [start, len](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (int j = 0; j < len; ++j)
                             a->grad[start + j] += self->grad[j];
                         });
}

// Stacks equal-length 1-D tensors into [n, len] (row per input).
inline Tensor stack_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("stack_rows: empty input vs [n,c]");
  const int len = parts[0].shape().size() == 1 ? parts[0].shape()[0] : -1;
  std::vector<double> out;
  for (const Tensor& p : parts) {
    if (p.shape().size() != 1 || p.shape()[0] != len)
      throw ShapeError("stack_rows: shapes " +
                       detail::shape_str(parts[0].shape()) + " and " +
                       detail::shape_str(p.shape()) + " differ");
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  return detail::make_op(
      {static_cast<int>(parts.size()), len}, std::move(out), parts,
      [len](TensorNode* self) {
        for (size_t pi = 0; pi < self->parents.size(); ++pi) {
          TensorNode* p = self->parents[pi].get();
          if (!p->requires_grad) continue;
          p->ensure_grad();
          for (int j = 0; j < len; ++j)
            p->grad[j] += self->grad[pi * static_cast<size_t>(len) + j];
        }
      });
}

// Scalar cross-entropy of logits against a gold class.
inline Tensor softmax_cross_entropy(const Tensor& logits, int gold) {
  if (logits.shape().size() != 1)
    throw ShapeError("cross entropy: expected a vector, got shape " +
                     detail::shape_str(logits.shape()));
  const int k = logits.shape()[0];
  if (gold < 0 || gold >= k)
    throw DataError("gold class " + std::to_string(gold) +
                    " out of range for " + std::to_string(k) + " classes");
  const double mx =
      *std::max_element(logits.data().begin(), logits.data().end());
  double z = 0.0;
  for (double v : logits.data()) z += std::exp(v - mx);
  const double loss = mx + std::log(z) - logits.data()[gold];
  return detail::make_op(
      {1}, {loss}, {logits}, [gold, k](TensorNode* self) {
        TensorNode* logits = self->parents[0].get();
        logits->ensure_grad();
        const double g = self->grad[0];
        const double mx = *std::max_element(logits->data.begin(),
                                            logits->data.end());
        double z = 0.0;
        for (double v : logits->data) z += std::exp(v - mx);
        for (int i = 0; i < k; ++i) {
          double p = std::exp(logits->data[i] - mx) / z;
          if (i == gold) p -= 1.0;
          logits->grad[i] += g * p;
        }
      });
}

// Scalar sum of scalar tensors.
inline Tensor sum_scalars(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("sum: empty input vs [1]");
  double total = 0.0;
  for (const Tensor& p : parts) {
    if (p.size() != 1)
      throw ShapeError("sum: expected scalars, got shape " +
                       detail::shape_str(p.shape()) + " vs [1]");
    total += p.data()[0];
  }
  return detail::make_op({1}, {total}, parts, [](TensorNode* self) {
    for (auto& p : self->parents)
      if (p->requires_grad) {
        p->ensure_grad();
        p->grad[0] += self->grad[0];
      }
  });
}

inline Tensor mean_scalars(const std::vector<Tensor>& parts) {
  return scale(sum_scalars(parts), 1.0 / parts.size());
}

// Mean over rows of [T,C] -> [C].
inline Tensor mean_over_time(const Tensor& a) {
  if (a.shape().size() != 2)
    throw ShapeError("mean_over_time: expected shape [T,C], got " +
                     detail::shape_str(a.shape()));
  const int t_len = a.shape()[0], c = a.shape()[1];
  std::vector<double> out(c, 0.0);
  for (int t = 0; t < t_len; ++t)
    for (int j = 0; j < c; ++j)
      out[j] += a.data()[static_cast<size_t>(t) * c + j];
  for (double& v : out) v /= t_len;
  return detail::make_op({c}, std::move(out), {a},
                         [t_len, c](TensorNode* self) {
                           TensorNode* a = self->parents[0].get();
                           a->ensure_grad();
                           for (int t = 0; t < t_len; ++t)
                             for (int j = 0; j < c; ++j)
                               a->grad[static_cast<size_t>(t) * c + j] +=
                                   self->grad[j] / t_len;
                         });
}

}  // namespace secmark
