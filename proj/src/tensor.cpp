//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrosyn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace retrosyn {

// ---------------------------------------------------------------------------
// RandomGen (xoshiro256**)

namespace {
std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

RandomGen::RandomGen(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

std::uint64_t RandomGen::next_u64() {
  std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomGen::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomGen::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RandomGen::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

// ---------------------------------------------------------------------------
// Tensor basics

namespace {

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw ShapeError("negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

TensorNodePtr make_node(std::vector<int> shape, bool requires_grad) {
  auto node = std::make_shared<TensorNode>();
  node->shape = std::move(shape);
  node->value.assign(shape_size(node->shape), 0.0);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->value.size(), 0.0);
  return node;
}

// Result node whose requires_grad is inherited from parents.
TensorNodePtr make_result(std::vector<int> shape, std::vector<TensorNodePtr> parents) {
  bool rg = false;
  for (const auto& p : parents) rg = rg || p->requires_grad;
  auto node = make_node(std::move(shape), rg);
  node->parents = std::move(parents);
  return node;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                     " vs " + shape_str(b.shape()));
  }
}

int rows_of(const Tensor& t) { return t.ndim() == 2 ? t.dim(0) : 1; }
int cols_of(const Tensor& t) {
  return t.ndim() == 2 ? t.dim(1) : (t.ndim() == 1 ? t.dim(0) : 1);
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return Tensor(make_node(std::move(shape), requires_grad));
}

Tensor Tensor::from_data(std::vector<int> shape, std::vector<double> data,
                         bool requires_grad) {
  auto node = make_node(std::move(shape), requires_grad);
  if (node->value.size() != data.size()) {
    throw ShapeError("from_data: buffer length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str(node->shape));
  }
  node->value = std::move(data);
  return Tensor(node);
}

Tensor Tensor::scalar(double v) { return from_data({1}, {v}); }

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() on non-scalar tensor");
  return node_->value[0];
}

double Tensor::at(int r, int c) const {
  if (ndim() != 2) throw ShapeError("at(r,c) needs a 2-d tensor");
  return node_->value.at(static_cast<std::size_t>(r) * dim(1) + c);
}

void Tensor::backward() const {
  if (size() != 1) throw ShapeError("backward() requires a scalar loss");
  // topological order by iterative post-order DFS
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> seen;
  std::vector<std::pair<TensorNode*, std::size_t>> stack;
  stack.push_back({node_.get(), 0});
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      TensorNode* parent = node->parents[idx++].get();
      if (parent->requires_grad && !seen.count(parent)) {
        seen.insert(parent);
        stack.push_back({parent, 0});
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (TensorNode* node : order) {
    if (node->grad.size() != node->value.size()) node->grad.assign(node->value.size(), 0.0);
  }
  node_->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_fn) (*it)->backward_fn();
  }
}

// ---------------------------------------------------------------------------
// Primitives

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  }
  const int n = a.dim(0), k = a.dim(1), m = b.dim(1);
  auto node = make_result({n, m}, {a.node(), b.node()});
  const auto& av = a.node()->value;
  const auto& bv = b.node()->value;
  auto& out = node->value;
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) {
      double av_it = av[i * k + t];
      if (av_it == 0.0) continue;
      for (int j = 0; j < m; ++j) out[i * m + j] += av_it * bv[t * m + j];
    }
  }
  if (node->requires_grad) {
    auto an = a.node(), bn = b.node(), on = node;
    node->backward_fn = [an, bn, on, n, k, m]() {
      const auto& g = on->grad;
      if (an->requires_grad) {
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < m; ++j) {
            double gij = g[i * m + j];
            if (gij == 0.0) continue;
            for (int t = 0; t < k; ++t) an->grad[i * k + t] += gij * bn->value[t * m + j];
          }
      }
      if (bn->requires_grad) {
        for (int i = 0; i < n; ++i)
          for (int t = 0; t < k; ++t) {
            double a_it = an->value[i * k + t];
            if (a_it == 0.0) continue;
            for (int j = 0; j < m; ++j) bn->grad[t * m + j] += a_it * g[i * m + j];
          }
      }
    };
  }
  return Tensor(node);
}

namespace {

Tensor elementwise(const Tensor& a, const Tensor& b, const char* name,
                   double (*fwd)(double, double),
                   std::pair<double, double> (*jac)(double, double)) {
  check_same_shape(a, b, name);
  auto node = make_result(a.shape(), {a.node(), b.node()});
  for (std::size_t i = 0; i < node->value.size(); ++i) {
    node->value[i] = fwd(a.node()->value[i], b.node()->value[i]);
  }
  if (node->requires_grad) {
    auto an = a.node(), bn = b.node(), on = node;
    node->backward_fn = [an, bn, on, jac]() {
      for (std::size_t i = 0; i < on->value.size(); ++i) {
        auto [da, db] = jac(an->value[i], bn->value[i]);
        if (an->requires_grad) an->grad[i] += da * on->grad[i];
        if (bn->requires_grad) bn->grad[i] += db * on->grad[i];
      }
    };
  }
  return Tensor(node);
}

Tensor unary(const Tensor& a, double (*fwd)(double), double (*dfd)(double, double)) {
  auto node = make_result(a.shape(), {a.node()});
  for (std::size_t i = 0; i < node->value.size(); ++i) node->value[i] = fwd(a.node()->value[i]);
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, dfd]() {
      for (std::size_t i = 0; i < on->value.size(); ++i) {
        an->grad[i] += dfd(an->value[i], on->value[i]) * on->grad[i];
      }
    };
  }
  return Tensor(node);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return elementwise(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return std::pair<double, double>{1.0, 1.0}; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return elementwise(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return std::pair<double, double>{1.0, -1.0}; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return elementwise(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double x, double y) { return std::pair<double, double>{y, x}; });
}

Tensor add_rowvec(const Tensor& m, const Tensor& v) {
  const int rows = rows_of(m), cols = cols_of(m);
  if (static_cast<int>(v.size()) != cols) {
    throw ShapeError("add_rowvec: vector length " + std::to_string(v.size()) +
                     " vs columns " + std::to_string(cols));
  }
  auto node = make_result(m.shape(), {m.node(), v.node()});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      node->value[r * cols + c] = m.node()->value[r * cols + c] + v.node()->value[c];
  if (node->requires_grad) {
    auto mn = m.node(), vn = v.node(), on = node;
    node->backward_fn = [mn, vn, on, rows, cols]() {
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          double g = on->grad[r * cols + c];
          if (mn->requires_grad) mn->grad[r * cols + c] += g;
          if (vn->requires_grad) vn->grad[c] += g;
        }
    };
  }
  return Tensor(node);
}

Tensor scale(const Tensor& a, double s) { return affine(a, s, 0.0); }

Tensor affine(const Tensor& a, double s, double b) {
  auto node = make_result(a.shape(), {a.node()});
  for (std::size_t i = 0; i < node->value.size(); ++i)
    node->value[i] = s * a.node()->value[i] + b;
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, s]() {
      for (std::size_t i = 0; i < on->value.size(); ++i) an->grad[i] += s * on->grad[i];
    };
  }
  return Tensor(node);
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  const int rows = rows_of(parts[0]);
  int total = 0;
  std::vector<TensorNodePtr> parents;
  for (const auto& p : parts) {
    if (rows_of(p) != rows) throw ShapeError("concat_cols: row mismatch");
    total += cols_of(p);
    parents.push_back(p.node());
  }
  auto node = make_result({rows, total}, parents);
  int offset = 0;
  for (const auto& p : parts) {
    int pc = cols_of(p);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < pc; ++c)
        node->value[r * total + offset + c] = p.node()->value[r * pc + c];
    offset += pc;
  }
  if (node->requires_grad) {
    auto on = node;
    std::vector<int> widths;
    for (const auto& p : parts) widths.push_back(cols_of(p));
    node->backward_fn = [on, widths, rows, total]() {
      int off = 0;
      for (std::size_t k = 0; k < on->parents.size(); ++k) {
        auto& parent = on->parents[k];
        int pc = widths[k];
        if (parent->requires_grad) {
          for (int r = 0; r < rows; ++r)
            for (int c = 0; c < pc; ++c)
              parent->grad[r * pc + c] += on->grad[r * total + off + c];
        }
        off += pc;
      }
    };
  }
  return Tensor(node);
}

Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("transpose: need a 2-D tensor");
  const int n = a.dim(0), m = a.dim(1);
  auto node = make_result({m, n}, {a.node()});
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) node->value[c * n + r] = a.node()->value[r * m + c];
  if (node->requires_grad) {
    auto an = a.node(), on = node;
    node->backward_fn = [an, on, n, m]() {
      if (!an->requires_grad) return;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) an->grad[r * m + c] += on->grad[c * n + r];
    };
  }
  return Tensor(node);
}

Tensor relu(const Tensor& a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor tanh_t(const Tensor& a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, [](double x) { return 1.0 / (1.0 + std::exp(-x)); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor softmax_rows(const Tensor& a) {
  const int rows = rows_of(a), cols = cols_of(a);
  auto node = make_result(a.shape(), {a.node()});
  for (int r = 0; r < rows; ++r) {
    const double* x = a.node()->value.data() + static_cast<std::size_t>(r) * cols;
    double* y = node->value.data() + static_cast<std::size_t>(r) * cols;
    double mx = x[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
    double denom = 0.0;
    for (int c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - mx);
      denom += y[c];
    }
    for (int c = 0; c < cols; ++c) y[c] /= denom;
  }
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, rows, cols]() {
      for (int r = 0; r < rows; ++r) {
        const double* y = on->value.data() + static_cast<std::size_t>(r) * cols;
        const double* g = on->grad.data() + static_cast<std::size_t>(r) * cols;
        double dot = 0.0;
        for (int c = 0; c < cols; ++c) dot += y[c] * g[c];
        for (int c = 0; c < cols; ++c)
          an->grad[static_cast<std::size_t>(r) * cols + c] += y[c] * (g[c] - dot);
      }
    };
  }
  return Tensor(node);
}

Tensor log_softmax_rows(const Tensor& a) {
  const int rows = rows_of(a), cols = cols_of(a);
  auto node = make_result(a.shape(), {a.node()});
  for (int r = 0; r < rows; ++r) {
    const double* x = a.node()->value.data() + static_cast<std::size_t>(r) * cols;
    double* y = node->value.data() + static_cast<std::size_t>(r) * cols;
    double mx = x[0];
    for (int c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
    double denom = 0.0;
    for (int c = 0; c < cols; ++c) denom += std::exp(x[c] - mx);
    double lse = mx + std::log(denom);
    for (int c = 0; c < cols; ++c) y[c] = x[c] - lse;
  }
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, rows, cols]() {
      for (int r = 0; r < rows; ++r) {
        const double* y = on->value.data() + static_cast<std::size_t>(r) * cols;
        const double* g = on->grad.data() + static_cast<std::size_t>(r) * cols;
        double gsum = 0.0;
        for (int c = 0; c < cols; ++c) gsum += g[c];
        for (int c = 0; c < cols; ++c)
          an->grad[static_cast<std::size_t>(r) * cols + c] += g[c] - std::exp(y[c]) * gsum;
      }
    };
  }
  return Tensor(node);
}

Tensor sum_all(const Tensor& a) {
  auto node = make_result({1}, {a.node()});
  double s = 0.0;
  for (double v : a.node()->value) s += v;
  node->value[0] = s;
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on]() {
      for (auto& g : an->grad) g += on->grad[0];
    };
  }
  return Tensor(node);
}

Tensor sum_rows(const Tensor& a) {
  const int rows = rows_of(a), cols = cols_of(a);
  auto node = make_result({1, cols}, {a.node()});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) node->value[c] += a.node()->value[r * cols + c];
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, rows, cols]() {
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) an->grad[r * cols + c] += on->grad[c];
    };
  }
  return Tensor(node);
}

Tensor segment_sum(const Tensor& values, const std::vector<int>& ids, int num_segments) {
  const int rows = rows_of(values), cols = cols_of(values);
  if (static_cast<int>(ids.size()) != rows) {
    throw ShapeError("segment_sum: " + std::to_string(ids.size()) + " ids for " +
                     std::to_string(rows) + " rows");
  }
  auto node = make_result({num_segments, cols}, {values.node()});
  for (int r = 0; r < rows; ++r) {
    int s = ids[r];
    if (s < 0 || s >= num_segments) throw ShapeError("segment_sum: id out of range");
    for (int c = 0; c < cols; ++c) node->value[s * cols + c] += values.node()->value[r * cols + c];
  }
  if (node->requires_grad) {
    auto vn = values.node();
    auto on = node;
    node->backward_fn = [vn, on, ids, cols, rows]() {
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
          vn->grad[r * cols + c] += on->grad[ids[r] * cols + c];
    };
  }
  return Tensor(node);
}

Tensor index_select(const Tensor& a, const std::vector<int>& rows) {
  const int src_rows = rows_of(a), cols = cols_of(a);
  auto node = make_result({static_cast<int>(rows.size()), cols}, {a.node()});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int s = rows[r];
    if (s < 0 || s >= src_rows) throw ShapeError("index_select: row out of range");
    for (int c = 0; c < cols; ++c) node->value[r * cols + c] = a.node()->value[s * cols + c];
  }
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, rows, cols]() {
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < cols; ++c)
          an->grad[rows[r] * cols + c] += on->grad[r * cols + c];
    };
  }
  return Tensor(node);
}

Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids) {
  return index_select(table, ids);
}

Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  if (input.ndim() != 2 || kernel.ndim() != 3) {
    throw ShapeError("conv1d: input must be (length, in_ch), kernel (out_ch, k, in_ch)");
  }
  const int length = input.dim(0), in_ch = input.dim(1);
  const int out_ch = kernel.dim(0), ksize = kernel.dim(1);
  if (kernel.dim(2) != in_ch) {
    throw ShapeError("conv1d: kernel channels " + std::to_string(kernel.dim(2)) +
                     " vs input channels " + std::to_string(in_ch));
  }
  if (ksize % 2 == 0) throw ShapeError("conv1d: kernel size must be odd");
  if (static_cast<int>(bias.size()) != out_ch) throw ShapeError("conv1d: bias size mismatch");
  const int half = ksize / 2;
  auto node = make_result({length, out_ch}, {input.node(), kernel.node(), bias.node()});
  const auto& x = input.node()->value;
  const auto& w = kernel.node()->value;
  for (int pos = 0; pos < length; ++pos) {
    for (int o = 0; o < out_ch; ++o) {
      double acc = bias.node()->value[o];
      for (int k = 0; k < ksize; ++k) {
        int src = pos + k - half;
        if (src < 0 || src >= length) continue;  // zero padding
        const double* wk = w.data() + (static_cast<std::size_t>(o) * ksize + k) * in_ch;
        const double* xs = x.data() + static_cast<std::size_t>(src) * in_ch;
        for (int c = 0; c < in_ch; ++c) acc += wk[c] * xs[c];
      }
      node->value[pos * out_ch + o] = acc;
    }
  }
  if (node->requires_grad) {
    auto xn = input.node(), wn = kernel.node(), bn = bias.node(), on = node;
    node->backward_fn = [xn, wn, bn, on, length, in_ch, out_ch, ksize, half]() {
      for (int pos = 0; pos < length; ++pos) {
        for (int o = 0; o < out_ch; ++o) {
          double g = on->grad[pos * out_ch + o];
          if (g == 0.0) continue;
          if (bn->requires_grad) bn->grad[o] += g;
          for (int k = 0; k < ksize; ++k) {
            int src = pos + k - half;
            if (src < 0 || src >= length) continue;
            std::size_t woff = (static_cast<std::size_t>(o) * ksize + k) * in_ch;
            std::size_t xoff = static_cast<std::size_t>(src) * in_ch;
            for (int c = 0; c < in_ch; ++c) {
              if (wn->requires_grad) wn->grad[woff + c] += g * xn->value[xoff + c];
              if (xn->requires_grad) xn->grad[xoff + c] += g * wn->value[woff + c];
            }
          }
        }
      }
    };
  }
  return Tensor(node);
}

Tensor dropout(const Tensor& a, double p, bool training, RandomGen& rng) {
  if (!training || p <= 0.0) return a;
  if (p >= 1.0) throw ShapeError("dropout: p must be < 1");
  auto node = make_result(a.shape(), {a.node()});
  std::vector<double> mask(a.size());
  double keep = 1.0 - p;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.uniform() < p ? 0.0 : 1.0 / keep;
    node->value[i] = a.node()->value[i] * mask[i];
  }
  if (node->requires_grad) {
    auto an = a.node();
    auto on = node;
    node->backward_fn = [an, on, mask = std::move(mask)]() {
      for (std::size_t i = 0; i < on->value.size(); ++i) an->grad[i] += mask[i] * on->grad[i];
    };
  }
  return Tensor(node);
}

Tensor cross_entropy(const Tensor& logits_row, int target) {
  const int cols = static_cast<int>(logits_row.size());
  if (target < 0 || target >= cols) throw ShapeError("cross_entropy: target out of range");
  auto node = make_result({1}, {logits_row.node()});
  const auto& x = logits_row.node()->value;
  double mx = x[0];
  for (int c = 1; c < cols; ++c) mx = std::max(mx, x[c]);
  double denom = 0.0;
  for (int c = 0; c < cols; ++c) denom += std::exp(x[c] - mx);
  double lse = mx + std::log(denom);
  node->value[0] = lse - x[target];
  if (node->requires_grad) {
    auto an = logits_row.node();
    auto on = node;
    node->backward_fn = [an, on, target, cols, mx, lse]() {
      double g = on->grad[0];
      for (int c = 0; c < cols; ++c) {
        double p = std::exp(an->value[c] - lse);
        an->grad[c] += g * (p - (c == target ? 1.0 : 0.0));
      }
      (void)mx;
    };
  }
  return Tensor(node);
}

// ---------------------------------------------------------------------------
// ParameterStore

Tensor ParameterStore::add(const std::string& name, std::vector<int> shape,
                           RandomGen& rng, double init_scale) {
  if (params_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  auto t = Tensor::zeros(shape, true);
  int fan_in = shape.size() >= 2 ? shape.back() : static_cast<int>(t.size());
  double s = init_scale >= 0 ? init_scale : 1.0 / std::sqrt(std::max(1, fan_in));
  for (auto& v : t.mutable_data()) v = rng.uniform(-s, s);
  params_[name] = t;
  m_[name].assign(t.size(), 0.0);
  v_[name].assign(t.size(), 0.0);
  return t;
}

Tensor ParameterStore::add_zeros(const std::string& name, std::vector<int> shape) {
  if (params_.count(name)) throw std::invalid_argument("duplicate parameter " + name);
  auto t = Tensor::zeros(shape, true);
  params_[name] = t;
  m_[name].assign(t.size(), 0.0);
  v_[name].assign(t.size(), 0.0);
  return t;
}

Tensor ParameterStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::invalid_argument("no parameter named " + name);
  return it->second;
}

void ParameterStore::zero_grad() {
  for (auto& [name, t] : params_) {
    auto node = t.node();
    node->grad.assign(node->value.size(), 0.0);
  }
}

double ParameterStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& [name, t] : params_) {
    for (double g : t.grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

void ParameterStore::clip_gradients(double max_norm) {
  double norm = grad_norm();
  if (norm > max_norm && norm > 0.0) {
    double factor = max_norm / norm;
    for (auto& [name, t] : params_) {
      for (auto& g : t.mutable_grad()) g *= factor;
    }
  }
}

void ParameterStore::adam_step(const AdamConfig& cfg) {
  for (const auto& [name, t] : params_) {
    for (double g : t.grad()) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in " + name);
    }
  }
  ++step_;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
  for (auto& [name, t] : params_) {
    auto& m = m_[name];
    auto& v = v_[name];
    auto val = t.mutable_data();
    auto g = t.grad();
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      val[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace retrosyn
