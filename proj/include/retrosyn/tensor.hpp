//
// Project RetroSyn - Copyright 2026 RetroSyn Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef RETROSYN_TENSOR_HPP
#define RETROSYN_TENSOR_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace retrosyn {

class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic random source. Distributions are implemented in-repo so
/// that seeded runs are bit-identical across standard libraries.
class RandomGen {
 public:
  explicit RandomGen(std::uint64_t seed = 0);
  double uniform();                 // [0, 1)
  double uniform(double lo, double hi);
  double normal();                  // Box-Muller
  std::uint64_t next_u64();

 private:
  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct TensorNode;
using TensorNodePtr = std::shared_ptr<TensorNode>;

struct TensorNode {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  std::vector<TensorNodePtr> parents;
  std::function<void()> backward_fn;  // accumulates into parents' grads
};

/// Dense tensor handle with reverse-mode autodiff provenance. Copies are
/// shallow; the underlying buffer is shared.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(TensorNodePtr node) : node_(std::move(node)) {}

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor from_data(std::vector<int> shape, std::vector<double> data,
                          bool requires_grad = false);
  static Tensor scalar(double v);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape.at(i); }
  int ndim() const { return static_cast<int>(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }
  std::span<const double> data() const { return node_->value; }
  std::span<double> mutable_data() { return node_->value; }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->grad; }
  double item() const;
  double at(int i) const { return node_->value.at(i); }
  double at(int r, int c) const;

  bool requires_grad() const { return node_->requires_grad; }
  TensorNodePtr node() const { return node_; }

  /// Runs reverse-mode accumulation from this scalar.
  void backward() const;

 private:
  TensorNodePtr node_;
};

// --- forward primitives -----------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);          // (n,k)x(k,m)
Tensor add(const Tensor& a, const Tensor& b);             // same shape
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);             // elementwise
Tensor add_rowvec(const Tensor& m, const Tensor& v);      // bias over rows
Tensor scale(const Tensor& a, double s);
Tensor affine(const Tensor& a, double s, double b);       // s*a + b
Tensor concat_cols(const std::vector<Tensor>& parts);     // along last dim
Tensor transpose(const Tensor& a);                        // (n,m) -> (m,n)
Tensor relu(const Tensor& a);
Tensor tanh_t(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softmax_rows(const Tensor& a);                     // log-sum-exp stable
Tensor log_softmax_rows(const Tensor& a);
Tensor sum_all(const Tensor& a);                          // -> scalar
Tensor sum_rows(const Tensor& a);                         // (n,d) -> (1,d)
Tensor segment_sum(const Tensor& values, const std::vector<int>& ids,
                   int num_segments);                     // (r,d) -> (s,d)
Tensor index_select(const Tensor& a, const std::vector<int>& rows);
Tensor embedding_lookup(const Tensor& table, const std::vector<int>& ids);
/// (length, in_ch) -> (length, out_ch); kernel (out_ch, k, in_ch), zero
/// same-padding, odd k.
Tensor conv1d(const Tensor& input, const Tensor& kernel, const Tensor& bias);
/// Identity in eval mode; in training, zeroes entries with probability p
/// and rescales survivors by 1/(1-p).
Tensor dropout(const Tensor& a, double p, bool training, RandomGen& rng);
/// -log softmax(logits)[target] for a single row of logits.
Tensor cross_entropy(const Tensor& logits_row, int target);

// --- parameters and optimizer ----------------------------------------------

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Named trainable parameters plus Adam state.
class ParameterStore {
 public:
  Tensor add(const std::string& name, std::vector<int> shape, RandomGen& rng,
             double init_scale = -1.0);  // <0: 1/sqrt(fan_in) uniform
  Tensor add_zeros(const std::string& name, std::vector<int> shape);
  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) > 0; }
  const std::map<std::string, Tensor>& params() const { return params_; }

  void zero_grad();
  double grad_norm() const;
  /// Scales all grads by max_norm/norm when norm exceeds max_norm.
  void clip_gradients(double max_norm);
  /// Bias-corrected Adam update. Throws NumericError on non-finite grads.
  void adam_step(const AdamConfig& cfg);

  std::uint64_t step_count() const { return step_; }

 private:
  friend void save_checkpoint(const std::string&, const ParameterStore&,
                              const std::map<std::string, std::string>&, bool);
  friend void load_checkpoint(const std::string&, ParameterStore&,
                              std::map<std::string, std::string>&);
  std::map<std::string, Tensor> params_;
  std::map<std::string, std::vector<double>> m_, v_;
  std::uint64_t step_ = 0;
};

/// Self-describing checkpoint container: versioned header, per-parameter
/// name/shape/precision/raw little-endian values, Adam state and metadata.
void save_checkpoint(const std::string& path, const ParameterStore& store,
                     const std::map<std::string, std::string>& metadata,
                     bool float32 = true);
void load_checkpoint(const std::string& path, ParameterStore& store,
                     std::map<std::string, std::string>& metadata);

}  // namespace retrosyn

#endif  // RETROSYN_TENSOR_HPP
