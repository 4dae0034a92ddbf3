#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace hft {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  bool consumed = false;
  std::string_view op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
  [[nodiscard]] bool is_leaf() const { return !backward; }
};

}  // namespace detail

/// Dense row-major float64 array that participates in a reverse-mode
/// differentiation graph.
///
/// Tensor is a cheap handle; copies share the underlying storage. Values of
/// op outputs are never mutated after construction. Leaves (parameters) may be
/// updated in place through mutable_values() by an optimizer.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  [[nodiscard]] bool defined() const noexcept { return node_ != nullptr; }
  [[nodiscard]] const Shape& shape() const { return node_->shape; }
  [[nodiscard]] std::size_t rank() const { return node_->shape.size(); }
  [[nodiscard]] std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  [[nodiscard]] std::size_t numel() const { return node_->value.size(); }

  [[nodiscard]] std::span<const double> values() const { return node_->value; }
  /// In-place access for optimizers and initializers; only valid on leaves.
  std::span<double> mutable_values();
  [[nodiscard]] double item() const;
  [[nodiscard]] double at(std::size_t i) const { return node_->value.at(i); }
  [[nodiscard]] double at(std::size_t row, std::size_t col) const;

  [[nodiscard]] bool requires_grad() const { return node_->requires_grad; }
  [[nodiscard]] bool has_grad() const { return !node_->grad.empty(); }
  [[nodiscard]] std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad() { return node_->ensure_grad(); }
  void zero_grad();
  void clear_grad() { node_->grad.clear(); }

  /// A new leaf holding a copy of the values, outside any graph.
  [[nodiscard]] Tensor detach(bool requires_grad = false) const;
  [[nodiscard]] std::string_view op_name() const { return node_->op; }
  [[nodiscard]] bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  [[nodiscard]] const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

/// Topologically ordered view of the ops that lead to a scalar loss.
class Graph {
 public:
  /// Throws NotScalarLoss unless loss holds exactly one value.
  explicit Graph(const Tensor& loss);

  [[nodiscard]] std::size_t size() const { return order_.size(); }
  [[nodiscard]] std::vector<std::string_view> op_names() const;

  /// Populates grad on every requires_grad tensor reachable from the loss.
  /// Leaf gradients accumulate; throws GraphAlreadyConsumed on a second call.
  void backward();

  /// Zeros intermediate gradients and re-arms backward().
  void reset();

 private:
  Tensor loss_;
  std::vector<std::shared_ptr<detail::Node>> order_;  // inputs before outputs
};

/// Graph(loss).backward()
void backward(const Tensor& loss);

// ---- ops ---------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
/// a[m×n] + bias[n] broadcast over rows.
Tensor add_row(const Tensor& a, const Tensor& bias);

Tensor relu(const Tensor& a);
/// 0.5·x·(1 + tanh(√(2/π)·(x + 0.044715·x³)))
Tensor gelu(const Tensor& a);

/// Normalizes the last axis to zero mean / unit variance (variance + 1e-5),
/// then applies gain and bias of the last-axis width.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias);
inline constexpr double kLayerNormEps = 1e-5;

/// Inverted dropout. Identity when !training or rate == 0. The keep mask is
/// drawn from the given stream, so equal seeds replay equal masks.
class Rng;
Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng);
/// Same with a fresh stream seeded by `seed`.
Tensor dropout(const Tensor& x, double rate, std::uint64_t seed, bool training = true);

/// exp(α·z) / Σ exp(α·z) over the last axis. Throws NonPositiveAlpha.
Tensor softmax_scaled(const Tensor& z, double alpha);
/// log of softmax_scaled, computed stably.
Tensor log_softmax_scaled(const Tensor& z, double alpha);
/// Row softmax of scores where key positions with mask 0 get score −1e9.
Tensor masked_softmax_rows(const Tensor& scores, std::span<const std::uint8_t> key_mask);
inline constexpr double kMaskedScore = -1e9;

/// Rows of `table` selected by ids → [ids.size() × cols].
Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids);
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);
Tensor concat_cols(std::span<const Tensor> parts);
/// Concatenates 1-D tensors.
Tensor concat(std::span<const Tensor> parts);
/// Stacks equal-length 1-D tensors into rows.
Tensor stack_rows(std::span<const Tensor> rows);

/// Element index of a 1-D tensor as a scalar.
Tensor pick(const Tensor& a, std::size_t index);
/// out[i] = a[i, cols[i]] for a 2-D tensor.
Tensor pick_rows(const Tensor& a, std::span<const int> cols);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

}  // namespace hft
