#include "hft/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "hft/error.hpp"
#include "hft/rng.hpp"

namespace hft {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

std::string shape_str(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) out << (i ? "x" : "") << shape[i];
  out << ']';
  return out.str();
}

[[noreturn]] void shape_error(std::string_view op, const Shape& a, const Shape& b) {
  throw Error(ErrorCode::ShapeMismatch,
              std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

void require_rank(std::string_view op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw Error(ErrorCode::ShapeMismatch, std::string(op) + ": expected rank " +
                                              std::to_string(rank) + ", got " +
                                              shape_str(t.shape()));
  }
}

std::size_t last_dim(const Tensor& t) { return t.rank() == 0 ? 1 : t.shape().back(); }

// Builds the output node. When no input requires grad the result is a plain
// constant and the backward rule is dropped.
Tensor make_op(Shape shape, std::vector<double> value, std::initializer_list<Tensor> inputs,
               std::string_view name, std::function<void(Node&)> backward_fn) {
#ifndef NDEBUG
  for (double v : value) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, std::string(name));
  }
#endif
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = name;
  bool needs_grad = false;
  for (const Tensor& in : inputs) needs_grad = needs_grad || in.requires_grad();
  if (needs_grad) {
    node->requires_grad = true;
    for (const Tensor& in : inputs) node->parents.push_back(in.node());
    node->backward = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

Tensor make_op_n(Shape shape, std::vector<double> value, std::span<const Tensor> inputs,
                 std::string_view name, std::function<void(Node&)> backward_fn) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = name;
  bool needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                [](const Tensor& t) { return t.requires_grad(); });
  if (needs_grad) {
    node->requires_grad = true;
    for (const Tensor& in : inputs) node->parents.push_back(in.node());
    node->backward = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

// Parent i wants a gradient.
bool wants(const Node& self, std::size_t i) { return self.parents[i]->requires_grad; }

}  // namespace

// ---- Tensor ------------------------------------------------------------

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : node_(std::make_shared<Node>()) {
  if (shape_numel(shape) != values.size()) {
    throw Error(ErrorCode::ShapeMismatch, "shape " + shape_str(shape) + " holds " +
                                              std::to_string(shape_numel(shape)) +
                                              " values, got " + std::to_string(values.size()));
  }
  for (std::size_t d : shape) {
    if (d == 0) throw Error(ErrorCode::ShapeMismatch, "zero-sized dimension in " + shape_str(shape));
  }
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> v(shape_numel(shape), 0.0);
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({}, {value}, requires_grad); }

Tensor Tensor::vector(std::vector<double> values, bool requires_grad) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values), requires_grad);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                      bool requires_grad) {
  return Tensor({rows, cols}, std::move(values), requires_grad);
}

std::span<double> Tensor::mutable_values() {
  if (!node_->is_leaf()) {
    throw Error(ErrorCode::ShapeMismatch, "mutable_values() on a non-leaf tensor");
  }
  return node_->value;
}

double Tensor::item() const {
  if (numel() != 1) throw Error(ErrorCode::NotScalarLoss, "item() on " + shape_str(shape()));
  return node_->value[0];
}

double Tensor::at(std::size_t row, std::size_t col) const {
  return node_->value.at(row * last_dim(*this) + col);
}

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::detach(bool requires_grad) const {
  return Tensor(node_->shape, node_->value, requires_grad);
}

// ---- Graph -------------------------------------------------------------

Graph::Graph(const Tensor& loss) : loss_(loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw Error(ErrorCode::NotScalarLoss,
                loss.defined() ? "loss has shape " + shape_str(loss.shape()) : "undefined loss");
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS; children (inputs) are emitted before parents.
  std::unordered_set<const Node*> visited;
  std::vector<std::pair<NodePtr, std::size_t>> stack;
  stack.emplace_back(loss.node(), 0);
  visited.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      const NodePtr& in = node->parents[next++];
      if (in->requires_grad && visited.insert(in.get()).second) stack.emplace_back(in, 0);
    } else {
      order_.push_back(node);
      stack.pop_back();
    }
  }
}

std::vector<std::string_view> Graph::op_names() const {
  std::vector<std::string_view> names;
  names.reserve(order_.size());
  for (const auto& n : order_) names.push_back(n->op);
  return names;
}

void Graph::backward() {
  Node& root = *loss_.node();
  if (root.consumed) throw Error(ErrorCode::GraphAlreadyConsumed, "backward() called twice");
  root.consumed = true;
  if (order_.empty()) return;

  for (const auto& n : order_) {
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  }
  root.ensure_grad()[0] += 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    Node& n = **it;
    if (!n.is_leaf()) n.backward(n);
  }
}

void Graph::reset() {
  for (const auto& n : order_) {
    if (!n->is_leaf()) std::fill(n->grad.begin(), n->grad.end(), 0.0);
  }
  loss_.node()->consumed = false;
}

void backward(const Tensor& loss) { Graph(loss).backward(); }

// ---- linear algebra ----------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2);
  require_rank("matmul", b, 2);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) shape_error("matmul", a.shape(), b.shape());
  std::vector<double> out(m * n, 0.0);
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      const double* brow = bv.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += aip * brow[j];
    }
  }
  return make_op({m, n}, std::move(out), {a, b}, "matmul", [m, k, n](Node& self) {
    const auto& g = self.grad;
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    if (wants(self, 0)) {
      auto& ga = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * B[p * n + j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (wants(self, 1)) {
      auto& gb = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = A[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2);
  const std::size_t r = a.dim(0), c = a.dim(1);
  std::vector<double> out(r * c);
  const auto v = a.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = v[i * c + j];
  return make_op({c, r}, std::move(out), {a}, "transpose", [r, c](Node& self) {
    auto& ga = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += self.grad[j * r + i];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) shape_error("reshape", a.shape(), shape);
  std::vector<double> out(a.values().begin(), a.values().end());
  return make_op(std::move(shape), std::move(out), {a}, "reshape", [](Node& self) {
    auto& ga = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += self.grad[i];
  });
}

// ---- elementwise -------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
  std::vector<double> out(a.numel());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_op(a.shape(), std::move(out), {a, b}, "add", [](Node& self) {
    for (std::size_t p = 0; p < 2; ++p) {
      if (!wants(self, p)) continue;
      auto& g = self.parents[p]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
  std::vector<double> out(a.numel());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_op(a.shape(), std::move(out), {a, b}, "sub", [](Node& self) {
    if (wants(self, 0)) {
      auto& g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
  std::vector<double> out(a.numel());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_op(a.shape(), std::move(out), {a, b}, "mul", [](Node& self) {
    const auto& A = self.parents[0]->value;
    const auto& B = self.parents[1]->value;
    if (wants(self, 0)) {
      auto& g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * B[i];
    }
    if (wants(self, 1)) {
      auto& g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * A[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.numel());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * factor;
  return make_op(a.shape(), std::move(out), {a}, "scale", [factor](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Tensor add_row(const Tensor& a, const Tensor& bias) {
  require_rank("add_row", a, 2);
  require_rank("add_row", bias, 1);
  const std::size_t m = a.dim(0), n = a.dim(1);
  if (bias.dim(0) != n) shape_error("add_row", a.shape(), bias.shape());
  std::vector<double> out(m * n);
  const auto av = a.values(), bv = bias.values();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = av[i * n + j] + bv[j];
  return make_op({m, n}, std::move(out), {a, bias}, "add_row", [m, n](Node& self) {
    if (wants(self, 0)) {
      auto& g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      auto& g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
    }
  });
}

Tensor relu(const Tensor& a) {
  std::vector<double> out(a.numel());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > 0.0 ? av[i] : 0.0;
  return make_op(a.shape(), std::move(out), {a}, "relu", [](Node& self) {
    const auto& A = self.parents[0]->value;
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (A[i] > 0.0) g[i] += self.grad[i];
  });
}

Tensor gelu(const Tensor& a) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  std::vector<double> out(a.numel());
  const auto av = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x = av[i];
    out[i] = 0.5 * x * (1.0 + std::tanh(kC * (x + kA * x * x * x)));
  }
  return make_op(a.shape(), std::move(out), {a}, "gelu", [](Node& self) {
    const auto& A = self.parents[0]->value;
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = A[i];
      const double u = kC * (x + kA * x * x * x);
      const double t = std::tanh(u);
      const double du = kC * (1.0 + 3.0 * kA * x * x);
      g[i] += self.grad[i] * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
  const std::size_t n = last_dim(x);
  require_rank("layer_norm", gain, 1);
  require_rank("layer_norm", bias, 1);
  if (gain.dim(0) != n || bias.dim(0) != n) shape_error("layer_norm", x.shape(), gain.shape());
  const std::size_t rows = x.numel() / n;
  const auto xv = x.values(), gv = gain.values(), bv = bias.values();
  std::vector<double> out(x.numel()), xhat(x.numel()), inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    inv_std[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      const double h = (row[j] - mu) * inv;
      xhat[r * n + j] = h;
      out[r * n + j] = h * gv[j] + bv[j];
    }
  }
  return make_op(x.shape(), std::move(out), {x, gain, bias}, "layer_norm",
                 [n, rows, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                   const auto& G = self.parents[1]->value;
                   const auto& dy = self.grad;
                   if (wants(self, 0)) {
                     auto& gx = self.parents[0]->ensure_grad();
                     const double nn = static_cast<double>(n);
                     for (std::size_t r = 0; r < rows; ++r) {
                       double sum_d = 0.0, sum_dh = 0.0;
                       for (std::size_t j = 0; j < n; ++j) {
                         const double d = dy[r * n + j] * G[j];
                         sum_d += d;
                         sum_dh += d * xhat[r * n + j];
                       }
                       for (std::size_t j = 0; j < n; ++j) {
                         const double d = dy[r * n + j] * G[j];
                         gx[r * n + j] +=
                             inv_std[r] / nn * (nn * d - sum_d - xhat[r * n + j] * sum_dh);
                       }
                     }
                   }
                   if (wants(self, 1)) {
                     auto& gg = self.parents[1]->ensure_grad();
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t j = 0; j < n; ++j) gg[j] += dy[r * n + j] * xhat[r * n + j];
                   }
                   if (wants(self, 2)) {
                     auto& gb = self.parents[2]->ensure_grad();
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t j = 0; j < n; ++j) gb[j] += dy[r * n + j];
                   }
                 });
}

Tensor dropout(const Tensor& x, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw Error(ErrorCode::InvalidConfig, "dropout rate must be in [0, 1)");
  }
  if (!training || rate == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = rng.uniform() >= rate ? keep_scale : 0.0;
  std::vector<double> out(x.numel());
  const auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return make_op(x.shape(), std::move(out), {x}, "dropout", [mask = std::move(mask)](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

Tensor dropout(const Tensor& x, double rate, std::uint64_t seed, bool training) {
  Rng rng(seed);
  return dropout(x, rate, training, rng);
}

// ---- softmax family ----------------------------------------------------

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::NonPositiveAlpha, "alpha must be > 0, got " + std::to_string(alpha));
  }
}

// Row-wise softmax of alpha*z; writes probabilities.
void softmax_rows(std::span<const double> z, std::size_t n, double alpha, std::vector<double>& p) {
  const std::size_t rows = z.size() / n;
  p.resize(z.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* zr = z.data() + r * n;
    double* pr = p.data() + r * n;
    double mx = alpha * zr[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, alpha * zr[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pr[j] = std::exp(alpha * zr[j] - mx);
      total += pr[j];
    }
    for (std::size_t j = 0; j < n; ++j) pr[j] /= total;
  }
}

}  // namespace

Tensor softmax_scaled(const Tensor& z, double alpha) {
  check_alpha(alpha);
  const std::size_t n = last_dim(z);
  std::vector<double> p;
  softmax_rows(z.values(), n, alpha, p);
  std::vector<double> out = p;
  return make_op(z.shape(), std::move(out), {z}, "softmax_scaled",
                 [n, alpha, p = std::move(p)](Node& self) {
                   auto& g = self.parents[0]->ensure_grad();
                   const std::size_t rows = p.size() / n;
                   for (std::size_t r = 0; r < rows; ++r) {
                     double dot = 0.0;
                     for (std::size_t j = 0; j < n; ++j) dot += self.grad[r * n + j] * p[r * n + j];
                     for (std::size_t j = 0; j < n; ++j)
                       g[r * n + j] += alpha * p[r * n + j] * (self.grad[r * n + j] - dot);
                   }
                 });
}

Tensor log_softmax_scaled(const Tensor& z, double alpha) {
  check_alpha(alpha);
  const std::size_t n = last_dim(z);
  const auto zv = z.values();
  const std::size_t rows = z.numel() / n;
  std::vector<double> out(z.numel()), p(z.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* zr = zv.data() + r * n;
    double mx = alpha * zr[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, alpha * zr[j]);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += std::exp(alpha * zr[j] - mx);
    const double log_total = std::log(total);
    for (std::size_t j = 0; j < n; ++j) {
      out[r * n + j] = alpha * zr[j] - mx - log_total;
      p[r * n + j] = std::exp(out[r * n + j]);
    }
  }
  return make_op(z.shape(), std::move(out), {z}, "log_softmax_scaled",
                 [n, rows, alpha, p = std::move(p)](Node& self) {
                   auto& g = self.parents[0]->ensure_grad();
                   for (std::size_t r = 0; r < rows; ++r) {
                     double total = 0.0;
                     for (std::size_t j = 0; j < n; ++j) total += self.grad[r * n + j];
                     for (std::size_t j = 0; j < n; ++j)
                       g[r * n + j] += alpha * (self.grad[r * n + j] - p[r * n + j] * total);
                   }
                 });
}

Tensor masked_softmax_rows(const Tensor& scores, std::span<const std::uint8_t> key_mask) {
  require_rank("masked_softmax_rows", scores, 2);
  const std::size_t rows = scores.dim(0), n = scores.dim(1);
  if (key_mask.size() != n) {
    shape_error("masked_softmax_rows", scores.shape(), Shape{key_mask.size()});
  }
  std::vector<double> masked(scores.values().begin(), scores.values().end());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < n; ++j)
      if (!key_mask[j]) masked[r * n + j] = kMaskedScore;
  std::vector<double> p;
  softmax_rows(masked, n, 1.0, p);
  std::vector<double> out = p;
  std::vector<std::uint8_t> mask(key_mask.begin(), key_mask.end());
  return make_op({rows, n}, std::move(out), {scores}, "masked_softmax",
                 [rows, n, p = std::move(p), mask = std::move(mask)](Node& self) {
                   auto& g = self.parents[0]->ensure_grad();
                   for (std::size_t r = 0; r < rows; ++r) {
                     double dot = 0.0;
                     for (std::size_t j = 0; j < n; ++j) dot += self.grad[r * n + j] * p[r * n + j];
                     for (std::size_t j = 0; j < n; ++j)
                       if (mask[j]) g[r * n + j] += p[r * n + j] * (self.grad[r * n + j] - dot);
                   }
                 });
}

// ---- indexing ----------------------------------------------------------

Tensor gather_rows(const Tensor& table, std::span<const std::int32_t> ids) {
  require_rank("gather_rows", table, 2);
  const std::size_t vocab = table.dim(0), h = table.dim(1);
  if (ids.empty()) throw Error(ErrorCode::ShapeMismatch, "gather_rows: no ids");
  std::vector<double> out(ids.size() * h);
  const auto tv = table.values();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(ids[i]) +
                                               " outside table of " + std::to_string(vocab) +
                                               " rows");
    }
    std::copy_n(tv.data() + static_cast<std::size_t>(ids[i]) * h, h, out.data() + i * h);
  }
  std::vector<std::int32_t> idx(ids.begin(), ids.end());
  return make_op({ids.size(), h}, std::move(out), {table}, "gather_rows",
                 [h, idx = std::move(idx)](Node& self) {
                   auto& g = self.parents[0]->ensure_grad();
                   for (std::size_t i = 0; i < idx.size(); ++i) {
                     double* dst = g.data() + static_cast<std::size_t>(idx[i]) * h;
                     for (std::size_t j = 0; j < h; ++j) dst[j] += self.grad[i * h + j];
                   }
                 });
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
  require_rank("slice_rows", a, 2);
  const std::size_t n = a.dim(1);
  if (count == 0 || start + count > a.dim(0)) shape_error("slice_rows", a.shape(), {start, count});
  const auto av = a.values();
  std::vector<double> out(av.begin() + static_cast<std::ptrdiff_t>(start * n),
                          av.begin() + static_cast<std::ptrdiff_t>((start + count) * n));
  return make_op({count, n}, std::move(out), {a}, "slice_rows", [start, n](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[start * n + i] += self.grad[i];
  });
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
  require_rank("slice_cols", a, 2);
  const std::size_t m = a.dim(0), n = a.dim(1);
  if (count == 0 || start + count > n) shape_error("slice_cols", a.shape(), {start, count});
  const auto av = a.values();
  std::vector<double> out(m * count);
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(av.data() + i * n + start, count, out.data() + i * count);
  return make_op({m, count}, std::move(out), {a}, "slice_cols", [m, n, start, count](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < count; ++j) g[i * n + start + j] += self.grad[i * count + j];
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw Error(ErrorCode::ShapeMismatch, "concat_cols: no parts");
  const std::size_t m = parts[0].rank() == 2 ? parts[0].dim(0) : 0;
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    require_rank("concat_cols", p, 2);
    if (p.dim(0) != m) shape_error("concat_cols", parts[0].shape(), p.shape());
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto pv = parts[k].values();
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(pv.data() + i * widths[k], widths[k], out.data() + i * total + offset);
    offset += widths[k];
  }
  return make_op_n({m, total}, std::move(out), parts, "concat_cols",
                   [m, total, widths = std::move(widths)](Node& self) {
                     std::size_t off = 0;
                     for (std::size_t k = 0; k < widths.size(); ++k) {
                       if (wants(self, k)) {
                         auto& g = self.parents[k]->ensure_grad();
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < widths[k]; ++j)
                             g[i * widths[k] + j] += self.grad[i * total + off + j];
                       }
                       off += widths[k];
                     }
                   });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw Error(ErrorCode::ShapeMismatch, "concat: no parts");
  std::vector<double> out;
  std::vector<std::size_t> sizes;
  for (const Tensor& p : parts) {
    require_rank("concat", p, 1);
    out.insert(out.end(), p.values().begin(), p.values().end());
    sizes.push_back(p.numel());
  }
  const std::size_t n = out.size();
  return make_op_n({n}, std::move(out), parts, "concat", [sizes = std::move(sizes)](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      if (wants(self, k)) {
        auto& g = self.parents[k]->ensure_grad();
        for (std::size_t j = 0; j < sizes[k]; ++j) g[j] += self.grad[off + j];
      }
      off += sizes[k];
    }
  });
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw Error(ErrorCode::ShapeMismatch, "stack_rows: no rows");
  const std::size_t n = rows[0].numel();
  std::vector<double> out;
  out.reserve(rows.size() * n);
  for (const Tensor& r : rows) {
    require_rank("stack_rows", r, 1);
    if (r.numel() != n) shape_error("stack_rows", rows[0].shape(), r.shape());
    out.insert(out.end(), r.values().begin(), r.values().end());
  }
  return make_op_n({rows.size(), n}, std::move(out), rows, "stack_rows", [n](Node& self) {
    for (std::size_t k = 0; k < self.parents.size(); ++k) {
      if (!wants(self, k)) continue;
      auto& g = self.parents[k]->ensure_grad();
      for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[k * n + j];
    }
  });
}

Tensor pick(const Tensor& a, std::size_t index) {
  require_rank("pick", a, 1);
  if (index >= a.numel()) shape_error("pick", a.shape(), {index});
  return make_op({}, {a.at(index)}, {a}, "pick", [index](Node& self) {
    self.parents[0]->ensure_grad()[index] += self.grad[0];
  });
}

Tensor pick_rows(const Tensor& a, std::span<const int> cols) {
  require_rank("pick_rows", a, 2);
  const std::size_t m = a.dim(0), n = a.dim(1);
  if (cols.size() != m) shape_error("pick_rows", a.shape(), {cols.size()});
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (cols[i] < 0 || static_cast<std::size_t>(cols[i]) >= n) {
      shape_error("pick_rows", a.shape(), {static_cast<std::size_t>(cols[i])});
    }
    out[i] = a.values()[i * n + static_cast<std::size_t>(cols[i])];
  }
  std::vector<int> idx(cols.begin(), cols.end());
  return make_op({m}, std::move(out), {a}, "pick_rows", [n, idx = std::move(idx)](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < idx.size(); ++i)
      g[i * n + static_cast<std::size_t>(idx[i])] += self.grad[i];
  });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  return make_op({}, {total}, {a}, "sum", [](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  double total = 0.0;
  for (double v : a.values()) total += v;
  const double n = static_cast<double>(a.numel());
  return make_op({}, {total / n}, {a}, "mean", [n](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (double& v : g) v += self.grad[0] / n;
  });
}

}  // namespace hft
