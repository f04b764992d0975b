#include "robustagg/mlp.hpp"

#include <cmath>

namespace robustagg {

namespace {

std::vector<std::pair<int, int>> layer_dims(const MlpShape& s) {
  std::vector<std::pair<int, int>> dims;  // (out, in)
  dims.reserve(static_cast<std::size_t>(s.n_affine()));
  dims.emplace_back(s.hidden_dim, s.input_dim);
  for (int l = 0; l < s.n_hidden; ++l) dims.emplace_back(s.hidden_dim, s.hidden_dim);
  dims.emplace_back(1, s.hidden_dim);
  return dims;
}

}  // namespace

void MlpGrad::set_zero() {
  for (auto& l : layers) {
    l.w.setZero();
    l.b.setZero();
  }
}

bool MlpGrad::all_finite() const {
  for (const auto& l : layers)
    if (!l.w.allFinite() || !l.b.allFinite()) return false;
  return true;
}

Mlp::Mlp(MlpShape shape) : shape_(shape) {
  require(shape.input_dim >= 1 && shape.hidden_dim >= 1 && shape.n_hidden >= 1,
          "mlp: shape entries must be positive");
  for (auto [out, in] : layer_dims(shape_)) {
    AffineLayer l;
    l.w = Matrix::Zero(out, in);
    l.b = Vector::Zero(out);
    layers_.push_back(std::move(l));
  }
}

Mlp Mlp::he_init(MlpShape shape, RandomSource& rng) {
  Mlp net(shape);
  for (auto& l : net.layers_) {
    double sd = std::sqrt(2.0 / static_cast<double>(l.w.cols()));
    double* p = l.w.data();
    for (Eigen::Index i = 0; i < l.w.size(); ++i) p[i] = sd * rng.normal();
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size() + l.b.size());
  return n;
}

MlpGrad Mlp::zero_grad() const {
  MlpGrad g;
  for (const auto& l : layers_) {
    AffineLayer z;
    z.w = Matrix::Zero(l.w.rows(), l.w.cols());
    z.b = Vector::Zero(l.b.size());
    g.layers.push_back(std::move(z));
  }
  return g;
}

Vector Mlp::forward(const Eigen::Ref<const Matrix>& x) const {
  if (x.rows() != shape_.input_dim) throw std::logic_error("mlp forward: input dimension mismatch");
  const auto n_aff = layers_.size();
  Matrix a = ((layers_[0].w * x).colwise() + layers_[0].b).cwiseMax(0.0);
  for (std::size_t l = 1; l + 1 < n_aff; ++l)
    a = ((layers_[l].w * a).colwise() + layers_[l].b).cwiseMax(0.0);
  const auto& last = layers_.back();
  return (last.w * a).transpose() + Vector::Constant(x.cols(), last.b(0));
}

Vector forward_batch(const Mlp& net, const Eigen::Ref<const Matrix>& x, MlpWorkspace& ws) {
  const auto& shape = net.shape();
  if (x.rows() != shape.input_dim) throw std::logic_error("mlp forward: input dimension mismatch");
  const auto& layers = net.layers();
  const auto n_hidden_levels = layers.size() - 1;  // activations after each hidden affine

  ws.input = x;
  ws.act.resize(n_hidden_levels);
  ws.delta_buf.resize(n_hidden_levels);

  const Eigen::Index B = x.cols();
  ws.act[0].resize(layers[0].w.rows(), B);
  ws.act[0].noalias() = layers[0].w * x;
  ws.act[0].colwise() += layers[0].b;
  ws.act[0] = ws.act[0].cwiseMax(0.0);
  for (std::size_t l = 1; l < n_hidden_levels; ++l) {
    ws.act[l].resize(layers[l].w.rows(), B);
    ws.act[l].noalias() = layers[l].w * ws.act[l - 1];
    ws.act[l].colwise() += layers[l].b;
    ws.act[l] = ws.act[l].cwiseMax(0.0);
  }
  const auto& last = layers.back();
  Vector out = (last.w * ws.act[n_hidden_levels - 1]).transpose() +
               Vector::Constant(B, last.b(0));
  ws.has_forward_ = true;
  return out;
}

void backward(const Mlp& net, MlpWorkspace& ws, const Eigen::Ref<const Vector>& out_grad,
              MlpGrad& grad) {
  if (!ws.has_forward()) throw std::logic_error("mlp backward: no recorded forward pass");
  const auto& layers = net.layers();
  if (grad.layers.size() != layers.size()) throw std::logic_error("mlp backward: grad shape mismatch");
  const auto n_hidden_levels = layers.size() - 1;
  if (out_grad.size() != ws.act[0].cols()) throw std::logic_error("mlp backward: batch size mismatch");

  // Output layer: scalar row, so its gradient is a weighted sum of the top
  // activations.
  const auto& top = ws.act[n_hidden_levels - 1];
  grad.layers.back().w.noalias() += (top * out_grad).transpose();
  grad.layers.back().b(0) += out_grad.sum();

  // delta for the topmost hidden level; ReLU mask via act > 0 (subgradient 0
  // at the kink).
  {
    Matrix& top_delta = ws.delta_buf[n_hidden_levels - 1];
    top_delta.resize(top.rows(), top.cols());
    top_delta.noalias() = layers.back().w.transpose() * out_grad.transpose();
    top_delta = (top.array() > 0.0).select(top_delta, 0.0);
  }

  for (std::size_t l = n_hidden_levels - 1; l > 0; --l) {
    const Matrix& delta = ws.delta_buf[l];
    const Matrix& below = ws.act[l - 1];
    grad.layers[l].w.noalias() += delta * below.transpose();
    grad.layers[l].b.noalias() += delta.rowwise().sum();
    Matrix& next_delta = ws.delta_buf[l - 1];
    next_delta.resize(below.rows(), below.cols());
    next_delta.noalias() = layers[l].w.transpose() * delta;
    next_delta = (below.array() > 0.0).select(next_delta, 0.0);
  }

  grad.layers[0].w.noalias() += ws.delta_buf[0] * ws.input.transpose();
  grad.layers[0].b.noalias() += ws.delta_buf[0].rowwise().sum();
  ws.has_forward_ = false;
}

}  // namespace robustagg
