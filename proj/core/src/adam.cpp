#include "robustagg/adam.hpp"

#include <cmath>

namespace robustagg {

AdamState::AdamState(const Mlp& net, double beta1, double beta2, double delta)
    : beta1_(beta1), beta2_(beta2), delta_(delta) {
  for (const auto& l : net.layers()) {
    AffineLayer zm, zv;
    zm.w = Matrix::Zero(l.w.rows(), l.w.cols());
    zm.b = Vector::Zero(l.b.size());
    zv = zm;
    m_.push_back(std::move(zm));
    v_.push_back(std::move(zv));
  }
}

void AdamState::step(Mlp& net, const MlpGrad& grad, double lr) {
  if (m_.size() != grad.layers.size()) throw std::logic_error("adam: gradient shape mismatch");
  if (!grad.all_finite())
    throw numerical_error("adam: non-finite gradient encountered");
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto update = [&](Eigen::Ref<Matrix> p, Eigen::Ref<Matrix> m, Eigen::Ref<Matrix> v,
                      const Eigen::Ref<const Matrix>& g) {
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
      p.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + delta_);
    };
    update(layers[l].w, m_[l].w, v_[l].w, grad.layers[l].w);
    update(layers[l].b, m_[l].b, v_[l].b, grad.layers[l].b);
  }
}

double LrSchedule::rate(long t) const {
  if (t <= n_warm) return alpha0;
  auto k = (t - n_warm) / period;
  return alpha0 * std::pow(decay, static_cast<double>(k));
}

}  // namespace robustagg
