#pragma once

#include "robustagg/common.hpp"
#include "robustagg/random.hpp"

#include <vector>

namespace robustagg {

/// Feed-forward shape: input -> hidden (n_hidden times) -> scalar output,
/// ReLU between affine maps. n_hidden = 3 gives the five-affine-map stack
/// used throughout.
struct MlpShape {
  int input_dim = 1;
  int hidden_dim = 64;
  int n_hidden = 3;

  int n_affine() const { return n_hidden + 2; }
};

/// Hidden width rule: 64 times the input dimension of the function being
/// approximated.
inline int default_hidden_dim(int input_dim) { return 64 * input_dim; }

struct AffineLayer {
  Matrix w;  // rows = out, cols = in
  Vector b;
};

/// Gradients mirroring an Mlp's parameters.
struct MlpGrad {
  std::vector<AffineLayer> layers;

  void set_zero();
  bool all_finite() const;
};

/// ReLU multilayer perceptron over column batches, double precision.
/// Forward evaluation is read-only and thread-safe; anything touching a
/// workspace or gradients is single-writer.
class Mlp {
 public:
  explicit Mlp(MlpShape shape);  // zero-initialized

  /// He initialization: w ~ N(0, 2/fan_in), biases zero.
  static Mlp he_init(MlpShape shape, RandomSource& rng);

  const MlpShape& shape() const { return shape_; }
  const std::vector<AffineLayer>& layers() const { return layers_; }
  std::vector<AffineLayer>& layers() { return layers_; }
  std::size_t parameter_count() const;

  /// Evaluate on a batch of columns (input_dim x B), no gradient state.
  Vector forward(const Eigen::Ref<const Matrix>& x) const;

  MlpGrad zero_grad() const;

 private:
  MlpShape shape_;
  std::vector<AffineLayer> layers_;
};

/// Stored activations of one recorded forward pass. backward() without a
/// prior forward on the same workspace is a contract violation.
class MlpWorkspace {
 public:
  bool has_forward() const { return has_forward_; }

 private:
  friend Vector forward_batch(const Mlp&, const Eigen::Ref<const Matrix>&, MlpWorkspace&);
  friend void backward(const Mlp&, MlpWorkspace&, const Eigen::Ref<const Vector>&, MlpGrad&);

  std::vector<Matrix> act;  // post-ReLU activations per hidden level
  Matrix input;
  std::vector<Matrix> delta_buf;
  bool has_forward_ = false;
};

/// Forward pass recording activations for a later backward pass.
Vector forward_batch(const Mlp& net, const Eigen::Ref<const Matrix>& x, MlpWorkspace& ws);

/// Reverse-mode gradients of sum_j out_grad(j) * net(x_j) accumulated into
/// grad. ReLU subgradient at zero is taken as zero. Consumes the stored
/// forward state.
void backward(const Mlp& net, MlpWorkspace& ws, const Eigen::Ref<const Vector>& out_grad,
              MlpGrad& grad);

}  // namespace robustagg
