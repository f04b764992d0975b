#include "robustagg/sampling_measure.hpp"

namespace robustagg {

Vector resolve_epsilon(const SamplingMeasureSpec& spec, const ReferenceMeasure& ref) {
  if (spec.epsilon.size() == 0) return 0.05 * ref.coordinate_sds();
  require(spec.epsilon.size() == ref.dim(), "theta: epsilon length must equal dimension");
  require((spec.epsilon.array() >= 0.0).all(), "theta: epsilon must be nonnegative");
  return spec.epsilon;
}

ThetaBatch sample_theta(const SamplingMeasureSpec& spec, const ReferenceMeasure& ref,
                        std::size_t n, RandomSource& rng) {
  ThetaBatch batch;
  batch.x = ref.sample(n, rng);
  switch (spec.kind) {
    case SamplingMeasureSpec::Kind::Prod:
      batch.y = ref.sample_product_of_blocks(n, rng);
      return batch;
    case SamplingMeasureSpec::Kind::Half: {
      batch.y = ref.sample_product_of_blocks(n, rng);
      for (std::size_t i = 0; i < n; ++i)
        if (rng.uniform() < 0.5) batch.y.row(static_cast<Eigen::Index>(i)) = batch.x.row(static_cast<Eigen::Index>(i));
      return batch;
    }
    case SamplingMeasureSpec::Kind::Third: {
      Vector eps = resolve_epsilon(spec, ref);
      batch.y = ref.sample_product_of_blocks(n, rng);
      for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        auto r = static_cast<Eigen::Index>(i);
        if (u < 0.5) continue;  // product component
        batch.y.row(r) = batch.x.row(r);
        if (u >= 0.75) {
          for (Eigen::Index c = 0; c < ref.dim(); ++c) batch.y(r, c) += eps(c) * rng.normal();
        }
      }
      return batch;
    }
  }
  return batch;
}

}  // namespace robustagg
