#include "owcl/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace owcl {

Scalar cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw NumericError("cosine_similarity: dimension mismatch");
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw NumericError("cosine_similarity: zero vector");
  }
  return a.dot(b) / (na * nb);
}

Vector temperature_transform(const Vector& p, Scalar temperature) {
  if (temperature <= 0.0) {
    throw NumericError("temperature_transform: temperature must be positive");
  }
  if ((p.array() < 0.0).any()) {
    throw NumericError("temperature_transform: negative weight");
  }
  Vector out = p.array().pow(1.0 / temperature);
  const Scalar z = out.sum();
  if (z <= 0.0) {
    throw NumericError("temperature_transform: all-zero input");
  }
  return out / z;
}

void OptimizerConfig::validate() const {
  if (learning_rate < 0.0) throw NumericError("OptimizerConfig: learning_rate must be >= 0");
  if (weight_decay < 0.0) throw NumericError("OptimizerConfig: weight_decay must be >= 0");
  if (epochs <= 0) throw NumericError("OptimizerConfig: epochs must be > 0");
  if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0) {
    throw NumericError("OptimizerConfig: betas must lie in [0, 1)");
  }
}

void adam_step(Vector& params, const Vector& grads, AdamState& state,
               const OptimizerConfig& config) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw NumericError("adam_step: shape mismatch");
  }
  state.step += 1;
  const Scalar b1 = config.adam_beta1;
  const Scalar b2 = config.adam_beta2;
  state.m = b1 * state.m + (1.0 - b1) * grads;
  state.v = b2 * state.v + (1.0 - b2) * grads.cwiseProduct(grads);
  const Scalar m_corr = 1.0 - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar v_corr = 1.0 - std::pow(b2, static_cast<Scalar>(state.step));

  if (config.weight_decay > 0.0) {
    params *= (1.0 - config.weight_decay);
  }
  params.array() -= config.learning_rate * (state.m.array() / m_corr) /
                    ((state.v.array() / v_corr).sqrt() + config.adam_epsilon);
  ensure_finite(params, "adam_step");
}

Scalar finite_difference_check(const std::function<Scalar(const Vector&)>& loss_fn,
                               const Vector& params, const Vector& analytic_grads,
                               Scalar epsilon) {
  if (params.size() != analytic_grads.size()) {
    throw NumericError("finite_difference_check: shape mismatch");
  }
  Vector probe = params;
  Scalar worst = 0.0;
  for (Index i = 0; i < params.size(); ++i) {
    const Scalar saved = probe[i];
    probe[i] = saved + epsilon;
    const Scalar hi = loss_fn(probe);
    probe[i] = saved - epsilon;
    const Scalar lo = loss_fn(probe);
    probe[i] = saved;
    const Scalar fd = (hi - lo) / (2.0 * epsilon);
    const Scalar denom = std::max<Scalar>(1e-8, std::abs(fd) + std::abs(analytic_grads[i]));
    worst = std::max(worst, std::abs(fd - analytic_grads[i]) / denom);
  }
  return worst;
}

}  // namespace owcl
