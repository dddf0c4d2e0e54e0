#pragma once

#include <functional>

#include "owcl/types.hpp"

namespace owcl {

/// Numerically stable logistic function; saturates to 0/1, never NaN.
inline Scalar sigmoid(Scalar x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const Scalar e = std::exp(x);
  return e / (1.0 + e);
}

inline Scalar relu(Scalar x) { return x > 0.0 ? x : 0.0; }

/// Derivative of relu as used by backprop; subgradient 0 at the kink.
inline Scalar relu_grad(Scalar x) { return x > 0.0 ? 1.0 : 0.0; }

template <typename Derived>
VectorX<typename Derived::Scalar> sigmoid(const Eigen::MatrixBase<Derived>& v) {
  return v.unaryExpr([](typename Derived::Scalar x) { return sigmoid(x); });
}

template <typename Derived>
VectorX<typename Derived::Scalar> relu(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseMax(typename Derived::Scalar(0));
}

template <typename Derived>
VectorX<typename Derived::Scalar> relu_grad(const Eigen::MatrixBase<Derived>& v) {
  return v.unaryExpr([](typename Derived::Scalar x) { return relu_grad(x); });
}

/// Cosine of the angle between a and b. Both must be nonzero.
Scalar cosine_similarity(const Vector& a, const Vector& b);

/// Sharpens or flattens a nonnegative weight vector: out_i proportional to
/// p_i^(1/T), renormalized to sum 1. T=1 is the identity on a normalized
/// input; T>1 flattens, T<1 sharpens.
Vector temperature_transform(const Vector& p, Scalar temperature);

struct OptimizerConfig {
  Scalar learning_rate = 0.02;
  Scalar weight_decay = 0.01;
  int epochs = 50;
  Scalar adam_beta1 = 0.9;
  Scalar adam_beta2 = 0.999;
  Scalar adam_epsilon = 1e-8;

  void validate() const;
};

/// Per-parameter first/second moment estimates plus the step counter.
struct AdamState {
  Vector m;
  Vector v;
  long step = 0;

  explicit AdamState(Index dim) : m(Vector::Zero(dim)), v(Vector::Zero(dim)) {}
};

/// One Adam update with decoupled weight decay. The decay term multiplies the
/// weights directly and is not scaled by the learning rate, so lr=0 still
/// applies decay and lr=0, decay=0 is the identity.
void adam_step(Vector& params, const Vector& grads, AdamState& state,
               const OptimizerConfig& config);

/// Central-difference gradient check. Returns the maximum over parameters of
/// |fd - analytic| / max(1e-8, |fd| + |analytic|). The loss function must be
/// deterministic; a stochastic loss makes the result meaningless.
Scalar finite_difference_check(const std::function<Scalar(const Vector&)>& loss_fn,
                               const Vector& params, const Vector& analytic_grads,
                               Scalar epsilon = 1e-5);

}  // namespace owcl
