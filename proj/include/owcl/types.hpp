#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace owcl {

/// All numerics run on 64-bit floats; gradient-check tolerances depend on it.
using Scalar = double;

template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Vector = VectorX<Scalar>;
using Matrix = MatrixX<Scalar>;
using Index = Eigen::Index;

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

template <typename Derived>
void ensure_finite(const Eigen::MatrixBase<Derived>& m, const char* where) {
  if (!m.allFinite()) {
    throw NumericError(std::string("non-finite values in ") + where);
  }
}

inline void ensure_finite(Scalar x, const char* where) {
  if (!std::isfinite(x)) {
    throw NumericError(std::string("non-finite value in ") + where);
  }
}

/// Deterministic random source. All randomness in the project flows through
/// an explicitly passed Rng seeded once per experiment; there is no global
/// generator. The distributions are hand-rolled so that the byte stream of
/// draws is pinned by this file, not by the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  Scalar uniform() {
    return static_cast<Scalar>(engine_() >> 11) * 0x1.0p-53;
  }

  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw NumericError("uniform_index: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; one value per call, no cached spare.
  Scalar normal() {
    Scalar u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Scalar u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  Scalar normal(Scalar mean, Scalar stddev) { return mean + stddev * normal(); }

  Vector normal_vector(Index dim, Scalar mean = 0.0, Scalar stddev = 1.0) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v[i] = normal(mean, stddev);
    return v;
  }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace owcl
