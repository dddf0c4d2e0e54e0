#pragma once

#include <memory>
#include <string>
#include <vector>

#include "owcl/dataset.hpp"
#include "owcl/numeric.hpp"
#include "owcl/types.hpp"

namespace owcl {

struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// One convolution filter over a token window: weights cover `window`
/// consecutive word vectors laid out contiguously.
struct ConvFilter {
  int window = 0;
  Vector weights;  // length window * embedding_dim
  Scalar bias = 0.0;
};

/// Trainable feature extractor. Two operating modes share the fully
/// connected stack:
///  - token path: embedding lookup, windowed convolutions with relu,
///    1-D max-pool per filter, then the fc stack;
///  - bypass: a document that carries a precomputed embedding feeds the
///    fc stack directly and the token machinery is unused.
struct EncoderParams {
  Matrix embedding;                // |V| x d_im; empty in bypass-only models
  std::vector<ConvFilter> filters;
  Matrix fc1_weight;               // h1 x input_dim
  Vector fc1_bias;
  Matrix fc2_weight;               // h2 x h1
  Vector fc2_bias;

  bool has_token_path() const { return embedding.rows() > 0; }
  Index embedding_dim() const { return embedding.cols(); }
  Index input_dim() const { return fc1_weight.cols(); }
  Index feature_dim() const { return fc2_weight.rows(); }

  void validate() const;
};

struct ClassProvenance {
  enum Kind { kSeed, kDiscovered };
  Kind kind = kSeed;
  int iteration = 0;  // discovery iteration; 0 for seed classes
};

struct ClassInfo {
  std::string label;
  ClassProvenance provenance;
};

/// Per-class sigmoid heads plus the append-only class registry. Old heads
/// are never reindexed; class id == registry position.
struct ClassificationHeads {
  std::vector<Vector> weights;
  std::vector<Scalar> biases;
  std::vector<ClassInfo> registry;

  Index count() const { return static_cast<Index>(registry.size()); }
  void validate(Index feature_dim) const;
};

/// Per-class rejection thresholds for the 1-vs-rest open decision.
struct RejectionPolicy {
  Vector thresholds;

  static RejectionPolicy uniform(Index classes, Scalar gamma = 0.5);
};

struct ModelState {
  EncoderParams encoder;
  ClassificationHeads heads;
  /// Frozen pre-increment copy used as the distillation teacher. Shared,
  /// immutable; never carries a snapshot of its own.
  std::shared_ptr<const ModelState> snapshot;

  Index param_count() const;
  Vector pack_params() const;
  void unpack_params(const Vector& flat);
  void validate() const;
};

/// Fresh token-path model. `filter_windows` has one entry per filter
/// (repeat a window size for several filters of that size).
ModelState make_token_model(Index vocab_size, Index embedding_dim,
                            const std::vector<int>& filter_windows,
                            Index hidden1, Index hidden2, Rng& rng);

/// Fresh bypass model for precomputed document embeddings.
ModelState make_external_model(Index input_dim, Index hidden1, Index hidden2,
                               Rng& rng);

/// Feature vector for a document (the fc stack output).
Vector encode(const EmbeddedDocument& doc, const EncoderParams& enc);

/// Per-class probabilities sigmoid(head logits) for a document.
Vector score(const EmbeddedDocument& doc, const ModelState& model);

struct Decision {
  bool rejected = false;
  int class_id = -1;  // valid when not rejected
};

/// Eq-4 open decision: Rejected iff every score falls below its threshold,
/// otherwise argmax with ties broken toward the lowest class index.
Decision classify_open(const Vector& scores, const RejectionPolicy& policy);

struct LossWithLogitGrads {
  Scalar value = 0.0;
  Matrix dlogits;  // batch x classes
};

/// Mean over the batch of -sum_j g_ij log s_ij with log arguments floored at
/// 1e-12. `targets` is row-wise one-hot (soft targets are accepted).
LossWithLogitGrads cross_entropy_loss(const Matrix& scores, const Matrix& targets);

/// Distillation between temperature-softened score vectors over the old-head
/// block: both inputs are raw sigmoid scores restricted to the snapshot's
/// heads; each row is exponentiated to 1/T and renormalized before the
/// cross-entropy. Gradients are w.r.t. the new model's logits.
LossWithLogitGrads distillation_loss(const Matrix& new_scores_old_heads,
                                     const Matrix& snapshot_scores_old_heads,
                                     Scalar temperature);

struct LabeledExample {
  EmbeddedDocument doc;
  int class_id = -1;
};

using TrainingSet = std::vector<LabeledExample>;

struct CustomLossResult {
  Scalar value = 0.0;
  Vector grads;  // packed like ModelState::pack_params()
};

/// Full training loss: cross-entropy over all heads plus, when a snapshot is
/// installed, distillation over the snapshot's head block. Gradients cover
/// every model parameter.
CustomLossResult custom_loss(const std::vector<const LabeledExample*>& batch,
                             const ModelState& model, Scalar temperature);

/// Appends heads for new classes with a small seeded random init. Existing
/// head parameters are preserved bit for bit.
ModelState add_heads(const ModelState& model, const std::vector<ClassInfo>& new_classes,
                     Rng& rng);

/// Installs a frozen deep copy of the current encoder and heads as the
/// distillation teacher.
ModelState snapshot(const ModelState& model);

struct TrainingReport {
  std::vector<Scalar> epoch_losses;
};

struct TrainOptions {
  OptimizerConfig optimizer;
  Scalar temperature = 2.0;
  int batch_size = 32;
  bool use_distillation = true;
};

/// Shuffled mini-batch Adam on custom_loss. Deterministic for a given rng
/// state; the snapshot (if any) is left untouched.
std::pair<ModelState, TrainingReport> train(const ModelState& model,
                                            const TrainingSet& data,
                                            const TrainOptions& options, Rng& rng);

}  // namespace owcl
