#include "owcl/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace owcl {
namespace {

constexpr Scalar kLogFloor = 1e-12;
constexpr Scalar kHeadInitScale = 0.01;

struct EncodeTrace {
  bool bypass = false;
  std::vector<Vector> window_pre;  // per filter, pre-activation per position
  std::vector<Index> pool_argmax;  // per filter
  Vector input;                    // fc stack input
  Vector fc1_pre;
  Vector fc1_out;
  Vector fc2_pre;
  Vector features;
};

Vector window_concat(const EncoderParams& enc, const std::vector<int>& ids,
                     Index start, int window) {
  const Index d = enc.embedding_dim();
  Vector out(static_cast<Index>(window) * d);
  for (int p = 0; p < window; ++p) {
    out.segment(p * d, d) = enc.embedding.row(ids[static_cast<size_t>(start + p)]);
  }
  return out;
}

void encode_impl(const EmbeddedDocument& doc, const EncoderParams& enc,
                 EncodeTrace& trace) {
  if (doc.embedding.has_value()) {
    if (doc.embedding->size() != enc.input_dim()) {
      std::ostringstream msg;
      msg << "encode: document embedding has dimension " << doc.embedding->size()
          << " but the model expects " << enc.input_dim();
      throw ModelError(msg.str());
    }
    trace.bypass = true;
    trace.input = *doc.embedding;
  } else {
    if (!enc.has_token_path()) {
      throw ModelError(
          "encode: document carries no embedding and the model has no token path");
    }
    const Index n = static_cast<Index>(doc.token_ids.size());
    const Index vocab = enc.embedding.rows();
    for (int id : doc.token_ids) {
      if (id < 0 || id >= vocab) {
        std::ostringstream msg;
        msg << "encode: token id " << id << " outside vocabulary of size " << vocab;
        throw ModelError(msg.str());
      }
    }
    const Index n_filters = static_cast<Index>(enc.filters.size());
    trace.window_pre.resize(static_cast<size_t>(n_filters));
    trace.pool_argmax.resize(static_cast<size_t>(n_filters));
    trace.input = Vector(n_filters);
    for (Index f = 0; f < n_filters; ++f) {
      const ConvFilter& filt = enc.filters[static_cast<size_t>(f)];
      if (n < filt.window) {
        std::ostringstream msg;
        msg << "encode: document length " << n << " shorter than filter window "
            << filt.window;
        throw ModelError(msg.str());
      }
      const Index positions = n - filt.window + 1;
      Vector pre(positions);
      for (Index p = 0; p < positions; ++p) {
        pre[p] = filt.weights.dot(window_concat(enc, doc.token_ids, p, filt.window)) +
                 filt.bias;
      }
      Index best = 0;
      Scalar best_act = relu(pre[0]);
      for (Index p = 1; p < positions; ++p) {
        const Scalar act = relu(pre[p]);
        if (act > best_act) {
          best_act = act;
          best = p;
        }
      }
      trace.window_pre[static_cast<size_t>(f)] = std::move(pre);
      trace.pool_argmax[static_cast<size_t>(f)] = best;
      trace.input[f] = best_act;
    }
  }
  trace.fc1_pre = enc.fc1_weight * trace.input + enc.fc1_bias;
  trace.fc1_out = relu(trace.fc1_pre);
  trace.fc2_pre = enc.fc2_weight * trace.fc1_out + enc.fc2_bias;
  trace.features = relu(trace.fc2_pre);
}

/// Routes d(loss)/d(fc input) back through the token machinery.
void backprop_encoder(const EmbeddedDocument& doc, const EncoderParams& enc,
                      const EncodeTrace& trace, const Vector& dfeatures,
                      EncoderParams& grad) {
  const Vector dfc2_pre = dfeatures.cwiseProduct(relu_grad(trace.fc2_pre));
  grad.fc2_weight += dfc2_pre * trace.fc1_out.transpose();
  grad.fc2_bias += dfc2_pre;
  const Vector dfc1_out = enc.fc2_weight.transpose() * dfc2_pre;
  const Vector dfc1_pre = dfc1_out.cwiseProduct(relu_grad(trace.fc1_pre));
  grad.fc1_weight += dfc1_pre * trace.input.transpose();
  grad.fc1_bias += dfc1_pre;
  if (trace.bypass) {
    return;  // precomputed embeddings are inputs, not parameters
  }
  const Vector dinput = enc.fc1_weight.transpose() * dfc1_pre;
  const Index d = enc.embedding_dim();
  for (size_t f = 0; f < enc.filters.size(); ++f) {
    const ConvFilter& filt = enc.filters[f];
    const Index arg = trace.pool_argmax[f];
    const Scalar pre = trace.window_pre[f][arg];
    const Scalar dz = pre > 0.0 ? dinput[static_cast<Index>(f)] : 0.0;
    if (dz == 0.0) {
      continue;
    }
    grad.filters[f].weights += dz * window_concat(enc, doc.token_ids, arg, filt.window);
    grad.filters[f].bias += dz;
    for (int p = 0; p < filt.window; ++p) {
      grad.embedding.row(doc.token_ids[static_cast<size_t>(arg + p)]) +=
          dz * filt.weights.segment(p * d, d).transpose();
    }
  }
}

ModelState zero_like(const ModelState& model) {
  ModelState z;
  z.encoder = model.encoder;
  z.encoder.embedding.setZero();
  for (ConvFilter& f : z.encoder.filters) {
    f.weights.setZero();
    f.bias = 0.0;
  }
  z.encoder.fc1_weight.setZero();
  z.encoder.fc1_bias.setZero();
  z.encoder.fc2_weight.setZero();
  z.encoder.fc2_bias.setZero();
  z.heads = model.heads;
  for (Vector& w : z.heads.weights) {
    w.setZero();
  }
  std::fill(z.heads.biases.begin(), z.heads.biases.end(), 0.0);
  return z;
}

Vector head_logits(const ClassificationHeads& heads, const Vector& features) {
  Vector logits(heads.count());
  for (Index c = 0; c < heads.count(); ++c) {
    logits[c] = heads.weights[static_cast<size_t>(c)].dot(features) +
                heads.biases[static_cast<size_t>(c)];
  }
  return logits;
}

Matrix he_init(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  const Scalar scale = std::sqrt(2.0 / static_cast<Scalar>(cols));
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = scale * rng.normal();
    }
  }
  return m;
}

}  // namespace

void EncoderParams::validate() const {
  if (has_token_path()) {
    if (filters.empty()) {
      throw ModelError("encoder: token path requires at least one filter");
    }
    for (const ConvFilter& f : filters) {
      if (f.window < 1) {
        throw ModelError("encoder: filter window must be at least 1");
      }
      if (f.weights.size() != static_cast<Index>(f.window) * embedding_dim()) {
        throw ModelError("encoder: filter weight length does not match window * dim");
      }
    }
    if (input_dim() != static_cast<Index>(filters.size())) {
      throw ModelError("encoder: fc input width must equal the filter count");
    }
  } else if (!filters.empty()) {
    throw ModelError("encoder: filters present but no embedding table");
  }
  if (fc1_weight.rows() != fc1_bias.size()) {
    throw ModelError("encoder: fc1 bias length does not match fc1 rows");
  }
  if (fc2_weight.cols() != fc1_weight.rows()) {
    throw ModelError("encoder: fc2 input width does not match fc1 output");
  }
  if (fc2_weight.rows() != fc2_bias.size()) {
    throw ModelError("encoder: fc2 bias length does not match fc2 rows");
  }
}

void ClassificationHeads::validate(Index feature_dim) const {
  if (weights.size() != registry.size() || biases.size() != registry.size()) {
    throw ModelError("heads: weight, bias and registry sizes disagree");
  }
  for (size_t c = 0; c < weights.size(); ++c) {
    if (weights[c].size() != feature_dim) {
      throw ModelError("heads: head weight length does not match feature dim");
    }
    if (registry[c].label.empty()) {
      throw ModelError("heads: class label must be non-empty");
    }
  }
}

RejectionPolicy RejectionPolicy::uniform(Index classes, Scalar gamma) {
  if (classes < 0) {
    throw ModelError("rejection policy: negative class count");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ModelError("rejection policy: threshold must lie in (0, 1)");
  }
  RejectionPolicy policy;
  policy.thresholds = Vector::Constant(classes, gamma);
  return policy;
}

Index ModelState::param_count() const {
  Index n = encoder.embedding.size();
  for (const ConvFilter& f : encoder.filters) {
    n += f.weights.size() + 1;
  }
  n += encoder.fc1_weight.size() + encoder.fc1_bias.size();
  n += encoder.fc2_weight.size() + encoder.fc2_bias.size();
  for (const Vector& w : heads.weights) {
    n += w.size() + 1;
  }
  return n;
}

Vector ModelState::pack_params() const {
  Vector flat(param_count());
  Index at = 0;
  auto put = [&](const Scalar* data, Index n) {
    flat.segment(at, n) = Eigen::Map<const Vector>(data, n);
    at += n;
  };
  put(encoder.embedding.data(), encoder.embedding.size());
  for (const ConvFilter& f : encoder.filters) {
    put(f.weights.data(), f.weights.size());
    flat[at++] = f.bias;
  }
  put(encoder.fc1_weight.data(), encoder.fc1_weight.size());
  put(encoder.fc1_bias.data(), encoder.fc1_bias.size());
  put(encoder.fc2_weight.data(), encoder.fc2_weight.size());
  put(encoder.fc2_bias.data(), encoder.fc2_bias.size());
  for (size_t c = 0; c < heads.weights.size(); ++c) {
    put(heads.weights[c].data(), heads.weights[c].size());
    flat[at++] = heads.biases[c];
  }
  return flat;
}

void ModelState::unpack_params(const Vector& flat) {
  if (flat.size() != param_count()) {
    throw ModelError("unpack_params: flat vector length does not match the model");
  }
  Index at = 0;
  auto take = [&](Scalar* data, Index n) {
    Eigen::Map<Vector>(data, n) = flat.segment(at, n);
    at += n;
  };
  take(encoder.embedding.data(), encoder.embedding.size());
  for (ConvFilter& f : encoder.filters) {
    take(f.weights.data(), f.weights.size());
    f.bias = flat[at++];
  }
  take(encoder.fc1_weight.data(), encoder.fc1_weight.size());
  take(encoder.fc1_bias.data(), encoder.fc1_bias.size());
  take(encoder.fc2_weight.data(), encoder.fc2_weight.size());
  take(encoder.fc2_bias.data(), encoder.fc2_bias.size());
  for (size_t c = 0; c < heads.weights.size(); ++c) {
    take(heads.weights[c].data(), heads.weights[c].size());
    heads.biases[c] = flat[at++];
  }
}

void ModelState::validate() const {
  encoder.validate();
  heads.validate(encoder.feature_dim());
  if (snapshot) {
    snapshot->encoder.validate();
    snapshot->heads.validate(snapshot->encoder.feature_dim());
    if (snapshot->heads.count() > heads.count()) {
      throw ModelError("model: snapshot has more heads than the current model");
    }
  }
}

ModelState make_token_model(Index vocab_size, Index embedding_dim,
                            const std::vector<int>& filter_windows, Index hidden1,
                            Index hidden2, Rng& rng) {
  if (vocab_size < 2 || embedding_dim < 1 || hidden1 < 1 || hidden2 < 1 ||
      filter_windows.empty()) {
    throw ModelError("make_token_model: invalid architecture sizes");
  }
  ModelState m;
  m.encoder.embedding = Matrix(vocab_size, embedding_dim);
  for (Index r = 0; r < vocab_size; ++r) {
    for (Index c = 0; c < embedding_dim; ++c) {
      m.encoder.embedding(r, c) = 0.1 * rng.normal();
    }
  }
  for (int w : filter_windows) {
    if (w < 1) {
      throw ModelError("make_token_model: filter window must be at least 1");
    }
    ConvFilter f;
    f.window = w;
    const Index len = static_cast<Index>(w) * embedding_dim;
    f.weights = Vector(len);
    const Scalar scale = std::sqrt(2.0 / static_cast<Scalar>(len));
    for (Index i = 0; i < len; ++i) {
      f.weights[i] = scale * rng.normal();
    }
    f.bias = 0.0;
    m.encoder.filters.push_back(std::move(f));
  }
  const Index input = static_cast<Index>(filter_windows.size());
  m.encoder.fc1_weight = he_init(hidden1, input, rng);
  m.encoder.fc1_bias = Vector::Zero(hidden1);
  m.encoder.fc2_weight = he_init(hidden2, hidden1, rng);
  m.encoder.fc2_bias = Vector::Zero(hidden2);
  m.validate();
  return m;
}

ModelState make_external_model(Index input_dim, Index hidden1, Index hidden2,
                               Rng& rng) {
  if (input_dim < 1 || hidden1 < 1 || hidden2 < 1) {
    throw ModelError("make_external_model: invalid architecture sizes");
  }
  ModelState m;
  m.encoder.embedding = Matrix(0, 0);
  m.encoder.fc1_weight = he_init(hidden1, input_dim, rng);
  m.encoder.fc1_bias = Vector::Zero(hidden1);
  m.encoder.fc2_weight = he_init(hidden2, hidden1, rng);
  m.encoder.fc2_bias = Vector::Zero(hidden2);
  m.validate();
  return m;
}

Vector encode(const EmbeddedDocument& doc, const EncoderParams& enc) {
  EncodeTrace trace;
  encode_impl(doc, enc, trace);
  ensure_finite(trace.features, "encode output");
  return trace.features;
}

Vector score(const EmbeddedDocument& doc, const ModelState& model) {
  if (model.heads.count() == 0) {
    throw ModelError("score: model has no classification heads");
  }
  const Vector features = encode(doc, model.encoder);
  return sigmoid(head_logits(model.heads, features));
}

Decision classify_open(const Vector& scores, const RejectionPolicy& policy) {
  if (scores.size() == 0) {
    throw ModelError("classify_open: empty score vector");
  }
  if (scores.size() != policy.thresholds.size()) {
    throw ModelError("classify_open: score and threshold lengths disagree");
  }
  Decision d;
  d.rejected = true;
  for (Index i = 0; i < scores.size(); ++i) {
    if (scores[i] >= policy.thresholds[i]) {
      d.rejected = false;
      break;
    }
  }
  if (d.rejected) {
    return d;
  }
  Index best = 0;
  for (Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    }
  }
  d.class_id = static_cast<int>(best);
  return d;
}

LossWithLogitGrads cross_entropy_loss(const Matrix& scores, const Matrix& targets) {
  if (scores.rows() != targets.rows() || scores.cols() != targets.cols()) {
    throw ModelError("cross_entropy_loss: score and target shapes disagree");
  }
  if (scores.rows() == 0) {
    throw ModelError("cross_entropy_loss: empty batch");
  }
  const Scalar inv = 1.0 / static_cast<Scalar>(scores.rows());
  LossWithLogitGrads out;
  out.dlogits = Matrix::Zero(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) {
    for (Index j = 0; j < scores.cols(); ++j) {
      const Scalar g = targets(i, j);
      if (g == 0.0) {
        continue;
      }
      const Scalar s = scores(i, j);
      out.value -= inv * g * std::log(std::max(s, kLogFloor));
      if (s > kLogFloor) {
        out.dlogits(i, j) = -inv * g * (1.0 - s);
      }
    }
  }
  ensure_finite(out.value, "cross_entropy_loss value");
  return out;
}

LossWithLogitGrads distillation_loss(const Matrix& new_scores_old_heads,
                                     const Matrix& snapshot_scores_old_heads,
                                     Scalar temperature) {
  if (new_scores_old_heads.rows() != snapshot_scores_old_heads.rows() ||
      new_scores_old_heads.cols() != snapshot_scores_old_heads.cols()) {
    throw ModelError("distillation_loss: old-head score shapes disagree");
  }
  if (new_scores_old_heads.rows() == 0 || new_scores_old_heads.cols() == 0) {
    throw ModelError("distillation_loss: empty score matrix");
  }
  const Scalar inv = 1.0 / static_cast<Scalar>(new_scores_old_heads.rows());
  LossWithLogitGrads out;
  out.dlogits = Matrix::Zero(new_scores_old_heads.rows(), new_scores_old_heads.cols());
  for (Index i = 0; i < new_scores_old_heads.rows(); ++i) {
    const Vector g = temperature_transform(snapshot_scores_old_heads.row(i), temperature);
    const Vector q = temperature_transform(new_scores_old_heads.row(i), temperature);
    for (Index k = 0; k < g.size(); ++k) {
      out.value -= inv * g[k] * std::log(std::max(q[k], kLogFloor));
      const Scalar s = new_scores_old_heads(i, k);
      out.dlogits(i, k) = inv * (q[k] - g[k]) * (1.0 - s) / temperature;
    }
  }
  ensure_finite(out.value, "distillation_loss value");
  return out;
}

CustomLossResult custom_loss(const std::vector<const LabeledExample*>& batch,
                             const ModelState& model, Scalar temperature) {
  if (batch.empty()) {
    throw ModelError("custom_loss: empty batch");
  }
  model.validate();
  const Index classes = model.heads.count();
  if (classes == 0) {
    throw ModelError("custom_loss: model has no classification heads");
  }
  const Index old_classes = model.snapshot ? model.snapshot->heads.count() : 0;
  const Scalar inv = 1.0 / static_cast<Scalar>(batch.size());

  ModelState grad = zero_like(model);
  Scalar value = 0.0;
  for (const LabeledExample* ex : batch) {
    if (ex->class_id < 0 || ex->class_id >= classes) {
      std::ostringstream msg;
      msg << "custom_loss: class id " << ex->class_id << " outside head range "
          << classes;
      throw ModelError(msg.str());
    }
    EncodeTrace trace;
    encode_impl(ex->doc, model.encoder, trace);
    const Vector logits = head_logits(model.heads, trace.features);
    const Vector scores = sigmoid(logits);

    Vector dlogits = Vector::Zero(classes);
    const Scalar s_target = scores[ex->class_id];
    value -= inv * std::log(std::max(s_target, kLogFloor));
    if (s_target > kLogFloor) {
      dlogits[ex->class_id] -= inv * (1.0 - s_target);
    }

    if (old_classes > 0) {
      const Vector snap_features = encode(ex->doc, model.snapshot->encoder);
      const Vector snap_scores =
          sigmoid(head_logits(model.snapshot->heads, snap_features));
      const Vector g = temperature_transform(snap_scores, temperature);
      const Vector q = temperature_transform(scores.head(old_classes), temperature);
      for (Index k = 0; k < old_classes; ++k) {
        value -= inv * g[k] * std::log(std::max(q[k], kLogFloor));
        dlogits[k] += inv * (q[k] - g[k]) * (1.0 - scores[k]) / temperature;
      }
    }

    Vector dfeatures = Vector::Zero(model.encoder.feature_dim());
    for (Index c = 0; c < classes; ++c) {
      if (dlogits[c] == 0.0) {
        continue;
      }
      grad.heads.weights[static_cast<size_t>(c)] += dlogits[c] * trace.features;
      grad.heads.biases[static_cast<size_t>(c)] += dlogits[c];
      dfeatures += dlogits[c] * model.heads.weights[static_cast<size_t>(c)];
    }
    backprop_encoder(ex->doc, model.encoder, trace, dfeatures, grad.encoder);
  }

  CustomLossResult out;
  out.value = value;
  out.grads = grad.pack_params();
  ensure_finite(out.value, "custom_loss value");
  ensure_finite(out.grads, "custom_loss gradients");
  return out;
}

ModelState add_heads(const ModelState& model, const std::vector<ClassInfo>& new_classes,
                     Rng& rng) {
  ModelState out = model;
  const Index dim = model.encoder.feature_dim();
  std::set<std::string> seen;
  for (const ClassInfo& info : model.heads.registry) {
    seen.insert(info.label);
  }
  for (const ClassInfo& info : new_classes) {
    if (info.label.empty()) {
      throw ModelError("add_heads: class label must be non-empty");
    }
    if (!seen.insert(info.label).second) {
      throw ModelError("add_heads: class \"" + info.label + "\" is already registered");
    }
    Vector w(dim);
    for (Index i = 0; i < dim; ++i) {
      w[i] = kHeadInitScale * rng.normal();
    }
    out.heads.weights.push_back(std::move(w));
    out.heads.biases.push_back(kHeadInitScale * rng.normal());
    out.heads.registry.push_back(info);
  }
  return out;
}

ModelState snapshot(const ModelState& model) {
  ModelState out = model;
  auto frozen = std::make_shared<ModelState>();
  frozen->encoder = model.encoder;
  frozen->heads = model.heads;
  out.snapshot = std::move(frozen);
  return out;
}

std::pair<ModelState, TrainingReport> train(const ModelState& model,
                                            const TrainingSet& data,
                                            const TrainOptions& options, Rng& rng) {
  model.validate();
  options.optimizer.validate();
  if (options.batch_size < 1) {
    throw ModelError("train: batch size must be at least 1");
  }
  if (!(options.temperature > 0.0)) {
    throw ModelError("train: temperature must be positive");
  }
  if (data.empty()) {
    throw ModelError("train: empty training set");
  }
  for (const LabeledExample& ex : data) {
    if (ex.class_id < 0 || ex.class_id >= model.heads.count()) {
      throw ModelError("train: example class id outside the head range");
    }
  }

  ModelState current = model;
  if (!options.use_distillation) {
    current.snapshot.reset();  // ablation: no teacher for this increment
  }
  Vector params = current.pack_params();
  AdamState adam(params.size());
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});

  TrainingReport report;
  const size_t n = data.size();
  const size_t bs = static_cast<size_t>(options.batch_size);
  for (int epoch = 0; epoch < options.optimizer.epochs; ++epoch) {
    rng.shuffle(order);
    Scalar epoch_loss = 0.0;
    for (size_t start = 0; start < n; start += bs) {
      const size_t stop = std::min(start + bs, n);
      std::vector<const LabeledExample*> batch;
      batch.reserve(stop - start);
      for (size_t i = start; i < stop; ++i) {
        batch.push_back(&data[order[i]]);
      }
      const CustomLossResult loss = custom_loss(batch, current, options.temperature);
      adam_step(params, loss.grads, adam, options.optimizer);
      current.unpack_params(params);
      epoch_loss += loss.value * static_cast<Scalar>(batch.size());
    }
    ensure_finite(params, "train parameters");
    report.epoch_losses.push_back(epoch_loss / static_cast<Scalar>(n));
  }
  return {std::move(current), std::move(report)};
}

}  // namespace owcl
