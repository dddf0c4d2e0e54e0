#include "owcl/checkpoint.hpp"

#include <json.hpp>

#include <fstream>

namespace owcl {
namespace {

using Json = nlohmann::ordered_json;

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& x : j) v[i++] = x.get<Scalar>();
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix();
  const Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols)
      throw CheckpointError("checkpoint: ragged matrix rows");
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<Scalar>();
  }
  return m;
}

Json encoder_to_json(const EncoderParams& enc) {
  Json filters = Json::array();
  for (const ConvFilter& f : enc.filters)
    filters.push_back({{"window", f.window},
                       {"weights", vector_to_json(f.weights)},
                       {"bias", f.bias}});
  return {{"embedding", matrix_to_json(enc.embedding)},
          {"filters", std::move(filters)},
          {"fc1_weight", matrix_to_json(enc.fc1_weight)},
          {"fc1_bias", vector_to_json(enc.fc1_bias)},
          {"fc2_weight", matrix_to_json(enc.fc2_weight)},
          {"fc2_bias", vector_to_json(enc.fc2_bias)}};
}

EncoderParams encoder_from_json(const Json& j) {
  EncoderParams enc;
  enc.embedding = matrix_from_json(j.at("embedding"));
  for (const Json& f : j.at("filters")) {
    ConvFilter filter;
    filter.window = f.at("window").get<int>();
    filter.weights = vector_from_json(f.at("weights"));
    filter.bias = f.at("bias").get<Scalar>();
    enc.filters.push_back(std::move(filter));
  }
  enc.fc1_weight = matrix_from_json(j.at("fc1_weight"));
  enc.fc1_bias = vector_from_json(j.at("fc1_bias"));
  enc.fc2_weight = matrix_from_json(j.at("fc2_weight"));
  enc.fc2_bias = vector_from_json(j.at("fc2_bias"));
  return enc;
}

Json heads_to_json(const ClassificationHeads& heads) {
  Json weights = Json::array();
  for (const Vector& w : heads.weights) weights.push_back(vector_to_json(w));
  Json biases = Json::array();
  for (Scalar b : heads.biases) biases.push_back(b);
  Json registry = Json::array();
  for (const ClassInfo& info : heads.registry)
    registry.push_back(
        {{"label", info.label},
         {"provenance", info.provenance.kind == ClassProvenance::kSeed ? "seed" : "discovered"},
         {"iteration", info.provenance.iteration}});
  return {{"weights", std::move(weights)},
          {"biases", std::move(biases)},
          {"registry", std::move(registry)}};
}

ClassificationHeads heads_from_json(const Json& j) {
  ClassificationHeads heads;
  for (const Json& w : j.at("weights")) heads.weights.push_back(vector_from_json(w));
  for (const Json& b : j.at("biases")) heads.biases.push_back(b.get<Scalar>());
  for (const Json& info : j.at("registry")) {
    ClassInfo out;
    out.label = info.at("label").get<std::string>();
    const std::string kind = info.at("provenance").get<std::string>();
    if (kind == "seed")
      out.provenance.kind = ClassProvenance::kSeed;
    else if (kind == "discovered")
      out.provenance.kind = ClassProvenance::kDiscovered;
    else
      throw CheckpointError("checkpoint: unknown class provenance \"" + kind + "\"");
    out.provenance.iteration = info.at("iteration").get<int>();
    heads.registry.push_back(std::move(out));
  }
  return heads;
}

Json document_to_json(const EmbeddedDocument& doc) {
  Json out = {{"token_ids", doc.token_ids},
              {"tokens", doc.tokens},
              {"embedding", nullptr},
              {"gold_label", doc.gold_label}};
  if (doc.embedding) out["embedding"] = vector_to_json(*doc.embedding);
  return out;
}

EmbeddedDocument document_from_json(const Json& j) {
  EmbeddedDocument doc;
  doc.token_ids = j.at("token_ids").get<std::vector<int>>();
  doc.tokens = j.at("tokens").get<std::vector<std::string>>();
  if (!j.at("embedding").is_null()) doc.embedding = vector_from_json(j.at("embedding"));
  doc.gold_label = j.at("gold_label").get<std::string>();
  return doc;
}

Json memory_to_json(const ExemplarMemory& memory) {
  Json classes = Json::array();
  for (const auto& [id, list] : memory.per_class) {
    Json exemplars = Json::array();
    for (const Exemplar& e : list)
      exemplars.push_back(
          {{"doc", document_to_json(e.doc)}, {"feature", vector_to_json(e.feature)}});
    classes.push_back({{"class_id", id}, {"exemplars", std::move(exemplars)}});
  }
  return {{"budget", memory.budget}, {"classes", std::move(classes)}};
}

ExemplarMemory memory_from_json(const Json& j) {
  ExemplarMemory memory;
  memory.budget = j.at("budget").get<Index>();
  for (const Json& entry : j.at("classes")) {
    std::vector<Exemplar> list;
    for (const Json& e : entry.at("exemplars")) {
      Exemplar ex;
      ex.doc = document_from_json(e.at("doc"));
      ex.feature = vector_from_json(e.at("feature"));
      list.push_back(std::move(ex));
    }
    memory.per_class.emplace(entry.at("class_id").get<int>(), std::move(list));
  }
  return memory;
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  checkpoint.model.validate();

  Json j = {{"format", "owcl-checkpoint"}, {"version", kCheckpointVersion}};
  j["seed"] = checkpoint.seed;
  Json model = {{"encoder", encoder_to_json(checkpoint.model.encoder)},
                {"heads", heads_to_json(checkpoint.model.heads)},
                {"snapshot", nullptr}};
  if (checkpoint.model.snapshot)
    model["snapshot"] = {{"encoder", encoder_to_json(checkpoint.model.snapshot->encoder)},
                         {"heads", heads_to_json(checkpoint.model.snapshot->heads)}};
  j["model"] = std::move(model);
  j["memory"] = memory_to_json(checkpoint.memory);

  std::ofstream out(path);
  if (!out) throw CheckpointError("checkpoint: cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw CheckpointError("checkpoint: write to " + path + " failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("checkpoint: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw CheckpointError("checkpoint: cannot parse " + path + ": " + e.what());
  }

  try {
    if (!j.is_object() || j.value("format", std::string()) != "owcl-checkpoint")
      throw CheckpointError("checkpoint: " + path + " is not a checkpoint container");
    const int version = j.value("version", -1);
    if (version != kCheckpointVersion)
      throw CheckpointError("checkpoint: version mismatch in " + path + ": found " +
                            std::to_string(version) + ", expected " +
                            std::to_string(kCheckpointVersion));

    Checkpoint out;
    out.seed = j.at("seed").get<std::uint64_t>();
    const Json& model = j.at("model");
    out.model.encoder = encoder_from_json(model.at("encoder"));
    out.model.heads = heads_from_json(model.at("heads"));
    if (!model.at("snapshot").is_null()) {
      auto frozen = std::make_shared<ModelState>();
      frozen->encoder = encoder_from_json(model.at("snapshot").at("encoder"));
      frozen->heads = heads_from_json(model.at("snapshot").at("heads"));
      out.model.snapshot = std::move(frozen);
    }
    out.memory = memory_from_json(j.at("memory"));
    out.model.validate();
    return out;
  } catch (const Json::exception& e) {
    throw CheckpointError("checkpoint: malformed " + path + ": " + e.what());
  }
}

}  // namespace owcl
